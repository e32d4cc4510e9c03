"""Self-contained numerical utilities.

Bounded scalar minimization (golden section with parabolic
interpolation), a derivative-free simplex minimizer, central-difference
Hessians, and quantile functions for the standard normal and the
chi-square distribution with one degree of freedom.  The likelihood
surfaces these serve are cheap, smooth and low-dimensional, so
derivative-free methods are entirely adequate and keep the package free
of heavyweight dependencies.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import EvaluationError

_GOLDEN = 0.5 * (3.0 - math.sqrt(5.0))  # golden-section step fraction
_SQRT_EPS = math.sqrt(np.finfo(float).eps)


@dataclass(frozen=True)
class OptimResult:
    """Outcome of a minimization run.

    ``argmin`` is a float for scalar searches and an ndarray for
    multivariate ones.  ``converged`` is True only when the stopping
    tolerance was met before the iteration cap.
    """

    argmin: float | np.ndarray
    value: float
    iterations: int
    converged: bool


def _probe(objective: Callable[[float], float], x: float) -> float:
    fx = objective(x)
    if not math.isfinite(fx):
        raise EvaluationError(f"objective returned non-finite value {fx!r} at {x!r}")
    return fx


def minimize_scalar(
    objective: Callable[[float], float],
    lower: float,
    upper: float,
    tol: float = 1e-8,
    max_iter: int = 500,
) -> OptimResult:
    """Minimize a one-dimensional function on [lower, upper].

    Brent-style search: parabolic interpolation through the three best
    points when the fit is trustworthy, golden-section bisection
    otherwise.  For unimodal objectives the returned point is within
    ``tol`` of the minimizer (up to the sqrt(eps) resolution limit of
    double precision).  Non-finite objective values abort the search.
    """
    if not lower < upper:
        raise ValueError(f"need lower < upper, got [{lower}, {upper}]")
    if tol <= 0.0:
        raise ValueError(f"tol must be positive, got {tol}")

    a, b = float(lower), float(upper)
    x = w = v = a + _GOLDEN * (b - a)
    fx = fw = fv = _probe(objective, x)
    d = e = 0.0  # last and second-to-last step sizes
    converged = False
    iterations = 0

    for iterations in range(1, max_iter + 1):
        mid = 0.5 * (a + b)
        tol1 = _SQRT_EPS * abs(x) + tol / 3.0
        tol2 = 2.0 * tol1
        if abs(x - mid) <= tol2 - 0.5 * (b - a):
            converged = True
            break

        use_golden = True
        if abs(e) > tol1:
            # parabola through (v, fv), (w, fw), (x, fx)
            r = (x - w) * (fx - fv)
            q = (x - v) * (fx - fw)
            p = (x - v) * q - (x - w) * r
            q = 2.0 * (q - r)
            if q > 0.0:
                p = -p
            q = abs(q)
            r, e = e, d
            if abs(p) < abs(0.5 * q * r) and q * (a - x) < p < q * (b - x):
                # accept the parabolic step
                d = p / q
                u = x + d
                if (u - a) < tol2 or (b - u) < tol2:
                    d = tol1 if x < mid else -tol1
                use_golden = False
        if use_golden:
            e = (b - x) if x < mid else (a - x)
            d = _GOLDEN * e

        u = x + d if abs(d) >= tol1 else x + (tol1 if d > 0.0 else -tol1)
        fu = _probe(objective, u)

        if fu <= fx:
            if u < x:
                b = x
            else:
                a = x
            v, w, x = w, x, u
            fv, fw, fx = fw, fx, fu
        else:
            if u < x:
                a = u
            else:
                b = u
            if fu <= fw or w == x:
                v, w = w, u
                fv, fw = fw, fu
            elif fu <= fv or v == x or v == w:
                v, fv = u, fu

    return OptimResult(argmin=x, value=fx, iterations=iterations, converged=converged)


def minimize_multivariate(
    objective: Callable[[np.ndarray], float],
    start: Sequence[float],
    tol: float = 1e-9,
    max_iter: int = 2000,
) -> OptimResult:
    """Minimize a multivariate function by Nelder-Mead simplex descent.

    Infinite objective values are tolerated (treated as worst), which
    lets callers reject infeasible points; NaN aborts.  Converges when
    both the simplex diameter and the spread of function values fall
    below ``tol``.  If the iteration cap is hit the best point so far is
    returned with ``converged=False``.
    """
    x0 = np.asarray(start, dtype=float)
    if x0.ndim != 1:
        raise ValueError("start must be a flat coordinate vector")
    if not np.all(np.isfinite(x0)):
        raise ValueError(f"start must be finite, got {x0}")
    if tol <= 0.0:
        raise ValueError(f"tol must be positive, got {tol}")

    def evaluate(x: np.ndarray) -> float:
        fx = float(objective(x))
        if math.isnan(fx):
            raise EvaluationError(f"objective returned NaN at {x}")
        return fx

    n = x0.size
    simplex = [x0]
    for i in range(n):
        step = 0.05 * abs(x0[i]) if x0[i] != 0.0 else 0.1
        vertex = x0.copy()
        vertex[i] += step
        simplex.append(vertex)
    values = [evaluate(p) for p in simplex]

    converged = False
    iterations = 0
    for iterations in range(1, max_iter + 1):
        order = np.argsort(values, kind="stable")
        simplex = [simplex[k] for k in order]
        values = [values[k] for k in order]

        spread = max(np.max(np.abs(p - simplex[0])) for p in simplex[1:])
        f_spread = values[-1] - values[0]
        if spread <= tol and (math.isfinite(f_spread) and f_spread <= tol):
            converged = True
            break

        centroid = np.mean(simplex[:-1], axis=0)
        worst = simplex[-1]

        reflected = centroid + (centroid - worst)
        f_reflected = evaluate(reflected)
        if values[0] <= f_reflected < values[-2]:
            simplex[-1], values[-1] = reflected, f_reflected
            continue
        if f_reflected < values[0]:
            expanded = centroid + 2.0 * (centroid - worst)
            f_expanded = evaluate(expanded)
            if f_expanded < f_reflected:
                simplex[-1], values[-1] = expanded, f_expanded
            else:
                simplex[-1], values[-1] = reflected, f_reflected
            continue
        if f_reflected < values[-1]:
            contracted = centroid + 0.5 * (reflected - centroid)
            f_contracted = evaluate(contracted)
            if f_contracted <= f_reflected:
                simplex[-1], values[-1] = contracted, f_contracted
                continue
        else:
            contracted = centroid + 0.5 * (worst - centroid)
            f_contracted = evaluate(contracted)
            if f_contracted < values[-1]:
                simplex[-1], values[-1] = contracted, f_contracted
                continue
        # shrink toward the best vertex
        simplex = [simplex[0]] + [simplex[0] + 0.5 * (p - simplex[0]) for p in simplex[1:]]
        values = [values[0]] + [evaluate(p) for p in simplex[1:]]

    best = int(np.argmin(values))
    return OptimResult(
        argmin=simplex[best].copy(),
        value=values[best],
        iterations=iterations,
        converged=converged,
    )


def hessian_fd(objective: Callable[[np.ndarray], float], point: Sequence[float]) -> np.ndarray:
    """Central-difference Hessian of a scalar function.

    Per-coordinate step h_j = max(1e-5, 1e-4 * |x_j|), balancing
    truncation against roundoff at typical likelihood curvatures.  The
    result is symmetric by construction.
    """
    x = np.asarray(point, dtype=float)
    n = x.size
    h = np.maximum(1e-5, 1e-4 * np.abs(x))

    def evaluate(y: np.ndarray) -> float:
        fy = float(objective(y))
        if not math.isfinite(fy):
            raise EvaluationError(f"objective returned non-finite value {fy!r} at {y}")
        return fy

    f0 = evaluate(x)
    hess = np.empty((n, n))
    for j in range(n):
        ej = np.zeros(n)
        ej[j] = h[j]
        hess[j, j] = (evaluate(x + ej) - 2.0 * f0 + evaluate(x - ej)) / h[j] ** 2
        for k in range(j + 1, n):
            ek = np.zeros(n)
            ek[k] = h[k]
            cross = (
                evaluate(x + ej + ek)
                - evaluate(x + ej - ek)
                - evaluate(x - ej + ek)
                + evaluate(x - ej - ek)
            ) / (4.0 * h[j] * h[k])
            hess[j, k] = cross
            hess[k, j] = cross
    return hess


# Rational approximation for the inverse normal CDF (A. Acklam's
# coefficients, |relative error| < 1.2e-9), then one Halley refinement
# against the erf-based CDF for close-to-machine accuracy.
_ICDF_A = (
    -3.969683028665376e01, 2.209460984245205e02, -2.759285104469687e02,
    1.383577518672690e02, -3.066479806614716e01, 2.506628277459239e00,
)
_ICDF_B = (
    -5.447609879822406e01, 1.615858368580409e02, -1.556989798598866e02,
    6.680131188771972e01, -1.328068155288572e01,
)
_ICDF_C = (
    -7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e00,
    -2.549732539343734e00, 4.374664141464968e00, 2.938163982698783e00,
)
_ICDF_D = (
    7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e00,
    3.754408661907416e00,
)
_ICDF_P_LOW = 0.02425


def _normal_cdf(x: float) -> float:
    return 0.5 * math.erfc(-x / math.sqrt(2.0))


def _normal_pdf(x: float) -> float:
    return math.exp(-0.5 * x * x) / math.sqrt(2.0 * math.pi)


def normal_quantile(p: float) -> float:
    """Inverse CDF of the standard normal distribution.

    Absolute error below 1e-8 on (0, 1); raises at the endpoints, where
    the quantile is infinite.
    """
    if not 0.0 < p < 1.0:
        raise ValueError(f"p must lie strictly inside (0, 1), got {p}")

    a, b, c, d = _ICDF_A, _ICDF_B, _ICDF_C, _ICDF_D
    if p < _ICDF_P_LOW:
        q = math.sqrt(-2.0 * math.log(p))
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) / (
            (((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0
        )
    elif p <= 1.0 - _ICDF_P_LOW:
        q = p - 0.5
        r = q * q
        x = (
            (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5])
            * q
            / (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0)
        )
    else:
        q = math.sqrt(-2.0 * math.log(1.0 - p))
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) / (
            (((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0
        )

    pdf = _normal_pdf(x)
    if pdf > 0.0:
        # one Halley step against the erf-based CDF
        err = (_normal_cdf(x) - p) / pdf
        x -= err / (1.0 + 0.5 * x * err)
    return x


def chisq1_quantile(p: float) -> float:
    """Inverse CDF of the chi-square distribution with 1 degree of freedom.

    A chi-square(1) variable is a squared standard normal, so the
    quantile is normal_quantile((1 + p) / 2) squared.
    """
    if not 0.0 < p < 1.0:
        raise ValueError(f"p must lie strictly inside (0, 1), got {p}")
    return normal_quantile(0.5 * (1.0 + p)) ** 2
