"""Regression of the secondary attack rate on household covariates.

A GLM-style layer over the household likelihood: the per-household SAR
is a link-transformed linear combination of covariates, and the
coefficients are found by direct numerical maximum likelihood.  The
logit link keeps every fitted rate inside (0, 1); log and identity links
make coefficients easier to read for simple one-predictor models but can
propose rates outside the unit interval, which are rejected by giving
them zero likelihood.  Standard errors come from the inverse
finite-difference Hessian and per-coefficient intervals use the normal
approximation.
"""

from __future__ import annotations

import math
import numbers
import warnings
from dataclasses import dataclass
from typing import Callable, Mapping, Sequence

import numpy as np

from .errors import EvaluationError, SingularModelError
from .estimate import HouseholdObservation, _fit_alpha, _group_loglik, _grouped
from .numerics import hessian_fd, minimize_multivariate, normal_quantile


def _logistic(x: float) -> float:
    if x >= 0.0:
        return 1.0 / (1.0 + math.exp(-x))
    e = math.exp(x)
    return e / (1.0 + e)


@dataclass(frozen=True)
class LinkFunction:
    """Invertible map between the unit interval and the linear predictor."""

    name: str
    apply: Callable[[float], float]
    inverse: Callable[[float], float]


LOGIT = LinkFunction("logit", lambda p: math.log(p / (1.0 - p)), _logistic)
LOG = LinkFunction("log", math.log, math.exp)
IDENTITY = LinkFunction("identity", lambda p: p, lambda x: x)

LINKS = {link.name: link for link in (LOGIT, LOG, IDENTITY)}


def get_link(link: str | LinkFunction) -> LinkFunction:
    if isinstance(link, LinkFunction):
        return link
    try:
        return LINKS[link]
    except KeyError:
        raise ValueError(f"unknown link {link!r}; choose from {sorted(LINKS)}") from None


@dataclass(frozen=True)
class _Term:
    """One design column: the intercept, a numeric covariate, or one
    reference-coded indicator of a categorical covariate."""

    covariate: str | None
    level: str | None

    @property
    def name(self) -> str:
        if self.covariate is None:
            return "intercept"
        if self.level is None:
            return self.covariate
        return f"{self.covariate}={self.level}"


@dataclass(frozen=True)
class GlmFit:
    """Fitted SAR regression.

    ``covariance`` is None when the observed information could not be
    inverted; coefficient intervals are then unavailable.
    """

    link: str
    coefficients: np.ndarray
    covariance: np.ndarray | None
    loglik: float
    converged: bool
    predictor_names: tuple[str, ...]
    terms: tuple[_Term, ...]

    @property
    def std_errors(self) -> np.ndarray | None:
        if self.covariance is None:
            return None
        return np.sqrt(np.diag(self.covariance))

    def coefficient_intervals(self, level: float = 0.95) -> list[tuple[str, float, float, float, float]]:
        """Per-coefficient normal-approximation intervals.

        Returns (name, estimate, std_error, lower, upper) per term.
        """
        se = self.std_errors
        if se is None:
            raise SingularModelError("no covariance available for coefficient intervals")
        z = normal_quantile(0.5 * (1.0 + level))
        return [
            (term.name, float(b), float(s), float(b - z * s), float(b + z * s))
            for term, b, s in zip(self.terms, self.coefficients, se)
        ]


def _covariate_value(obs: HouseholdObservation, name: str):
    try:
        return obs.covariates[name]
    except KeyError:
        raise ValueError(f"household {obs.id}: missing covariate {name!r}") from None


def _build_terms(data: Sequence[HouseholdObservation], predictors: Sequence[str]) -> list[_Term]:
    if len(set(predictors)) != len(predictors):
        raise ValueError(f"duplicated predictors in {list(predictors)}")
    terms = [_Term(None, None)]
    for name in predictors:
        values = [_covariate_value(obs, name) for obs in data]
        if all(isinstance(v, numbers.Real) for v in values):
            if not all(math.isfinite(v) for v in values):
                bad = next(o.id for o, v in zip(data, values) if not math.isfinite(v))
                raise ValueError(f"household {bad}: covariate {name!r} is not finite")
            terms.append(_Term(name, None))
        else:
            # reference-coded indicators, lexicographically first level dropped
            levels = sorted({str(v) for v in values})
            terms.extend(_Term(name, lvl) for lvl in levels[1:])
    return terms


def _design_from_terms(data: Sequence[HouseholdObservation], terms: Sequence[_Term]) -> np.ndarray:
    X = np.empty((len(data), len(terms)))
    for j, term in enumerate(terms):
        if term.covariate is None:
            X[:, j] = 1.0
        elif term.level is None:
            X[:, j] = [float(_covariate_value(obs, term.covariate)) for obs in data]
        else:
            X[:, j] = [
                1.0 if str(_covariate_value(obs, term.covariate)) == term.level else 0.0
                for obs in data
            ]
    return X


def design_matrix(data: Sequence[HouseholdObservation], predictors: Sequence[str]) -> np.ndarray:
    """Design matrix with a leading intercept column.

    Numeric covariates pass through unchanged; categorical ones expand
    to reference-coded indicators in lexicographic level order.
    """
    data = list(data)
    return _design_from_terms(data, _build_terms(data, predictors))


def _safe_inverse(link: LinkFunction, eta: float) -> float:
    try:
        return link.inverse(eta)
    except (OverflowError, ValueError):
        return math.inf


def _pattern_groups(data: Sequence[HouseholdObservation], X: np.ndarray):
    """Group households by identical design row for shared-rate evaluation."""
    rows, inverse = np.unique(X, axis=0, return_inverse=True)
    patterns = []
    for j in range(rows.shape[0]):
        members = [data[i] for i in np.flatnonzero(inverse == j)]
        patterns.append((rows[j], _grouped(members)))
    return patterns


def _patterns_loglik(patterns, beta: np.ndarray, link: LinkFunction) -> float:
    total = 0.0
    for row, groups in patterns:
        alpha = _safe_inverse(link, float(row @ beta))
        if not 0.0 <= alpha <= 1.0:
            return -math.inf
        total += _group_loglik(groups, alpha)
        if math.isinf(total):
            return -math.inf
    return total


def glm_log_likelihood(
    data: Sequence[HouseholdObservation],
    X: np.ndarray,
    beta: Sequence[float],
    link: str | LinkFunction,
) -> float:
    """Log-likelihood of coefficient vector ``beta`` under the given design.

    Each household's SAR is the inverse link of its linear predictor;
    -inf when any predicted rate leaves [0, 1] (possible under the log
    and identity links).
    """
    data = list(data)
    X = np.asarray(X, dtype=float)
    beta = np.asarray(beta, dtype=float)
    if X.shape[0] != len(data):
        raise ValueError(f"design has {X.shape[0]} rows for {len(data)} households")
    if X.shape[1] != beta.size:
        raise ValueError(f"design has {X.shape[1]} columns for {beta.size} coefficients")
    return _patterns_loglik(_pattern_groups(data, X), beta, get_link(link))


def fit_glm(
    data: Sequence[HouseholdObservation],
    predictors: Sequence[str] = (),
    link: str | LinkFunction = LOGIT,
) -> GlmFit:
    """Fit the SAR regression by derivative-free maximum likelihood.

    The search starts from the pooled single-rate estimate (pulled into
    [0.01, 0.99] so the intercept is finite for every link) with zero
    slopes, which is feasible for all three links.

    Raises SingularModelError for non-identifiable designs.  If the
    Hessian at the optimum cannot be inverted the fit is returned with
    ``covariance=None`` and a warning.
    """
    data = list(data)
    if not data:
        raise ValueError("fit_glm requires at least one household")
    link = get_link(link)
    terms = _build_terms(data, predictors)
    X = _design_from_terms(data, terms)
    if np.linalg.matrix_rank(X) < X.shape[1]:
        raise SingularModelError(
            f"design matrix is rank deficient for predictors {list(predictors)}"
        )

    pooled, _, _ = _fit_alpha(_grouped(data))
    start = np.zeros(X.shape[1])
    start[0] = link.apply(min(max(pooled, 0.01), 0.99))

    patterns = _pattern_groups(data, X)
    nll = lambda beta: -_patterns_loglik(patterns, beta, link)
    result = minimize_multivariate(nll, start, tol=1e-9, max_iter=500 * X.shape[1])
    beta_hat = np.asarray(result.argmin)

    covariance = None
    try:
        hessian = hessian_fd(nll, beta_hat)
        covariance = np.linalg.inv(hessian)
        covariance = 0.5 * (covariance + covariance.T)
        if not np.all(np.isfinite(covariance)):
            covariance = None
    except (EvaluationError, np.linalg.LinAlgError):
        covariance = None
    if covariance is None:
        warnings.warn("observed information could not be inverted; no covariance reported")

    return GlmFit(
        link=link.name,
        coefficients=beta_hat,
        covariance=covariance,
        loglik=-result.value,
        converged=result.converged,
        predictor_names=tuple(t.name for t in terms),
        terms=tuple(terms),
    )


def predict_sar(fit: GlmFit, covariates: Mapping[str, float | str]) -> float:
    """SAR predicted for a covariate pattern, clamped into [0, 1].

    Log- and identity-link predictions outside the unit interval are
    clamped with a warning.
    """
    row = np.empty(len(fit.terms))
    for j, term in enumerate(fit.terms):
        if term.covariate is None:
            row[j] = 1.0
        else:
            if term.covariate not in covariates:
                raise ValueError(f"missing covariate {term.covariate!r}")
            value = covariates[term.covariate]
            row[j] = float(value) if term.level is None else float(str(value) == term.level)
    alpha = _safe_inverse(get_link(fit.link), float(row @ fit.coefficients))
    if not 0.0 <= alpha <= 1.0:
        warnings.warn(
            f"predicted rate {alpha} outside [0, 1] under the {fit.link} link; clamping"
        )
        alpha = min(max(alpha, 0.0), 1.0)
    return alpha
