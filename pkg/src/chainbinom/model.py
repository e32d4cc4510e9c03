"""Exact outbreak-size distributions for the Reed-Frost chain binomial model.

Disease spread in a closed household is modelled in discrete generations.
Every remaining susceptible is independently infected in generation g+1
with probability ``1 - (1 - alpha)**I_g``, where ``I_g`` is the number of
members infectious in generation g and ``alpha`` is the per-pair secondary
attack rate (SAR).  New cases are infectious for exactly one generation;
no infection enters the household after generation 0.

The cumulative number of infections after d generations is obtained by
enumerating every possible chain of per-generation case counts (the
compositions of the outbreak size into at most d parts, padded with
trailing zeros) and summing the chain probabilities.  Once d is at least
the number of initial susceptibles the result coincides with the
classical final-size distribution.

All arithmetic is plain double precision in linear space: chains are
short and households small, so underflow is not a concern at the
supported sizes.  Log-space handling happens at the likelihood level.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator

import numpy as np

from .errors import EnumerationCapError

# A chain of per-generation infection counts (i_1, ..., i_d).  Positive
# entries always precede zero entries: a dead chain stays dead.
Scenario = tuple[int, ...]

# Largest outbreak size we will enumerate scenarios for.  At the cap the
# scenario set has ~1.7e7 members, which still computes, but anything
# beyond is almost certainly a mistake and is refused instead of silently
# grinding.
ENUMERATION_CAP = 25

#: Distinguished horizon value meaning "the outbreak was fully observed".
FINAL = None


@dataclass(frozen=True)
class HouseholdConfig:
    """Household-level model parameters.

    s0: initially susceptible members, i0: index cases seeded from
    outside, sar: per-pair secondary attack rate.  Household size is
    ``s0 + i0``.
    """

    s0: int
    i0: int
    sar: float

    def __post_init__(self) -> None:
        if self.s0 < 0:
            raise ValueError(f"s0 must be nonnegative, got {self.s0}")
        if self.i0 < 0:
            raise ValueError(f"i0 must be nonnegative, got {self.i0}")
        if not 0.0 <= self.sar <= 1.0:
            raise ValueError(f"sar must lie in [0, 1], got {self.sar}")

    @property
    def size(self) -> int:
        return self.s0 + self.i0


@dataclass(frozen=True)
class OutbreakState:
    """Snapshot of a household outbreak at the start of a generation."""

    generation: int
    infectious: int
    susceptible: int
    infection_prob: float | None = None

    def __post_init__(self) -> None:
        if self.generation < 0 or self.infectious < 0 or self.susceptible < 0:
            raise ValueError("generation, infectious and susceptible must be nonnegative")
        if self.infection_prob is not None and not 0.0 <= self.infection_prob <= 1.0:
            raise ValueError(f"infection_prob must lie in [0, 1], got {self.infection_prob}")


def infection_probability(alpha: float, infectious: int) -> float:
    """Per-person probability of catching the disease this generation.

    Equals ``1 - (1 - alpha)**infectious``: the complement of escaping
    all independent exposures from the currently infectious members.
    """
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha must lie in [0, 1], got {alpha}")
    if infectious < 0:
        raise ValueError(f"infectious must be nonnegative, got {infectious}")
    return 1.0 - (1.0 - alpha) ** infectious


def transition_pmf(i_next: int, state: OutbreakState, alpha: float) -> float:
    """Probability that exactly ``i_next`` susceptibles are infected next.

    Binomial mass at ``i_next`` out of ``state.susceptible`` trials, each
    succeeding with the infection probability implied by ``alpha`` and
    ``state.infectious``.
    """
    if not 0 <= i_next <= state.susceptible:
        raise ValueError(
            f"i_next must lie in [0, susceptible={state.susceptible}], got {i_next}"
        )
    p = infection_probability(alpha, state.infectious)
    s = state.susceptible
    return math.comb(s, i_next) * p**i_next * (1.0 - p) ** (s - i_next)


def chain_probability(scenario, config: HouseholdConfig) -> float:
    """Probability of a specific chain of per-generation case counts.

    The scenario lists new infections in generations 1..d.  The
    probability is the product of one binomial transition per generation,
    with susceptibles depleted as the chain unfolds; a zero after the
    chain has died contributes a factor of one.
    """
    counts = [int(c) for c in scenario]
    if not counts:
        raise ValueError("scenario must contain at least one generation")
    if any(c < 0 for c in counts):
        raise ValueError(f"scenario counts must be nonnegative: {counts}")
    for g in range(1, len(counts)):
        if counts[g] > 0 and counts[g - 1] == 0:
            raise ValueError(f"malformed scenario (positive entry after a zero): {counts}")
    if sum(counts) > config.s0:
        raise ValueError(
            f"scenario infects {sum(counts)} but only {config.s0} are susceptible"
        )

    prob = 1.0
    infectious = config.i0
    susceptible = config.s0
    for g, new_cases in enumerate(counts):
        state = OutbreakState(
            generation=g,
            infectious=infectious,
            susceptible=susceptible,
            infection_prob=infection_probability(config.sar, infectious),
        )
        prob *= transition_pmf(new_cases, state, config.sar)
        susceptible -= new_cases
        infectious = new_cases
    return prob


def count_scenarios(total: int, generations: int) -> int:
    """Number of distinct chains giving ``total`` cases within ``generations``.

    Equals the number of compositions of ``total`` into at most
    ``generations`` positive parts; exactly one (the all-zero chain)
    exists for ``total == 0``.
    """
    if total < 0:
        raise ValueError(f"total must be nonnegative, got {total}")
    if generations < 1:
        raise ValueError(f"generations must be at least 1, got {generations}")
    if total == 0:
        return 1
    return sum(math.comb(total - 1, j) for j in range(min(generations, total)))


def _compositions(total: int, d: int) -> Iterator[list[int]]:
    """Yield length-d count vectors summing to ``total``, zero padded.

    Iterative successor scheme: start from the longest possible chain
    (1, 1, ..., remainder), then repeatedly move one case to an earlier
    generation and refill the later generations until the target sum is
    restored.  Positive entries stay contiguous from the front.
    """
    if total == 0:
        yield [0] * d
        return
    if total == 1:
        yield [1] + [0] * (d - 1)
        return
    if d == 1:
        yield [total]
        return

    depth = min(d, total)  # 1-based index of the last positive entry
    cur = [1] * depth + [0] * (d - depth)
    cur[depth - 1] = total - depth + 1
    yield list(cur)
    for _ in range(count_scenarios(total, d) - 1):
        for j in range(depth - 1, d):
            cur[j] = 0
        depth -= 1
        cur[depth - 1] += 1
        acc = sum(cur)
        while acc < total:
            depth += 1
            if depth == d:
                cur[d - 1] = total - acc
                acc = total
            else:
                cur[depth - 1] += 1
                acc += 1
        yield list(cur)


def enumerate_scenarios(total: int, generations: int) -> list[Scenario]:
    """All distinct chains producing ``total`` cases within ``generations``.

    Each scenario is a length-``generations`` tuple summing to ``total``
    with its positive entries contiguous from the front.  Raises
    EnumerationCapError for totals beyond ENUMERATION_CAP.
    """
    if total < 0:
        raise ValueError(f"total must be nonnegative, got {total}")
    if generations < 1:
        raise ValueError(f"generations must be at least 1, got {generations}")
    if total > ENUMERATION_CAP:
        raise EnumerationCapError(
            f"total={total} exceeds the enumeration cap of {ENUMERATION_CAP}"
        )
    return [tuple(c) for c in _compositions(total, generations)]


@lru_cache(maxsize=None)
def _scenario_matrix(total: int, d: int) -> np.ndarray:
    """Scenario set as an (n_scenarios, d) int8 matrix, cached.

    The matrix depends only on (total, d), never on the attack rate, so
    repeated likelihood evaluations reuse it.
    """
    if total > ENUMERATION_CAP:
        raise EnumerationCapError(
            f"total={total} exceeds the enumeration cap of {ENUMERATION_CAP}"
        )
    out = np.empty((count_scenarios(total, d), d), dtype=np.int8)
    for k, comp in enumerate(_compositions(total, d)):
        out[k] = comp
    out.setflags(write=False)
    return out


@lru_cache(maxsize=None)
def _stacked_scenarios(s0: int, d: int) -> tuple[np.ndarray, np.ndarray]:
    """Scenario matrices for every total 0..s0 stacked, with a total index."""
    mats = [_scenario_matrix(x, d) for x in range(s0 + 1)]
    rows = np.concatenate(mats, axis=0)
    totals = np.repeat(np.arange(s0 + 1), [m.shape[0] for m in mats])
    rows.setflags(write=False)
    totals.setflags(write=False)
    return rows, totals


@lru_cache(maxsize=None)
def _pascal(n: int) -> np.ndarray:
    """Binomial coefficient lookup table C[i, k] for i, k <= n."""
    table = np.zeros((n + 1, n + 1))
    table[:, 0] = 1.0
    for i in range(1, n + 1):
        table[i, 1 : i + 1] = table[i - 1, 1 : i + 1] + table[i - 1, 0:i]
    table.setflags(write=False)
    return table


def _chain_probabilities(rows: np.ndarray, s0: int, i0: int, alpha: float) -> np.ndarray:
    """Vectorized chain probabilities, one per scenario row."""
    counts = rows.astype(np.int64)
    prev = np.empty_like(counts)
    prev[:, 0] = i0
    prev[:, 1:] = counts[:, :-1]
    # susceptibles entering each generation: s0 minus everyone already infected
    sus = s0 - np.cumsum(counts, axis=1) + counts
    pi = 1.0 - (1.0 - alpha) ** prev
    factors = _pascal(s0)[sus, counts] * pi**counts * (1.0 - pi) ** (sus - counts)
    return factors.prod(axis=1)


def _effective_generations(generations: int | None, s0: int) -> int:
    """Clamp the horizon: beyond s0 the distribution has stabilized."""
    if generations is FINAL:
        return max(s0, 1)
    if generations < 1:
        raise ValueError(f"generations must be at least 1, got {generations}")
    return min(generations, max(s0, 1))


def incomplete_pmf(total: int, config: HouseholdConfig, generations: int) -> float:
    """Probability that ``total`` members are infected by generation d.

    Sums the probabilities of every chain of length ``generations`` whose
    case counts add up to ``total``.  Horizons beyond s0 are clamped to
    s0, where the distribution has already stabilized.
    """
    if not 0 <= total <= config.s0:
        raise ValueError(f"total must lie in [0, s0={config.s0}], got {total}")
    if config.s0 == 0 or config.i0 == 0:
        # no one to infect, or no one to start the chain
        _effective_generations(generations, config.s0)
        return 1.0 if total == 0 else 0.0
    d = _effective_generations(generations, config.s0)
    rows = _scenario_matrix(total, d)
    return float(_chain_probabilities(rows, config.s0, config.i0, config.sar).sum())


def final_size_pmf(total: int, config: HouseholdConfig) -> float:
    """Probability that ``total`` members are ever infected.

    The incomplete distribution evaluated at horizon s0, the longest an
    outbreak can last (one new case per generation).
    """
    if config.s0 == 0:
        if total != 0:
            raise ValueError(f"total must be 0 when s0=0, got {total}")
        return 1.0
    return incomplete_pmf(total, config, config.s0)


def size_distribution(config: HouseholdConfig, generations: int | None = FINAL) -> np.ndarray:
    """Outbreak-size PMF over totals 0..s0 as a vector.

    ``generations=FINAL`` (None) gives the final-size distribution;
    an integer gives the incomplete distribution after that many
    generations.
    """
    if config.s0 == 0:
        _effective_generations(generations, config.s0)
        return np.ones(1)
    if config.i0 == 0:
        out = np.zeros(config.s0 + 1)
        out[0] = 1.0
        return out
    d = _effective_generations(generations, config.s0)
    rows, totals = _stacked_scenarios(config.s0, d)
    probs = _chain_probabilities(rows, config.s0, config.i0, config.sar)
    return np.bincount(totals, weights=probs, minlength=config.s0 + 1)


def expected_far(config: HouseholdConfig, generations: int | None = FINAL) -> float:
    """Expected proportion of initial susceptibles infected by horizon d.

    The final attack rate (FAR) implied by the model: E[total] / s0 under
    the incomplete (or final, for ``generations=FINAL``) distribution.
    Unlike the SAR it grows with household size even at a fixed SAR.
    """
    if config.s0 == 0:
        raise ValueError("expected_far requires at least one susceptible")
    pmf = size_distribution(config, generations)
    return float(pmf @ np.arange(config.s0 + 1)) / config.s0
