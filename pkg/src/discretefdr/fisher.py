"""One-sided Fisher's exact test for 2x2 tables with full attainable supports.

The test conditions on both margins of the table, so under the null the
first cell follows a hypergeometric distribution. Beyond the observed
p-value and midP-value, each test exposes the complete set of p-values it
could have produced for the fixed margins: the ingredient every discrete
procedure in this package needs.

Numerical contract: atoms are built by compensated (Kahan) summation of
log-gamma point probabilities, and an observed p-value is read back from
the same atoms array, so downstream CDF lookups at an observed p-value hit
its atom bit-for-bit. The largest atom is forced to exactly 1.0.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import gammaln

from .nulldist import NullDistribution, TestResult, degenerate, midp_distribution


class TailDirection(enum.Enum):
    """Alternative direction: group 1's success probability smaller or larger."""

    LESS = "less"
    GREATER = "greater"


@dataclass(frozen=True)
class ContingencyTable:
    """One 2x2 table: group 1 and group 2 occurrence / non-occurrence counts."""

    x11: int
    x12: int
    x21: int
    x22: int

    def __post_init__(self):
        for name in ("x11", "x12", "x21", "x22"):
            v = getattr(self, name)
            if not isinstance(v, (int, np.integer)) or isinstance(v, bool):
                raise ValueError(f"{name} must be an integer, got {v!r}")
            if v < 0:
                raise ValueError(f"{name} must be non-negative, got {v}")

    @property
    def n1(self) -> int:
        return self.x11 + self.x12

    @property
    def n2(self) -> int:
        return self.x21 + self.x22

    @property
    def pooled_successes(self) -> int:
        return self.x11 + self.x21


def _log_comb(n, k):
    n = np.asarray(n, dtype=float)
    k = np.asarray(k, dtype=float)
    return gammaln(n + 1.0) - gammaln(k + 1.0) - gammaln(n - k + 1.0)


def _kahan_cumsum(x: np.ndarray) -> np.ndarray:
    """Cumulative sum with compensated summation."""
    out = np.empty_like(x)
    total = 0.0
    comp = 0.0
    for i, v in enumerate(x):
        y = v - comp
        t = total + y
        comp = (t - total) - y
        total = t
        out[i] = total
    return out


def hypergeom_pmf(k: int, population: int, successes: int, draws: int) -> float:
    """P(X = k) for X hypergeometric(population, successes, draws).

    Computed in log space; returns 0 for k outside the attainable range.
    """
    if not 0 <= successes <= population:
        raise ValueError("need 0 <= successes <= population")
    if not 0 <= draws <= population:
        raise ValueError("need 0 <= draws <= population")
    lo = max(0, draws + successes - population)
    hi = min(draws, successes)
    if k < lo or k > hi:
        return 0.0
    log_p = (
        _log_comb(successes, k)
        + _log_comb(population - successes, draws - k)
        - _log_comb(population, draws)
    )
    return float(np.exp(log_p))


@lru_cache(maxsize=None)
def support_for_margins(n1: int, n2: int, s: int, tail: TailDirection):
    """Attainable support for fixed margins, cached.

    Returns (dist, outcome_offset_to_atom_index, point_pmf) where
    ``dist.atoms[outcome_offset_to_atom_index[x11 - k_min]]`` is the p-value of
    outcome x11 (tail = LESS; for GREATER the offset is ``k_max - x11``) and
    ``point_pmf`` holds the hypergeometric point probability of each outcome
    in the same tail order as the cumulative sums.
    """
    if n1 < 0 or n2 < 0 or not 0 <= s <= n1 + n2:
        raise ValueError("invalid margins")
    population = n1 + n2
    k_min = max(0, s - n2)
    k_max = min(n1, s)
    if population == 0 or s == 0 or s == population or n1 == 0 or n2 == 0:
        # only one attainable outcome: the test is degenerate
        n_outcomes = k_max - k_min + 1
        return degenerate(), np.zeros(n_outcomes, dtype=int), np.ones(1)

    ks = np.arange(k_min, k_max + 1)
    log_pmf = (
        _log_comb(s, ks)
        + _log_comb(population - s, n1 - ks)
        - _log_comb(population, n1)
    )
    pmf = np.exp(log_pmf)
    if tail is TailDirection.GREATER:
        pmf = pmf[::-1]
    cum = _kahan_cumsum(pmf)
    # exp() rounding can push the running sum a few ulp past 1 for large
    # margins; clamp so the saturated upper tail collapses into the atom 1.0
    np.minimum(cum, 1.0, out=cum)
    cum[-1] = 1.0

    # merge outcomes whose cumulative probabilities are float-identical
    # (vanishing point masses); atoms must be strictly increasing, and a
    # leading tail that underflowed to 0 is folded into the first positive
    # atom (those outcomes inherit the smallest representable p-value)
    keep = np.empty(cum.size, dtype=bool)
    keep[0] = cum[0] > 0.0
    keep[1:] = cum[1:] > cum[:-1]
    atoms = cum[keep]
    offset_to_atom = np.searchsorted(atoms, cum)
    dist = NullDistribution(atoms, atoms.copy())
    return dist, offset_to_atom, pmf


@lru_cache(maxsize=None)
def _midp_support_for_margins(n1: int, n2: int, s: int, tail: TailDirection):
    dist, offset_to_atom, pmf = support_for_margins(n1, n2, s, tail)
    return midp_distribution(dist), offset_to_atom, pmf


def attainable_support(table: ContingencyTable, tail: TailDirection) -> NullDistribution:
    """All p-values the test could produce for this table's margins."""
    dist, _, _ = support_for_margins(table.n1, table.n2, table.pooled_successes, tail)
    return dist


def fisher_exact(table: ContingencyTable, tail: TailDirection) -> TestResult:
    """One-sided Fisher's exact test.

    LESS accumulates P(X11 <= observed), GREATER accumulates P(X11 >= observed).
    The midP-value subtracts half the observed outcome's point probability.
    """
    n1, n2, s = table.n1, table.n2, table.pooled_successes
    dist, offset_to_atom, _ = support_for_margins(n1, n2, s, tail)
    k_min = max(0, s - n2)
    k_max = min(n1, s)
    if tail is TailDirection.LESS:
        offset = table.x11 - k_min
    else:
        offset = k_max - table.x11
    k = int(offset_to_atom[offset])
    p = float(dist.atoms[k])
    mid_p = p - 0.5 * float(dist.point_masses[k])
    return TestResult(p_value=p, mid_p=mid_p, null=dist)
