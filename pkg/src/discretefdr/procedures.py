"""Multiple-testing procedures as adjusted-p-value transformers.

Eight procedures are exposed. Four ignore the null supports and work on the
observed values alone: the step-up BH and step-down BL procedures, applied
either to p-values or to midP-values. Four exploit the discreteness: DBH and
DBL replace each p-value threshold comparison with the exact null probability
of falling below the threshold, and the Tarone variants first discard
hypotheses whose minimum achievable significance level cannot clear a
Bonferroni-style bar, then run BH or BL on the midP-values of the survivors
with the reduced family size.

Every procedure returns adjusted values aligned to the input order; rejecting
the hypotheses with adjusted value <= q reproduces the underlying sequential
procedure at level q.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .nulldist import (
    ATOL,
    NullDistribution,
    TestResult,
    cdf_at,
    midp_distribution,
    min_achievable_significance,
)


class Procedure(enum.Enum):
    BH = "bh"
    MIDP_BH = "midp-bh"
    DBH = "dbh"
    BL = "bl"
    MIDP_BL = "midp-bl"
    DBL = "dbl"
    TARONE_MIDP_BH = "tmidp-bh"
    TARONE_MIDP_BL = "tmidp-bl"


#: Procedures with a finite-sample FDR control guarantee under independence.
#: DBH is deliberately absent: its FDR can exceed the nominal level.
GUARANTEED_FDR_CONTROL = frozenset(
    {
        Procedure.BH,
        Procedure.BL,
        Procedure.DBL,
        Procedure.MIDP_BH,
        Procedure.MIDP_BL,
        Procedure.TARONE_MIDP_BH,
        Procedure.TARONE_MIDP_BL,
    }
)


@dataclass(frozen=True)
class Family:
    """An ordered family of test results for joint adjustment."""

    results: tuple

    def __post_init__(self):
        results = tuple(self.results)
        object.__setattr__(self, "results", results)
        if len(results) == 0:
            raise ValueError("family must contain at least one hypothesis")
        for r in results:
            if not isinstance(r, TestResult):
                raise ValueError("family entries must be TestResult instances")

    @property
    def m(self) -> int:
        return len(self.results)

    @property
    def p_values(self) -> np.ndarray:
        return np.array([r.p_value for r in self.results])

    @property
    def mid_p_values(self) -> np.ndarray:
        return np.array([r.mid_p for r in self.results])

    @property
    def nulls(self) -> tuple:
        return tuple(r.null for r in self.results)


@dataclass(frozen=True)
class AdjustedPValues:
    """Adjusted p-values aligned to input order.

    ``selected`` lists the indices the procedure actually tested. For the
    Tarone variants this is the screened subset and every other hypothesis
    carries adjusted value 1; for all other procedures it is the full range.
    """

    procedure: Procedure
    values: np.ndarray
    selected: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "values", np.asarray(self.values, dtype=float))
        object.__setattr__(self, "selected", np.asarray(self.selected, dtype=int))


@dataclass(frozen=True)
class TaroneSelection:
    """Result of the minimum-achievable-significance screening step.

    ``selected`` holds the indices whose minimum achievable significance
    level q*_i is at most c*q, and mK is their count: the effective family
    size for the second step. K is reported as a diagnostic: the smallest k
    for which at most k hypotheses have q*_i below the stricter c*q/k.
    """

    K: int
    mK: int
    selected: np.ndarray
    c: float


def _validate_pvals(pvals) -> np.ndarray:
    p = np.asarray(pvals, dtype=float)
    if p.ndim != 1 or p.size == 0:
        raise ValueError("need a non-empty 1-d vector of p-values")
    if np.any(p < 0) or np.any(p > 1):
        raise ValueError("p-values must lie in [0, 1]")
    return p


def _sorted_order(pvals: np.ndarray) -> np.ndarray:
    # stable: ties keep original index order, which fixes the DBL rank products
    return np.argsort(pvals, kind="stable")


def _bh_from_sorted(ps: np.ndarray, m: int) -> np.ndarray:
    n = ps.size
    adj = ps * m / np.arange(1, n + 1)
    adj = np.minimum.accumulate(adj[::-1])[::-1]
    return np.minimum(adj, 1.0)


def _bl_from_sorted(ps: np.ndarray, m: int) -> np.ndarray:
    n = ps.size
    i = np.arange(1, n + 1)
    mm = m - i + 1
    g = mm / m * (1.0 - (1.0 - ps) ** mm)
    return np.minimum(np.maximum.accumulate(g), 1.0)


def bh_adjust(pvals, procedure: Procedure = Procedure.BH) -> AdjustedPValues:
    """Step-up BH adjusted values: min over i >= j of (m/i) p_(i), capped at 1."""
    p = _validate_pvals(pvals)
    m = p.size
    order = _sorted_order(p)
    adj_sorted = _bh_from_sorted(p[order], m)
    values = np.empty(m)
    values[order] = adj_sorted
    return AdjustedPValues(procedure, values, np.arange(m))


def bl_adjust(pvals, procedure: Procedure = Procedure.BL) -> AdjustedPValues:
    """Step-down BL adjusted values: running max of the one-step bounds."""
    p = _validate_pvals(pvals)
    m = p.size
    order = _sorted_order(p)
    adj_sorted = _bl_from_sorted(p[order], m)
    values = np.empty(m)
    values[order] = adj_sorted
    return AdjustedPValues(procedure, values, np.arange(m))


def _cdf_matrix(family: Family, ps: np.ndarray, order: np.ndarray) -> np.ndarray:
    """C[i, j] = Pr under H_(j)'s null that its p-value is <= p_(i).

    Columns follow sorted ranks (order), rows follow sorted thresholds.
    Lookups vectorize per distribution via searchsorted on its atoms.
    """
    m = ps.size
    C = np.empty((m, m))
    nulls = family.nulls
    for j, l in enumerate(order):
        dist = nulls[l]
        idx = np.searchsorted(dist.atoms, ps + ATOL, side="right") - 1
        C[:, j] = np.where(idx >= 0, dist.cdf[np.maximum(idx, 0)], 0.0)
    return C


def dbh_adjust(family: Family) -> AdjustedPValues:
    """Discrete BH: each threshold count m*p_(i) becomes the exact null sum.

    Adjusted value at sorted rank j is min over i >= j of
    (sum over all l of Pr_{H_l}(P_l <= p_(i))) / i, capped at 1.
    """
    p = family.p_values
    m = family.m
    order = _sorted_order(p)
    ps = p[order]
    C = _cdf_matrix(family, ps, order)
    S = C.sum(axis=1)
    adj = S / np.arange(1, m + 1)
    adj = np.minimum(np.minimum.accumulate(adj[::-1])[::-1], 1.0)
    values = np.empty(m)
    values[order] = adj
    return AdjustedPValues(Procedure.DBH, values, np.arange(m))


def dbl_adjust(family: Family) -> AdjustedPValues:
    """Discrete BL: step-down with exact per-rank non-rejection products.

    At sorted rank i the one-step bound is
    (m-i+1)/m * (1 - prod over ranks j >= i of (1 - Pr_{H_(j)}(P_j <= p_(i))));
    the running max enforces step-down monotonicity. Ranks (and therefore the
    product's factors) are fixed by the observed p-values with ties broken by
    original index.
    """
    p = family.p_values
    m = family.m
    order = _sorted_order(p)
    ps = p[order]
    C = _cdf_matrix(family, ps, order)
    h = np.empty(m)
    for i in range(m):
        h[i] = (m - i) / m * (1.0 - np.prod(1.0 - C[i, i:]))
    values = np.empty(m)
    values[order] = np.minimum(np.maximum.accumulate(h), 1.0)
    return AdjustedPValues(Procedure.DBL, values, np.arange(m))


def dbl_critical_values(family: Family, q: float) -> np.ndarray:
    """Critical values of the discrete BL procedure at level q.

    delta_i is the largest threshold z at which the rank-i one-step bound
    stays at or below q, floored at delta_{i-1} (delta_0 = 0). The bound is a
    step function jumping only where some null CDF jumps, so scanning the
    union of all atoms over the family is exhaustive.

    The critical values use the same data-dependent rank assignment as
    dbl_adjust; rejecting while p_(i) <= delta_i walks the identical
    step-down path as thresholding the adjusted values at q.
    """
    if not 0 < q < 1:
        raise ValueError("q must be in (0, 1)")
    p = family.p_values
    m = family.m
    order = _sorted_order(p)
    nulls = family.nulls
    candidates = np.unique(np.concatenate([d.atoms for d in nulls]))
    # F[c, j]: null CDF of the rank-j hypothesis at candidate c
    F = np.empty((candidates.size, m))
    for j, l in enumerate(order):
        dist = nulls[l]
        idx = np.searchsorted(dist.atoms, candidates + ATOL, side="right") - 1
        F[:, j] = np.where(idx >= 0, dist.cdf[np.maximum(idx, 0)], 0.0)
    delta = np.empty(m)
    prev = 0.0
    for i in range(m):
        bound = (m - i) / m * (1.0 - np.prod(1.0 - F[:, i:], axis=1))
        ok = candidates[bound <= q + ATOL]
        z = float(ok[-1]) if ok.size else 0.0
        prev = max(prev, z)
        delta[i] = prev
    return delta


def tarone_select(family: Family, q: float, c: float = 1.0) -> TaroneSelection:
    """Drop hypotheses whose smallest attainable p-value exceeds c*q.

    A hypothesis with q*_i > q sits so deep in its discrete tail that the
    level-q step applied to the survivors cannot plausibly reach it; removing
    it shrinks the family size used in the second step, which is where the
    power gain comes from. The selection looks only at the null supports,
    never at the realized p-values. K is also computed, as a diagnostic: the
    smallest k for which m(k) = #{q*_i <= c*q/k} is at most k (the
    self-consistent family size under per-candidate Bonferroni thresholds).
    """
    if not 0 < q < 1:
        raise ValueError("q must be in (0, 1)")
    if c < 1:
        raise ValueError("c must be at least 1")
    qstar = np.array([min_achievable_significance(d) for d in family.nulls])
    m = family.m
    K = m
    for k in range(1, m + 1):
        if int(np.sum(qstar <= c * q / k + ATOL)) <= k:
            K = k
            break
    selected = np.nonzero(qstar <= c * q + ATOL)[0]
    return TaroneSelection(K=K, mK=selected.size, selected=selected, c=c)


def tarone_midp_procedure(
    family: Family, q: float, c: float = 1.0, base: Procedure = Procedure.BH
) -> AdjustedPValues:
    """BH or BL on the midP-values of the Tarone-screened subfamily.

    The screened subfamily is tested with its reduced size (the number of
    selected hypotheses) as the multiplicity; hypotheses that were screened
    out get adjusted value 1 and can never be rejected.
    """
    if base is Procedure.BH:
        proc, kernel = Procedure.TARONE_MIDP_BH, _bh_from_sorted
    elif base is Procedure.BL:
        proc, kernel = Procedure.TARONE_MIDP_BL, _bl_from_sorted
    else:
        raise ValueError("base must be Procedure.BH or Procedure.BL")
    selection = tarone_select(family, q, c)
    m = family.m
    values = np.ones(m)
    if selection.mK > 0:
        mid = family.mid_p_values[selection.selected]
        order = _sorted_order(mid)
        adj_sorted = kernel(mid[order], selection.mK)
        sub = np.empty(selection.mK)
        sub[order] = adj_sorted
        values[selection.selected] = sub
    return AdjustedPValues(proc, values, selection.selected.copy())


def reject_at_level(adj: AdjustedPValues, q: float) -> np.ndarray:
    """Indices (original order) with adjusted value <= q, within tolerance."""
    if not 0 < q < 1:
        raise ValueError("q must be in (0, 1)")
    return np.nonzero(adj.values <= q + ATOL)[0]


def adjust(family: Family, procedure: Procedure, q: float = 0.05, c: float = 1.0) -> AdjustedPValues:
    """Run any procedure by name on a family.

    q and c only influence the Tarone variants (their screening step); the
    other six procedures are threshold-free transformations.
    """
    if procedure is Procedure.BH:
        return bh_adjust(family.p_values)
    if procedure is Procedure.BL:
        return bl_adjust(family.p_values)
    if procedure is Procedure.MIDP_BH:
        return bh_adjust(family.mid_p_values, procedure=Procedure.MIDP_BH)
    if procedure is Procedure.MIDP_BL:
        return bl_adjust(family.mid_p_values, procedure=Procedure.MIDP_BL)
    if procedure is Procedure.DBH:
        return dbh_adjust(family)
    if procedure is Procedure.DBL:
        return dbl_adjust(family)
    if procedure is Procedure.TARONE_MIDP_BH:
        return tarone_midp_procedure(family, q, c, base=Procedure.BH)
    if procedure is Procedure.TARONE_MIDP_BL:
        return tarone_midp_procedure(family, q, c, base=Procedure.BL)
    raise ValueError(f"unknown procedure: {procedure!r}")
