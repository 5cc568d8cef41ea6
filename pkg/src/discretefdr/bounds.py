"""Upper bound on the FDR of the BH procedure applied to midP-values.

Applying BH to midP-values voids the usual m0*q/m guarantee because midP
null distributions are not stochastically dominated by uniform. The bound
computed here quantifies the worst-case inflation per hypothesis: epsilon_i
measures how far the null mass of the midP-value below the BH thresholds
k*q/m can exceed the threshold itself, and the FDR of midP BH is at most
(q/m) * sum of epsilon_i. Each epsilon_i is at most 2, so the bound never
exceeds 2q, but on concrete supports it is usually far closer to q.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .nulldist import NullDistribution, cdf_at, midp_distribution
from .procedures import Family, TaroneSelection


@dataclass(frozen=True)
class MidFdrBound:
    """Per-hypothesis inflation factors and the resulting FDR bound."""

    epsilons: np.ndarray
    bound_all: float
    q: float
    m: int

    def __post_init__(self):
        object.__setattr__(self, "epsilons", np.asarray(self.epsilons, dtype=float))


def epsilon(dist: NullDistribution, q: float, m: int) -> float:
    """Worst inflation of Pr(midP <= kq/m) relative to kq/m over k = 1..m."""
    if not 0 < q < 1:
        raise ValueError("q must be in (0, 1)")
    if m < 1:
        raise ValueError("m must be at least 1")
    mid = dist if dist.is_midp else midp_distribution(dist)
    best = 0.0
    for k in range(1, m + 1):
        t = k * q / m
        if t > 1.0:
            t = 1.0
        best = max(best, cdf_at(mid, t) / t)
    return best


def midfdr_upper_bound(
    family: Family, q: float, selection: TaroneSelection | None = None
) -> MidFdrBound:
    """Bound the FDR of BH on midP-values of the family at level q.

    With a Tarone ``selection``, the bound applies to the screened subfamily:
    m is replaced by the selected count, screened-out hypotheses get epsilon
    0, and the sum runs over the selected indices only.
    """
    if not 0 < q < 1:
        raise ValueError("q must be in (0, 1)")
    nulls = family.nulls
    if selection is None:
        active = np.arange(family.m)
        m_eff = family.m
    else:
        active = selection.selected
        m_eff = selection.mK
    eps = np.zeros(family.m)
    if m_eff == 0:
        return MidFdrBound(epsilons=eps, bound_all=0.0, q=q, m=0)
    for i in active:
        eps[i] = epsilon(nulls[i], q, m_eff)
    bound = q / m_eff * float(eps.sum())
    return MidFdrBound(epsilons=eps, bound_all=bound, q=q, m=m_eff)
