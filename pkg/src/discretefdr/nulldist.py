"""Discrete null distributions: attainable p-value atoms with their null CDF.

Every procedure in this package consumes the same object: the full set of
values a discrete p-value can attain under its null (the "atoms"), together
with the null probability of falling at or below each atom. For a valid exact
test the CDF at each atom equals the atom itself; user-supplied distributions
may be strictly conservative (CDF below the atom), which is allowed but
reported via a warning.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

# Absolute tolerance for any comparison between atoms, thresholds, or
# observed p-values. Atoms are built by compensated summation and observed
# p-values are read back from the same array, so matches are exact in
# practice; the tolerance only absorbs noise in cross-distribution lookups.
ATOL = 1e-12


@dataclass(frozen=True)
class NullDistribution:
    """Sorted attainable p-values and the null CDF evaluated at each of them.

    atoms[j] is the j-th smallest attainable p-value, cdf[j] = Pr(P <= atoms[j])
    under the null. Point masses are the CDF increments. ``is_midp`` marks a
    distribution already transformed to the midP scale, whose final atom is
    below 1.
    """

    atoms: np.ndarray
    cdf: np.ndarray
    is_midp: bool = False

    def __post_init__(self):
        atoms = np.asarray(self.atoms, dtype=float)
        cdf = np.asarray(self.cdf, dtype=float)
        object.__setattr__(self, "atoms", atoms)
        object.__setattr__(self, "cdf", cdf)
        if atoms.ndim != 1 or atoms.size == 0:
            raise ValueError("atoms must be a non-empty 1-d array")
        if cdf.shape != atoms.shape:
            raise ValueError("atoms and cdf must have the same length")
        if np.any(np.diff(atoms) <= 0):
            raise ValueError("atoms must be strictly increasing")
        if atoms[0] <= 0 or atoms[-1] > 1 + ATOL:
            raise ValueError("atoms must lie in (0, 1]")
        if not self.is_midp and abs(atoms[-1] - 1.0) > ATOL:
            raise ValueError("last atom must equal 1")
        if np.any(np.diff(cdf) < -ATOL):
            raise ValueError("cdf must be non-decreasing")
        if abs(cdf[-1] - 1.0) > ATOL:
            raise ValueError("cdf must reach 1 at the last atom")
        if cdf[0] < -ATOL:
            raise ValueError("cdf values must be non-negative")

    @property
    def n_atoms(self) -> int:
        return int(self.atoms.size)

    @property
    def point_masses(self) -> np.ndarray:
        return np.diff(self.cdf, prepend=0.0)

    def __eq__(self, other):
        if not isinstance(other, NullDistribution):
            return NotImplemented
        return (
            self.is_midp == other.is_midp
            and self.atoms.shape == other.atoms.shape
            and bool(np.all(self.atoms == other.atoms))
            and bool(np.all(self.cdf == other.cdf))
        )


@dataclass(frozen=True)
class TestResult:
    """Observed p-value and midP-value of one discrete test plus its null.

    The p-value is always one of ``null.atoms`` (same summation path, so the
    match is bitwise); the midP-value is the p-value minus half the point
    probability of the observed outcome.
    """

    __test__ = False  # keep pytest from collecting this as a test class

    p_value: float
    mid_p: float
    null: NullDistribution = field(repr=False)

    def __post_init__(self):
        j = int(np.searchsorted(self.null.atoms, self.p_value))
        if j >= self.null.n_atoms or self.null.atoms[j] != self.p_value:
            raise ValueError("p_value must be an atom of its null distribution")
        mass = self.null.point_masses[j]
        if abs(self.mid_p - (self.p_value - 0.5 * mass)) > ATOL:
            raise ValueError("mid_p must equal p_value minus half its point mass")


def from_points(atoms, cdf, is_midp: bool = False) -> NullDistribution:
    """Build a NullDistribution from user-supplied (atoms, cdf) pairs.

    Exactness (cdf == atoms) is not required: strictly conservative tests with
    cdf below the atom are accepted with a warning. Anti-conservative inputs
    (cdf above the atom) are rejected, since no valid p-value behaves that way.
    """
    dist = NullDistribution(np.asarray(atoms, float), np.asarray(cdf, float), is_midp)
    if not is_midp:
        if np.any(dist.cdf > dist.atoms + ATOL):
            raise ValueError("cdf exceeds atom value: not a valid p-value distribution")
        if np.any(dist.cdf < dist.atoms - ATOL):
            warnings.warn(
                "cdf below atom value: distribution is conservative, not exact",
                stacklevel=2,
            )
    return dist


def degenerate() -> NullDistribution:
    """The single-atom distribution {1}: a test that can never reject."""
    return NullDistribution(np.array([1.0]), np.array([1.0]))


def cdf_at(dist: NullDistribution, t: float) -> float:
    """Null probability Pr(P <= t): step-function CDF evaluation.

    Returns cdf[j] for the largest atom_j <= t (within tolerance), 0 if t is
    below the smallest atom.
    """
    if t < 0.0 or t > 1.0:
        raise ValueError(f"threshold must be in [0, 1], got {t}")
    j = int(np.searchsorted(dist.atoms, t + ATOL, side="right")) - 1
    if j < 0:
        return 0.0
    return float(dist.cdf[j])


def midp_distribution(dist: NullDistribution) -> NullDistribution:
    """Null distribution of the midP-value.

    Each atom a_j moves to (a_j + a_{j-1})/2 with a_0 = 0; the CDF values
    (point masses) are unchanged. The result's final atom is below 1 and is
    marked so the transformation cannot be applied twice.
    """
    if dist.is_midp:
        raise ValueError("distribution is already on the midP scale")
    shifted = np.concatenate(([0.0], dist.atoms[:-1]))
    return NullDistribution(0.5 * (dist.atoms + shifted), dist.cdf.copy(), is_midp=True)


def min_achievable_significance(dist: NullDistribution) -> float:
    """Smallest attainable p-value of the test (the Tarone screening quantity)."""
    return float(dist.atoms[0])
