"""Shared fixtures-in-code for the test suite.

Holds the ten-study reference values, generators for random discrete
families (Fisher-based and synthetic), and the explicit step-down walk used
to cross-check adjusted-p-value implementations against critical values.
"""

import numpy as np

from discretefdr import (
    ATOL,
    ContingencyTable,
    Family,
    HypothesisSpec,
    NullDistribution,
    TailDirection,
    TestResult,
    fisher_exact,
)

# the ten 2x2 studies with their one-sided p-values and midP-values
# (3-decimal reference values)
TABLE1_ROWS = [
    ((1, 15, 13, 3), 0.000, 0.000),
    ((2, 36, 12, 20), 0.001, 0.000),
    ((1, 14, 7, 6), 0.009, 0.005),
    ((10, 30, 12, 8), 0.009, 0.006),
    ((0, 20, 5, 18), 0.035, 0.017),
    ((2, 5, 7, 2), 0.072, 0.039),
    ((8, 16, 15, 12), 0.095, 0.062),
    ((3, 11, 7, 15), 0.389, 0.267),
    ((5, 12, 5, 10), 0.555, 0.411),
    ((7, 14, 5, 20), 0.914, 0.834),
]

# adjusted p-values for the ten studies, one column per procedure
# (3-decimal reference values)
TABLE2_COLS = {
    "bh": [0.000, 0.004, 0.023, 0.023, 0.070, 0.119, 0.135, 0.486, 0.617, 0.914],
    "midp-bh": [0.000, 0.002, 0.014, 0.014, 0.035, 0.064, 0.089, 0.333, 0.457, 0.834],
    "dbh": [0.000, 0.001, 0.012, 0.012, 0.038, 0.062, 0.082, 0.351, 0.442, 0.846],
    "bl": [0.000, 0.007, 0.054, 0.054, 0.115, 0.155, 0.155, 0.231, 0.231, 0.231],
    "midp-bl": [0.000, 0.004, 0.029, 0.029, 0.060, 0.089, 0.091, 0.182, 0.182, 0.182],
    "dbl": [0.000, 0.002, 0.023, 0.023, 0.077, 0.078, 0.107, 0.200, 0.200, 0.200],
}


def demo_tables():
    return [ContingencyTable(*row) for row, _, _ in TABLE1_ROWS]


def result_at(dist: NullDistribution, k: int) -> TestResult:
    """TestResult observing the k-th atom of dist."""
    p = float(dist.atoms[k])
    mid = p - 0.5 * float(dist.point_masses[k])
    return TestResult(p_value=p, mid_p=mid, null=dist)


def random_pvalue_dist(rng, min_atoms=2, max_atoms=4, exact=None) -> NullDistribution:
    """A random valid discrete p-value distribution (cdf <= atoms).

    With exact=True the cdf equals the atoms (an exact test); with
    exact=None that choice is itself randomized.
    """
    n = int(rng.integers(min_atoms, max_atoms + 1))
    atoms = np.sort(rng.uniform(0.005, 0.995, size=n - 1))
    atoms = np.unique(np.concatenate([atoms, [1.0]]))
    while atoms.size < n:
        extra = rng.uniform(0.005, 0.995)
        atoms = np.unique(np.concatenate([atoms, [extra]]))
    if exact is None:
        exact = bool(rng.integers(0, 2))
    if exact:
        cdf = atoms.copy()
    else:
        u = np.sort(rng.uniform(0.2, 1.0, size=atoms.size))
        u[-1] = 1.0
        cdf = atoms * u
    return NullDistribution(atoms=atoms, cdf=cdf)


def random_fisher_result(rng, max_n=12) -> TestResult:
    n1 = int(rng.integers(1, max_n + 1))
    n2 = int(rng.integers(1, max_n + 1))
    s = int(rng.integers(0, n1 + n2 + 1))
    x11 = int(rng.integers(max(0, s - n2), min(n1, s) + 1))
    table = ContingencyTable(x11, n1 - x11, s - x11, n2 - (s - x11))
    return fisher_exact(table, TailDirection.LESS)


def random_fisher_family(rng, m=None, max_n=12) -> Family:
    if m is None:
        m = int(rng.integers(2, 9))
    return Family(tuple(random_fisher_result(rng, max_n) for _ in range(m)))


def random_family(rng, m=None, distinct_p=False) -> Family:
    """Family over random synthetic distributions, observed atoms sampled
    from the null masses. distinct_p retries until observed p-values are
    unique (procedures break ties by input order, so permutation tests
    need tie-free families)."""
    if m is None:
        m = int(rng.integers(2, 9))
    while True:
        results = []
        for _ in range(m):
            dist = random_pvalue_dist(rng)
            masses = dist.point_masses / dist.point_masses.sum()
            k = int(rng.choice(dist.n_atoms, p=masses))
            results.append(result_at(dist, k))
        if not distinct_p:
            break
        ps = [r.p_value for r in results]
        if len(set(ps)) == m:
            break
    return Family(tuple(results))


def random_true_null_spec(rng, min_atoms=2, max_atoms=4) -> HypothesisSpec:
    dist = random_pvalue_dist(rng, min_atoms, max_atoms)
    return HypothesisSpec(null=dist, is_true_null=True)


def random_false_null_spec(rng, min_atoms=2, max_atoms=4) -> HypothesisSpec:
    """False null: generating distribution skews mass toward small atoms of
    the model grid, mimicking an alternative with power."""
    model = random_pvalue_dist(rng, min_atoms, max_atoms)
    n = model.n_atoms
    raw = rng.uniform(0.5, 1.0, size=n) * np.linspace(2.0, 0.1, n)
    masses = raw / raw.sum()
    gen_cdf = np.cumsum(masses)
    gen_cdf[-1] = 1.0
    generating = NullDistribution(atoms=model.atoms, cdf=gen_cdf)
    return HypothesisSpec(null=generating, is_true_null=False, model=model)


def step_down_count(sorted_p: np.ndarray, crit: np.ndarray) -> int:
    """Number rejected by the step-down walk: the longest prefix on which
    every sorted p-value clears its critical value."""
    count = 0
    for i in range(sorted_p.size):
        if sorted_p[i] <= crit[i] + ATOL:
            count = i + 1
        else:
            break
    return count
