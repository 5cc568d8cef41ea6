"""midP FDR upper bound: worked examples and oracle cross-checks."""

import numpy as np
import pytest

from discretefdr import (
    Family,
    HypothesisSpec,
    NullDistribution,
    Procedure,
    degenerate,
    epsilon,
    exact_fdr,
    midfdr_upper_bound,
    midp_distribution,
    tarone_select,
)
from helpers import random_family, random_pvalue_dist, result_at


class TestEpsilon:
    def test_degenerate_below_half(self):
        # the midP atom sits at 0.5, above every threshold kq/m when q < 0.5
        assert epsilon(degenerate(), 0.05, 3) == 0.0

    def test_two_atom_worked_example(self):
        # atoms {0.04, 1}: midP atoms {0.02, 0.52}; with q=0.05, m=2 the
        # thresholds are 0.025 and 0.05, both catching mass 0.04, so the
        # max of 0.04/0.025 and 0.04/0.05 is 1.6 at k=1
        dist = NullDistribution(atoms=np.array([0.04, 1.0]), cdf=np.array([0.04, 1.0]))
        assert epsilon(dist, 0.05, 2) == pytest.approx(1.6, abs=1e-12)

    def test_capped_at_two_on_exact_supports(self):
        rng = np.random.default_rng(41)
        for _ in range(200):
            dist = random_pvalue_dist(rng, exact=True)
            q = float(rng.uniform(0.01, 0.3))
            m = int(rng.integers(1, 12))
            assert epsilon(dist, q, m) <= 2.0 + 1e-12

    def test_accepts_pretransformed_distribution(self):
        dist = NullDistribution(atoms=np.array([0.04, 1.0]), cdf=np.array([0.04, 1.0]))
        assert epsilon(midp_distribution(dist), 0.05, 2) == pytest.approx(1.6)

    def test_validation(self):
        with pytest.raises(ValueError):
            epsilon(degenerate(), 1.5, 2)
        with pytest.raises(ValueError):
            epsilon(degenerate(), 0.05, 0)


class TestUpperBound:
    def test_all_degenerate(self):
        fam = Family(tuple(result_at(degenerate(), 0) for _ in range(4)))
        out = midfdr_upper_bound(fam, 0.05)
        assert out.bound_all == 0.0

    def test_identical_two_atom_nulls(self):
        dist = NullDistribution(atoms=np.array([0.04, 1.0]), cdf=np.array([0.04, 1.0]))
        fam = Family(tuple(result_at(dist, 0) for _ in range(3)))
        out = midfdr_upper_bound(fam, 0.05)
        common = epsilon(dist, 0.05, 3)
        assert out.epsilons == pytest.approx([common] * 3)
        assert out.bound_all == pytest.approx(0.05 * common)

    def test_bound_at_most_2q(self):
        rng = np.random.default_rng(42)
        for _ in range(50):
            fam = random_family(rng)
            q = float(rng.uniform(0.01, 0.3))
            assert midfdr_upper_bound(fam, q).bound_all <= 2 * q + 1e-12

    def test_bound_dominates_oracle_midfdr(self):
        # counterexample pair plus random all-null families
        rng = np.random.default_rng(43)
        d1 = NullDistribution(
            atoms=np.array([0.02, 0.045, 1.0]), cdf=np.array([0.02, 0.045, 1.0])
        )
        d2 = NullDistribution(
            atoms=np.array([0.03, 0.055, 1.0]), cdf=np.array([0.03, 0.055, 1.0])
        )
        batteries = [[d1, d2]]
        for _ in range(25):
            batteries.append(
                [random_pvalue_dist(rng) for _ in range(int(rng.integers(2, 5)))]
            )
        for dists in batteries:
            fam = Family(tuple(result_at(d, 0) for d in dists))
            specs = [HypothesisSpec(null=d, is_true_null=True) for d in dists]
            for q in (0.05, 0.1):
                mid_fdr = exact_fdr(specs, Procedure.MIDP_BH, q=q).fdr
                assert midfdr_upper_bound(fam, q).bound_all >= mid_fdr - 1e-12

    def test_tarone_screened_bound(self):
        small = NullDistribution(
            atoms=np.array([0.001, 1.0]), cdf=np.array([0.001, 1.0])
        )
        fam = Family(
            tuple(result_at(small, 0) for _ in range(3))
            + tuple(result_at(degenerate(), 0) for _ in range(2))
        )
        sel = tarone_select(fam, 0.05)
        out = midfdr_upper_bound(fam, 0.05, selection=sel)
        assert out.m == sel.mK
        assert np.all(out.epsilons[3:] == 0.0)
        want = (0.05 / sel.mK) * sum(
            epsilon(small, 0.05, sel.mK) for _ in range(3)
        )
        assert out.bound_all == pytest.approx(want)

    def test_empty_selection_bound_zero(self):
        fam = Family(tuple(result_at(degenerate(), 0) for _ in range(3)))
        sel = tarone_select(fam, 0.05)
        assert sel.mK == 0
        assert midfdr_upper_bound(fam, 0.05, selection=sel).bound_all == 0.0
