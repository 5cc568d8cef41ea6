"""Exact FDR and power by brute-force enumeration of joint outcomes.

For small independent families the distribution of any rejection-set
functional can be computed exactly: every hypothesis takes one of finitely
many p-values, so the joint outcome space is the Cartesian product of the
per-hypothesis supports. This module walks that product, runs a procedure on
each joint outcome, and accumulates the exact expectation of V/max(R,1) and
of the rejected fraction of false nulls, weighting each outcome by its
product probability.

This is the verification engine for the FDR-control propositions and the
step-up counterexample; everything else in the package can be checked
against it on enumerable instances.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .nulldist import NullDistribution, TestResult
from .procedures import Family, Procedure, adjust, reject_at_level

DEFAULT_OUTCOME_CAP = 10_000_000


class OutcomeCapExceeded(RuntimeError):
    """Raised when the joint outcome space is too large to enumerate."""

    def __init__(self, count: int, cap: int):
        super().__init__(
            f"joint outcome count {count} exceeds the enumeration cap {cap}"
        )
        self.count = count
        self.cap = cap


@dataclass(frozen=True)
class HypothesisSpec:
    """One hypothesis for enumeration.

    ``null`` is the distribution the p-value is actually generated from.
    Procedures never see it directly: they consume ``model``, the test's
    nominal null distribution, which defaults to the generating one. A false
    null is specified by a generating distribution supported on the model's
    atom grid, so the enumerated p-values remain attainable test outcomes.
    """

    null: NullDistribution
    is_true_null: bool = True
    model: NullDistribution | None = None

    def __post_init__(self):
        if self.model is None:
            object.__setattr__(self, "model", self.null)
        elif self.is_true_null:
            if self.model != self.null:
                raise ValueError(
                    "a true null generates p-values from its own model; "
                    "omit `model` or pass a false null"
                )
        else:
            pos = np.searchsorted(self.model.atoms, self.null.atoms)
            if np.any(pos >= self.model.n_atoms) or np.any(
                self.model.atoms[np.minimum(pos, self.model.n_atoms - 1)]
                != self.null.atoms
            ):
                raise ValueError(
                    "generating atoms must be a subset of the model's atom grid"
                )


@dataclass(frozen=True)
class OracleResult:
    fdr: float
    power: float
    outcome_count: int


def _kahan_add(total: float, comp: float, v: float) -> tuple[float, float]:
    y = v - comp
    t = total + y
    comp = (t - total) - y
    return t, comp


def exact_fdr(
    specs,
    procedure: Procedure,
    q: float,
    c: float = 1.0,
    outcome_cap: int = DEFAULT_OUTCOME_CAP,
) -> OracleResult:
    """Exact FDR (and power) of a procedure on independent hypotheses.

    Enumerates hypotheses' atoms in index order (an odometer with the last
    index moving fastest), multiplies outcome weights left-to-right, and
    accumulates both expectations with compensated summation.

    Raises OutcomeCapExceeded instead of attempting an enumeration larger
    than ``outcome_cap`` joint outcomes.
    """
    specs = list(specs)
    if len(specs) == 0:
        raise ValueError("need at least one HypothesisSpec")
    if not 0 < q < 1:
        raise ValueError("q must be in (0, 1)")

    is_null = np.array([s.is_true_null for s in specs])
    n_false = int(np.sum(~is_null))

    # per hypothesis: the TestResult and generating mass of each atom
    # outcome; atoms the generating distribution never produces are dropped
    per_hyp = []
    for s in specs:
        masses = s.null.point_masses
        model_masses = s.model.point_masses
        outcomes = []
        for j in range(s.null.n_atoms):
            if masses[j] == 0.0:
                continue
            p = float(s.null.atoms[j])
            jm = int(np.searchsorted(s.model.atoms, p))
            mid = p - 0.5 * float(model_masses[jm])
            result = TestResult(p_value=p, mid_p=mid, null=s.model)
            outcomes.append((result, float(masses[j])))
        per_hyp.append(outcomes)

    count = math.prod(len(o) for o in per_hyp)
    if count > outcome_cap:
        raise OutcomeCapExceeded(count, outcome_cap)

    fdr_sum, fdr_comp = 0.0, 0.0
    pow_sum, pow_comp = 0.0, 0.0
    for combo in itertools.product(*per_hyp):
        weight = 1.0
        for _, mass in combo:
            weight *= mass
        family = Family(tuple(r for r, _ in combo))
        rejected = reject_at_level(adjust(family, procedure, q=q, c=c), q)
        r_count = rejected.size
        v_count = int(np.sum(is_null[rejected]))
        fdr_sum, fdr_comp = _kahan_add(
            fdr_sum, fdr_comp, weight * v_count / max(r_count, 1)
        )
        if n_false:
            t_count = r_count - v_count
            pow_sum, pow_comp = _kahan_add(
                pow_sum, pow_comp, weight * t_count / n_false
            )
    return OracleResult(fdr=fdr_sum, power=pow_sum, outcome_count=count)
