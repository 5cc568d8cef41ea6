"""Small embedded datasets used by the demo command and the test suite."""

from __future__ import annotations

from importlib.resources import files

import numpy as np

from .fisher import ContingencyTable, TailDirection, fisher_exact
from .nulldist import NullDistribution
from .oracle import HypothesisSpec
from .procedures import Family

#: ten treatment-versus-control adverse-event studies (x11, x12, x21, x22):
#: occurrences and nonoccurrences among treated, then among controls
DEMO_TABLES = (
    ContingencyTable(1, 15, 13, 3),
    ContingencyTable(2, 36, 12, 20),
    ContingencyTable(1, 14, 7, 6),
    ContingencyTable(10, 30, 12, 8),
    ContingencyTable(0, 20, 5, 18),
    ContingencyTable(2, 5, 7, 2),
    ContingencyTable(8, 16, 15, 12),
    ContingencyTable(3, 11, 7, 15),
    ContingencyTable(5, 12, 5, 10),
    ContingencyTable(7, 14, 5, 20),
)


def demo_family(tail: TailDirection = TailDirection.LESS) -> Family:
    """Fisher test results for the ten demo studies."""
    return Family(tuple(fisher_exact(t, tail) for t in DEMO_TABLES))


def counterexample_specs() -> tuple[HypothesisSpec, HypothesisSpec]:
    """Two uniform-on-their-support true nulls where DBH overshoots its level.

    Both distributions satisfy F(a) = a at every atom, yet exact enumeration
    of DBH at q = 0.05 gives FDR 0.050025 > 0.05, showing DBH has no finite
    sample FDR guarantee even under independence.
    """
    d1 = NullDistribution(
        atoms=np.array([0.02, 0.045, 1.0]), cdf=np.array([0.02, 0.045, 1.0])
    )
    d2 = NullDistribution(
        atoms=np.array([0.03, 0.055, 1.0]), cdf=np.array([0.03, 0.055, 1.0])
    )
    return (
        HypothesisSpec(null=d1, is_true_null=True),
        HypothesisSpec(null=d2, is_true_null=True),
    )


def counterexample_spec_path() -> str:
    """Filesystem path of the shipped counterexample spec CSV."""
    return str(files("discretefdr").joinpath("data/counterexample.csv"))
