"""Monte-Carlo study of FDR and power on two-group binary data.

Each scenario holds m positions tested with one-sided Fisher's exact tests
on 2x2 tables built from two groups of N subjects. Three kinds of positions
exist: true nulls with success probability 0.01 in both groups, true nulls
with probability 0.10 in both groups, and false nulls with probabilities
0.10 (group 1) versus 0.30 (group 2). The default LESS tail therefore tests
the direction with power. Binary responses are either independent Bernoulli
draws or thresholded equicorrelated Gaussians.

Reproducibility contract: replicate r of a study seeded with s draws from
``numpy.random.default_rng((s, r))``, i.e. a PCG64 generator seeded with the
SeedSequence entropy (s, r). Results are a deterministic ordered fold over
replicate indices, so any parallel execution must preserve that reduction
order. Changing the generator or the substream derivation changes every
estimate and is a breaking change.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass

import numpy as np
from scipy.stats import norm

from .fisher import ContingencyTable, TailDirection, fisher_exact
from .procedures import Family, Procedure, adjust, reject_at_level

NULL_LOW_PROB = 0.01
NULL_HIGH_PROB = 0.10
FALSE_PROBS = (0.10, 0.30)

#: the six procedures compared in the study tables
STUDY_PROCEDURES = (
    Procedure.DBH,
    Procedure.TARONE_MIDP_BH,
    Procedure.BH,
    Procedure.DBL,
    Procedure.TARONE_MIDP_BL,
    Procedure.BL,
)

CSV_HEADER = "scenario_id,procedure,N,m,m0,rho,metric,estimate,se"


@dataclass(frozen=True)
class SimulationConfig:
    m: int
    N: int
    n_null_low: int
    n_null_high: int
    n_false: int
    rho: float = 0.0
    reps: int = 1000
    q: float = 0.05
    seed: int = 0
    tail: TailDirection = TailDirection.LESS
    scenario_id: str = ""

    def __post_init__(self):
        if self.n_null_low < 0 or self.n_null_high < 0 or self.n_false < 0:
            raise ValueError("position counts must be non-negative")
        if self.n_null_low + self.n_null_high + self.n_false != self.m:
            raise ValueError("position counts must sum to m")
        if self.m < 1:
            raise ValueError("m must be at least 1")
        if self.N < 1:
            raise ValueError("N must be at least 1")
        if not 0 <= self.rho < 1:
            raise ValueError("rho must lie in [0, 1)")
        if self.reps < 1:
            raise ValueError("reps must be at least 1")
        if not 0 < self.q < 1:
            raise ValueError("q must be in (0, 1)")
        if not self.scenario_id:
            object.__setattr__(
                self,
                "scenario_id",
                f"m{self.m}-N{self.N}-m0{self.m0}-rho{self.rho:g}",
            )

    @property
    def m0(self) -> int:
        return self.n_null_low + self.n_null_high

    def group_probs(self) -> tuple[np.ndarray, np.ndarray]:
        p1 = np.concatenate(
            [
                np.full(self.n_null_low, NULL_LOW_PROB),
                np.full(self.n_null_high, NULL_HIGH_PROB),
                np.full(self.n_false, FALSE_PROBS[0]),
            ]
        )
        p2 = np.concatenate(
            [
                np.full(self.n_null_low, NULL_LOW_PROB),
                np.full(self.n_null_high, NULL_HIGH_PROB),
                np.full(self.n_false, FALSE_PROBS[1]),
            ]
        )
        return p1, p2

    def truth_labels(self) -> np.ndarray:
        return np.arange(self.m) < self.m0


@dataclass(frozen=True)
class SimulationSummary:
    """Estimated FDR and power (with standard errors) per procedure."""

    config: SimulationConfig
    fdr_mean: dict
    fdr_se: dict
    power_mean: dict
    power_se: dict
    power_defined: bool


def _correlated_counts(rng, N: int, probs: np.ndarray, rho: float) -> np.ndarray:
    """Counts of Y=1 per position from the equicorrelated-Gaussian model.

    One subject's latent vector is X = mu + sqrt(rho) Z0 + sqrt(1-rho) Z with
    a scalar common factor Z0, which realizes unit variances and pairwise
    correlation rho exactly; Y = 1[X < 0] and mu = -Phi^{-1}(p) makes
    P(Y = 1) = p per position.
    """
    mu = -norm.ppf(probs)
    z0 = rng.standard_normal(N)
    z = rng.standard_normal((N, probs.size))
    x = mu[np.newaxis, :] + np.sqrt(rho) * z0[:, np.newaxis] + np.sqrt(1.0 - rho) * z
    return np.sum(x < 0.0, axis=0)


def generate_replicate(config: SimulationConfig, rng) -> tuple[Family, np.ndarray]:
    """Draw one replicate: a Family of Fisher test results plus truth labels.

    Positions with zero pooled successes (or all successes) yield degenerate
    tests with support {1}; they stay in the family and simply never reject.
    """
    p1, p2 = config.group_probs()
    if config.rho == 0.0:
        x11 = rng.binomial(config.N, p1)
        x21 = rng.binomial(config.N, p2)
    else:
        x11 = _correlated_counts(rng, config.N, p1, config.rho)
        x21 = _correlated_counts(rng, config.N, p2, config.rho)
    results = []
    for i in range(config.m):
        table = ContingencyTable(
            int(x11[i]), config.N - int(x11[i]), int(x21[i]), config.N - int(x21[i])
        )
        results.append(fisher_exact(table, config.tail))
    return Family(tuple(results)), config.truth_labels()


def run_study(config: SimulationConfig, procedures=STUDY_PROCEDURES) -> SimulationSummary:
    """Estimate FDR and power of each procedure over config.reps replicates.

    Per replicate and procedure, the false discovery proportion is
    V/max(R,1) and power is the rejected fraction of the false nulls.
    Standard errors are sample standard deviations over replicates divided
    by sqrt(reps). Fully deterministic given config.seed.
    """
    procedures = tuple(procedures)
    reps = config.reps
    fdp = {p: np.empty(reps) for p in procedures}
    tpp = {p: np.empty(reps) for p in procedures}
    for r in range(reps):
        rng = np.random.default_rng((config.seed, r))
        family, is_null = generate_replicate(config, rng)
        for proc in procedures:
            rejected = reject_at_level(adjust(family, proc, q=config.q), config.q)
            r_count = rejected.size
            v_count = int(np.sum(is_null[rejected]))
            fdp[proc][r] = v_count / max(r_count, 1)
            if config.n_false:
                tpp[proc][r] = (r_count - v_count) / config.n_false
            else:
                tpp[proc][r] = 0.0
    sqrt_reps = np.sqrt(reps)
    return SimulationSummary(
        config=config,
        fdr_mean={p: float(fdp[p].mean()) for p in procedures},
        fdr_se={p: float(fdp[p].std(ddof=1) / sqrt_reps) for p in procedures},
        power_mean={p: float(tpp[p].mean()) for p in procedures},
        power_se={p: float(tpp[p].std(ddof=1) / sqrt_reps) for p in procedures},
        power_defined=config.n_false > 0,
    )


def sweep(configs, procedures=STUDY_PROCEDURES) -> list[SimulationSummary]:
    """Run several configs in order and return their summaries."""
    configs = list(configs)
    if not configs:
        raise ValueError("need at least one SimulationConfig")
    return [run_study(cfg, procedures) for cfg in configs]


def write_sweep_csv(summaries, out=sys.stdout) -> None:
    """Long-format CSV, one row per scenario x procedure x metric.

    Floats are written with repr so output is byte-stable and full precision.
    """
    out.write(CSV_HEADER + "\n")
    for s in summaries:
        cfg = s.config
        for proc in s.fdr_mean:
            for metric, est, se in (
                ("fdr", s.fdr_mean[proc], s.fdr_se[proc]),
                ("power", s.power_mean[proc], s.power_se[proc]),
            ):
                out.write(
                    f"{cfg.scenario_id},{proc.value},{cfg.N},{cfg.m},{cfg.m0},"
                    f"{cfg.rho!r},{metric},{est!r},{se!r}\n"
                )
