"""Self-check suites: kernel equivalence and the exact finite-n reference.

Used by the command line's oracle subcommand and by the acceptance tests.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from diamlab.geom import diameter_bruteforce, diameter_pruned
from diamlab.harness import (
    EmpiricalCdf,
    ExperimentConfig,
    run_experiment,
    segment_range_cdf,
)
from diamlab.sampler import (
    CircleDensity,
    DistributionSpec,
    RadialPower,
    RngHandle,
    Sector,
    SegmentMixture,
    UniformBall,
    UniformSphere,
    sample_binomial_process,
)

_DIMS = (2, 3, 5)
# 99% two-sided band for the Kolmogorov statistic, sqrt(R) * D_R
_KOLMOGOROV_99 = 1.63


@dataclass(frozen=True)
class OracleReport:
    """Outcome of one check suite."""

    name: str
    cases: int
    passed: int

    @property
    def failed(self) -> int:
        return self.cases - self.passed

    @property
    def ok(self) -> bool:
        return self.failed == 0


def random_instance_spec(rng: np.random.Generator, index: int) -> DistributionSpec:
    """A deterministic-given-rng distribution spec cycling over all families."""
    d = _DIMS[index % len(_DIMS)]
    family = index % 6
    if family == 0:
        return UniformBall(d=d)
    if family == 1:
        return UniformSphere(d=d)
    if family == 2:
        if rng.random() < 0.5:
            return RadialPower(d=d, alpha=float(rng.uniform(0.3, 3.0)))
        return RadialPower(
            d=d, alpha=0.0, atom_at_boundary=float(rng.uniform(0.2, 1.0))
        )
    if family == 3:
        center = rng.standard_normal(d)
        base: DistributionSpec = (
            UniformBall(d=d) if rng.random() < 0.5 else UniformSphere(d=d)
        )
        return Sector(
            base=base,
            cap_center=center,
            cap_angle=float(rng.uniform(0.15, math.pi)),
        )
    if family == 4:
        m = int(rng.integers(1, 5))
        dirs = rng.standard_normal((m, d))
        w = -np.log(rng.random(m))  # uniform over the probability simplex
        return SegmentMixture(directions=dirs, probs=w / w.sum())
    if rng.random() < 0.5:
        return CircleDensity.uniform()
    return CircleDensity.cosine_mix(
        amplitudes=[float(rng.uniform(-0.9, 0.9))],
        phases=[float(rng.uniform(0.0, 2.0 * math.pi))],
    )


def diameter_equivalence_suite(cases: int, seed: int) -> OracleReport:
    """Pruned vs brute-force diameter on random instances; must match exactly.

    Instances span all families, dimensions 2/3/5, and sizes 1..2000.
    """
    if cases < 1:
        raise ValueError("cases must be at least 1")
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(int(seed))))
    passed = 0
    for k in range(cases):
        spec = random_instance_spec(rng, k)
        # log-uniform size in [1, 2000]
        n = int(round(math.exp(rng.uniform(0.0, math.log(2000.0)))))
        cloud = sample_binomial_process(
            spec, n, RngHandle(int(rng.integers(2 ** 63)))
        )
        a = diameter_bruteforce(cloud)
        b = diameter_pruned(cloud)
        if a == b and math.isfinite(a):
            passed += 1
    return OracleReport("diameter_pruned_vs_bruteforce", cases, passed)


def segment_exact_cdf_suite(
    n: int = 2000,
    replications: int = 2000,
    seed: int = 7,
    threads: int | None = None,
) -> tuple[OracleReport, float, float]:
    """Single-segment experiment against the exact finite-n range CDF.

    Passes when the empirical CDF stays within the 99% Kolmogorov band
    1.63/sqrt(R) of segment_range_cdf.  Returns (report, statistic, band).
    """
    spec = SegmentMixture(directions=np.array([[1.0, 0.0]]), probs=np.array([1.0]))
    config = ExperimentConfig(
        spec=spec,
        n=n,
        process="binomial",
        replications=replications,
        seed=seed,
        gamma=2.0,
    )
    ecdf = run_experiment(config, threads=threads)
    stat = _ks_against_exact(ecdf, n)
    band = _KOLMOGOROV_99 / math.sqrt(replications)
    report = OracleReport("segment_range_exact_cdf", 1, 1 if stat < band else 0)
    return report, stat, band


def _ks_against_exact(ecdf: EmpiricalCdf, n: int) -> float:
    f = np.atleast_1d(segment_range_cdf(ecdf.samples, n))
    i = np.arange(1, ecdf.count + 1, dtype=np.float64)
    d_plus = float((i / ecdf.count - f).max())
    d_minus = float((f - (i - 1.0) / ecdf.count).max())
    return max(d_plus, d_minus, 0.0)
