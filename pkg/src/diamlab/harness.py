"""Monte Carlo harness: replicated point processes and goodness-of-fit.

run_experiment draws R independent replications of a point process, computes
the scaled diameter deficit of each, and returns the empirical CDF.  Each
replication gets its own derived random stream, so results are identical for
any execution order and any worker-thread count.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from diamlab import limits
from diamlab.errors import ConfigurationError
from diamlab.geom import diameter_deficit
from diamlab.limits import (
    ContinuousLaw,
    LimitLaw,
    SegmentsLaw,
    gamma_exponent,
    limit_cdf,
    sigma0_circle_density,
    sigma0_sector,
    sigma0_spherical,
    zeta_tail_constant,
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
    sample_poisson_process,
)

_PROCESSES = ("poisson", "binomial")


def resolve_threads(threads: int | None) -> int:
    """Worker count: explicit value, else DIAMLAB_THREADS, else all cores."""
    if threads is None:
        env = os.environ.get("DIAMLAB_THREADS", "").strip()
        if env:
            try:
                threads = int(env)
            except ValueError as exc:
                raise ConfigurationError(
                    f"DIAMLAB_THREADS={env!r} is not an integer"
                ) from exc
        else:
            threads = os.cpu_count() or 1
    if threads < 1:
        raise ConfigurationError("thread count must be at least 1")
    return threads


@dataclass
class ExperimentConfig:
    """One simulation experiment.

    n is the binomial sample size (integer >= 2) or the Poisson mean
    (positive real); gamma is the normalization exponent of the scaled
    deficit n^(2/gamma) * (2 - diameter).
    """

    spec: DistributionSpec
    n: float
    process: str
    replications: int
    seed: int
    gamma: float

    def __post_init__(self) -> None:
        if self.process not in _PROCESSES:
            raise ConfigurationError(
                f"process must be one of {_PROCESSES}, got {self.process!r}"
            )
        if self.replications < 1:
            raise ConfigurationError("replications must be at least 1")
        if not self.n > 0:
            raise ConfigurationError("n must be positive")
        if self.process == "binomial":
            if float(self.n) != int(self.n) or int(self.n) < 2:
                raise ConfigurationError(
                    "a binomial experiment needs an integer n >= 2"
                )
        if not 0 <= int(self.seed) < 2 ** 64:
            raise ConfigurationError("seed must fit in 64 bits")
        if not self.gamma > 0:
            raise ConfigurationError("gamma must be positive")


@dataclass(eq=False)
class EmpiricalCdf:
    """Sorted scaled-deficit samples with step-CDF evaluation."""

    samples: np.ndarray
    degenerate_count: int = 0

    def __post_init__(self) -> None:
        s = np.asarray(self.samples, dtype=np.float64)
        if s.ndim != 1:
            raise ValueError("samples must be a vector")
        if s.size and np.any(np.diff(s) < 0):
            s = np.sort(s)
        self.samples = s

    @property
    def count(self) -> int:
        return int(self.samples.size)

    def evaluate(self, t):
        """F_hat(t) = (#samples <= t) / count; right-continuous step CDF."""
        if self.count == 0:
            raise ValueError("empty empirical CDF")
        t_arr = np.asarray(t, dtype=np.float64)
        out = np.searchsorted(self.samples, np.atleast_1d(t_arr), side="right")
        out = out / self.count
        return float(out[0]) if t_arr.ndim == 0 else out

    def mean(self) -> float:
        if self.count == 0:
            raise ValueError("empty empirical CDF")
        return float(self.samples.mean())


def _one_replication(config: ExperimentConfig, scale: float, r: int):
    """(replication, points realized, diameter, scaled deficit, degenerate)."""
    rng = RngHandle.for_replication(config.seed, r)
    if config.process == "binomial":
        cloud = sample_binomial_process(config.spec, int(config.n), rng)
    else:
        cloud = sample_poisson_process(config.spec, float(config.n), rng)
    if cloud.n >= 2:
        diam, deficit = diameter_deficit(cloud)
        return r, cloud.n, diam, max(0.0, scale * deficit), False
    # fewer than two points: diameter-0 convention, flagged as degenerate
    diam = 0.0
    return r, cloud.n, diam, 2.0 * scale, True


def replication_records(
    config: ExperimentConfig, threads: int | None = None
) -> list[tuple[int, int, float, float, bool]]:
    """Per-replication tuples (index, n_points, diameter, deficit, degenerate)."""
    workers = resolve_threads(threads)
    scale = float(config.n) ** (2.0 / config.gamma)
    reps = range(config.replications)
    if workers == 1:
        return [_one_replication(config, scale, r) for r in reps]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda r: _one_replication(config, scale, r), reps))


def run_experiment(
    config: ExperimentConfig, threads: int | None = None
) -> EmpiricalCdf:
    """Scaled deficits of all replications, sorted, as an EmpiricalCdf."""
    records = replication_records(config, threads=threads)
    values = np.sort(np.array([rec[3] for rec in records], dtype=np.float64))
    degenerate = sum(1 for rec in records if rec[4])
    if degenerate == config.replications:
        raise ConfigurationError(
            "every replication was degenerate (fewer than two points); "
            "increase n"
        )
    return EmpiricalCdf(values, degenerate_count=degenerate)


def ks_distance(ecdf: EmpiricalCdf, law: LimitLaw) -> float:
    """One-sample Kolmogorov-Smirnov distance between ecdf and the law."""
    n = ecdf.count
    if n == 0:
        raise ValueError("empty empirical CDF")
    f = np.atleast_1d(limit_cdf(law, ecdf.samples))
    i = np.arange(1, n + 1, dtype=np.float64)
    d_plus = float((i / n - f).max())
    d_minus = float((f - (i - 1.0) / n).max())
    return max(d_plus, d_minus, 0.0)


def ks_two_sample(a: EmpiricalCdf, b: EmpiricalCdf) -> float:
    """Two-sample KS distance between empirical CDFs."""
    if a.count == 0 or b.count == 0:
        raise ValueError("empty empirical CDF")
    xs = np.concatenate([a.samples, b.samples])
    fa = np.searchsorted(a.samples, xs, side="right") / a.count
    fb = np.searchsorted(b.samples, xs, side="right") / b.count
    return float(np.abs(fa - fb).max())


def auto_gamma(spec: DistributionSpec) -> float:
    """Normalization exponent gamma implied by the distribution family."""
    if isinstance(spec, UniformBall):
        if spec.d == 1:
            return 2.0  # a single segment
        return gamma_exponent(spec.d, 1.0)
    if isinstance(spec, UniformSphere):
        return gamma_exponent(spec.d, 0.0)
    if isinstance(spec, RadialPower):
        if spec.atom_at_boundary > 0.0:
            return gamma_exponent(spec.d, 0.0)
        return gamma_exponent(spec.d, spec.alpha)
    if isinstance(spec, Sector):
        return auto_gamma(spec.base)
    if isinstance(spec, SegmentMixture):
        return 2.0
    if isinstance(spec, CircleDensity):
        return 0.5
    raise TypeError(f"unknown distribution spec {spec!r}")


def auto_limit_law(spec: DistributionSpec) -> LimitLaw | None:
    """The limiting law of the scaled deficit for spec, or None if degenerate."""
    if isinstance(spec, UniformBall):
        if spec.d == 1:
            return SegmentsLaw(np.array([1.0]))
        return ContinuousLaw(
            gamma_exponent(spec.d, 1.0), sigma0_spherical(spec.d, 1.0, float(spec.d))
        )
    if isinstance(spec, UniformSphere):
        return ContinuousLaw(
            gamma_exponent(spec.d, 0.0), zeta_tail_constant(spec.d)
        )
    if isinstance(spec, RadialPower):
        if spec.atom_at_boundary > 0.0:
            return ContinuousLaw(
                gamma_exponent(spec.d, 0.0),
                sigma0_spherical(
                    spec.d, 0.0, spec.atom_at_boundary, boundary_atom=True
                ),
            )
        return ContinuousLaw(
            gamma_exponent(spec.d, spec.alpha),
            sigma0_spherical(spec.d, spec.alpha, 1.0),
        )
    if isinstance(spec, Sector):
        base = spec.base
        d = base.d
        if isinstance(base, UniformBall):
            alpha, a, atom = 1.0, float(d), False
        elif isinstance(base, UniformSphere):
            alpha, a, atom = 0.0, 1.0, True
        elif base.atom_at_boundary > 0.0:
            alpha, a, atom = 0.0, base.atom_at_boundary, True
        else:
            alpha, a, atom = base.alpha, 1.0, False
        return ContinuousLaw(
            auto_gamma(spec),
            sigma0_sector(d, alpha, a, spec.cap_angle, boundary_atom=atom),
        )
    if isinstance(spec, SegmentMixture):
        return SegmentsLaw(spec.probs.copy())
    if isinstance(spec, CircleDensity):
        sigma0 = sigma0_circle_density(spec.density)
        if sigma0 <= 0.0:
            return None  # opposite arcs never both carry mass
        return ContinuousLaw(0.5, sigma0)
    raise TypeError(f"unknown distribution spec {spec!r}")


def convergence_table(
    config: ExperimentConfig,
    n_list: Sequence[float],
    threads: int | None = None,
) -> list[tuple[float, float]]:
    """KS distance to the family's limit law for each n in increasing n_list."""
    if len(n_list) < 2:
        raise ConfigurationError("n_list needs at least two entries")
    if any(b <= a for a, b in zip(n_list, n_list[1:])):
        raise ConfigurationError("n_list must be strictly increasing")
    law = auto_limit_law(config.spec)
    if law is None:
        raise ConfigurationError("no limit law exists for this distribution")
    out = []
    for n in n_list:
        ecdf = run_experiment(replace(config, n=n), threads=threads)
        out.append((float(n), ks_distance(ecdf, law)))
    return out


def depoissonisation_compare(
    spec: DistributionSpec,
    n: float,
    gamma: float,
    replications: int,
    seed: int,
    threads: int | None = None,
) -> tuple[float, float, float]:
    """(KS poisson vs law, KS binomial vs law, two-sample KS poisson/binomial).

    The two processes run on independent streams derived from the seed.
    """
    if not n >= 2:
        raise ConfigurationError("n must be at least 2")
    law = auto_limit_law(spec)
    if law is None:
        raise ConfigurationError("no limit law exists for this distribution")
    seed_p, seed_b = (
        int(s) for s in np.random.SeedSequence(int(seed)).generate_state(2, np.uint64)
    )
    ecdf_p = run_experiment(
        ExperimentConfig(spec, float(n), "poisson", replications, seed_p, gamma),
        threads=threads,
    )
    ecdf_b = run_experiment(
        ExperimentConfig(spec, int(n), "binomial", replications, seed_b, gamma),
        threads=threads,
    )
    return (
        ks_distance(ecdf_p, law),
        ks_distance(ecdf_b, law),
        ks_two_sample(ecdf_p, ecdf_b),
    )


def segment_range_cdf(t, n: int):
    """Exact CDF of n * (2 - range) for n i.i.d. uniform points on [-1, 1].

    The finite-n reference for the single-segment family: with
    u = 1 - t/(2n), P = 1 - n u^(n-1) (1 - u) - u^n for t in [0, 2n].
    """
    if n < 2:
        raise ValueError("the range needs at least two points")
    t_arr = np.asarray(t, dtype=np.float64)
    if np.any(t_arr < 0):
        raise ValueError("t must be >= 0")
    scalar = t_arr.ndim == 0
    x = np.clip(np.atleast_1d(t_arr) / (2.0 * n), 0.0, 1.0)
    with np.errstate(divide="ignore"):
        log_u = np.log1p(-x)  # -inf at x = 1 is fine: u^(n-1) becomes 0
    u_pow_n1 = np.exp((n - 1) * log_u)  # u^(n-1)
    out = 1.0 - n * u_pow_n1 * x - u_pow_n1 * np.exp(log_u)
    out = np.clip(out, 0.0, 1.0)
    return float(out[0]) if scalar else out
