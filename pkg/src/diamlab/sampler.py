"""Point samplers for every distribution family on the unit ball.

Each family is a small dataclass; sample_point / sample_binomial_process /
sample_poisson_process draw from any of them through one vectorized core.
Randomness flows through RngHandle, a seeded PCG64 stream whose
per-replication children are derived with spawn keys so that replications
can run in any order or in parallel without changing the result.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Union

import numpy as np

from diamlab import limits
from diamlab.errors import ConfigurationError, NumericalError
from diamlab.geom import Point, PointCloud

# Rejection samplers give up below this acceptance probability.
_MIN_ACCEPTANCE = 1e-6
_MAX_REJECTION_ROUNDS = 10_000
# Quadrature nodes for the construction-time unit-mass check of a density.
_DENSITY_CHECK_NODES = 4096

__all__ = [
    "RngHandle",
    "UniformBall",
    "UniformSphere",
    "RadialPower",
    "Sector",
    "SegmentMixture",
    "CircleDensity",
    "DistributionSpec",
    "dimension",
    "sample_point",
    "sample_binomial_process",
    "sample_poisson_process",
    "spec_from_json",
    "spec_to_json",
]


class RngHandle:
    """Deterministic random stream identified by a 64-bit seed.

    The same seed yields the same sample sequence on every run.  Children for
    replication r are split off with for_replication(seed, r) and are
    statistically independent of each other.
    """

    def __init__(self, seed: int | np.random.SeedSequence):
        if isinstance(seed, np.random.SeedSequence):
            self.seed_sequence = seed
        else:
            self.seed_sequence = np.random.SeedSequence(int(seed))
        self.generator = np.random.Generator(np.random.PCG64(self.seed_sequence))

    @classmethod
    def for_replication(cls, master_seed: int, replication: int) -> "RngHandle":
        return cls(
            np.random.SeedSequence(int(master_seed), spawn_key=(int(replication),))
        )


# ---------------------------------------------------------------------------
# distribution specs


@dataclass(frozen=True)
class UniformBall:
    """Uniform distribution on the d-dimensional unit ball."""

    d: int

    def __post_init__(self) -> None:
        if self.d < 1:
            raise ConfigurationError("dimension must be at least 1")


@dataclass(frozen=True)
class UniformSphere:
    """Uniform distribution on the unit sphere S^(d-1)."""

    d: int

    def __post_init__(self) -> None:
        if self.d < 2:
            raise ConfigurationError("dimension must be at least 2")


@dataclass(frozen=True)
class RadialPower:
    """Spherically symmetric law with radial deficit CDF F(s) = s^alpha.

    The deficit is eta = 1 - |x|.  With atom_at_boundary = a > 0 the point
    lands exactly on the sphere with probability a and the remaining mass
    spreads the deficit uniformly over (0, 1]; alpha only shapes the
    atom-free case.
    """

    d: int
    alpha: float
    atom_at_boundary: float = 0.0

    def __post_init__(self) -> None:
        if self.d < 2:
            raise ConfigurationError("dimension must be at least 2")
        if not 0.0 <= self.atom_at_boundary <= 1.0:
            raise ConfigurationError("atom_at_boundary must lie in [0, 1]")
        if self.atom_at_boundary == 0.0 and not self.alpha > 0.0:
            raise ConfigurationError(
                "alpha must be positive when atom_at_boundary is 0"
            )
        if self.alpha < 0.0:
            raise ConfigurationError("alpha must be nonnegative")


@dataclass(frozen=True, eq=False)
class Sector:
    """A spherically symmetric base law conditioned on a symmetric double cone.

    The support is {t*x : x in A or -A, t in [0, 1]} where A is the spherical
    cap of half-angle cap_angle around cap_center.
    """

    base: Union[UniformBall, UniformSphere, RadialPower]
    cap_center: np.ndarray
    cap_angle: float

    def __post_init__(self) -> None:
        if not isinstance(self.base, (UniformBall, UniformSphere, RadialPower)):
            raise ConfigurationError(
                "sector base must be a spherically symmetric family"
            )
        c = np.asarray(self.cap_center, dtype=np.float64)
        if c.ndim != 1 or c.size != dimension(self.base):
            raise ConfigurationError("cap_center dimension must match the base")
        norm = float(np.sqrt((c * c).sum()))
        if not norm > 0:
            raise ConfigurationError("cap_center must be a nonzero vector")
        object.__setattr__(self, "cap_center", c / norm)
        if not 0.0 < self.cap_angle <= math.pi:
            raise ConfigurationError("cap_angle must lie in (0, pi]")
        if self.acceptance_probability() < _MIN_ACCEPTANCE:
            raise ConfigurationError("sector too thin for rejection sampling")

    def acceptance_probability(self) -> float:
        """Probability that a base sample falls in the double cone."""
        frac = limits.spherical_cap_fraction(dimension(self.base), self.cap_angle)
        return min(1.0, 2.0 * frac)


@dataclass(frozen=True, eq=False)
class SegmentMixture:
    """Mixture of uniform laws on segments [-x_i, x_i] through the origin."""

    directions: np.ndarray  # (m, d), rows normalized to unit length
    probs: np.ndarray  # (m,), nonnegative, sums to 1

    def __post_init__(self) -> None:
        dirs = np.asarray(self.directions, dtype=np.float64)
        if dirs.ndim != 2 or dirs.shape[0] < 1:
            raise ConfigurationError("directions must be a nonempty (m, d) array")
        norms = np.sqrt((dirs * dirs).sum(axis=1))
        if np.any(norms == 0):
            raise ConfigurationError("segment directions must be nonzero")
        object.__setattr__(self, "directions", dirs / norms[:, None])
        p = np.asarray(self.probs, dtype=np.float64)
        if p.shape != (dirs.shape[0],):
            raise ConfigurationError("need one probability per direction")
        if np.any(p < 0):
            raise ConfigurationError("probabilities must be nonnegative")
        if abs(float(p.sum()) - 1.0) > 1e-12:
            raise ConfigurationError("probabilities must sum to 1")
        object.__setattr__(self, "probs", p)


@dataclass(frozen=True, eq=False)
class CircleDensity:
    """Law on the unit circle in R^2 with angle density f on [0, 2pi).

    density is a vectorized 2pi-periodic callable; sup_bound is any upper
    bound of f used as the rejection envelope.  kind/params keep the JSON
    description when the spec was built from one.
    """

    density: Callable[[np.ndarray], np.ndarray]
    sup_bound: float
    kind: str = "custom"
    params: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not self.sup_bound > 0:
            raise ConfigurationError("sup_bound must be positive")
        u = np.linspace(
            0.0, 2.0 * math.pi, _DENSITY_CHECK_NODES, endpoint=False
        )
        f = np.asarray(self.density(u), dtype=np.float64)
        if np.any(f < 0):
            raise ConfigurationError("density is negative on [0, 2pi)")
        if np.any(f > self.sup_bound * (1.0 + 1e-12)):
            raise ConfigurationError("sup_bound does not dominate the density")
        total = float(f.mean() * 2.0 * math.pi)
        if abs(total - 1.0) > 1e-8:
            raise ConfigurationError(
                f"density integrates to {total!r}, not 1, over [0, 2pi)"
            )

    @classmethod
    def uniform(cls) -> "CircleDensity":
        const = 1.0 / (2.0 * math.pi)
        return cls(
            density=lambda u: np.full_like(np.asarray(u, dtype=np.float64), const),
            sup_bound=const,
            kind="uniform",
            params={},
        )

    @classmethod
    def cosine_mix(
        cls, amplitudes: list[float], phases: list[float] | None = None
    ) -> "CircleDensity":
        """f(u) = (1 + sum_j a_j cos(j*u + phi_j)) / (2pi), j = 1..len(a)."""
        a = np.asarray(amplitudes, dtype=np.float64)
        phi = (
            np.zeros_like(a)
            if phases is None
            else np.asarray(phases, dtype=np.float64)
        )
        if a.ndim != 1 or phi.shape != a.shape:
            raise ConfigurationError("need one phase per amplitude")
        j = np.arange(1, a.size + 1, dtype=np.float64)

        def f(u):
            u = np.asarray(u, dtype=np.float64)
            mix = 1.0 + (a * np.cos(np.outer(u, j) + phi)).sum(axis=-1)
            return mix / (2.0 * math.pi)

        return cls(
            density=f,
            sup_bound=float(1.0 + np.abs(a).sum()) / (2.0 * math.pi),
            kind="cosine_mix",
            params={"amplitudes": list(map(float, a)), "phases": list(map(float, phi))},
        )


DistributionSpec = Union[
    UniformBall, UniformSphere, RadialPower, Sector, SegmentMixture, CircleDensity
]


def dimension(spec: DistributionSpec) -> int:
    """Ambient dimension of the family's support."""
    if isinstance(spec, (UniformBall, UniformSphere, RadialPower)):
        return spec.d
    if isinstance(spec, Sector):
        return dimension(spec.base)
    if isinstance(spec, SegmentMixture):
        return int(spec.directions.shape[1])
    if isinstance(spec, CircleDensity):
        return 2
    raise TypeError(f"unknown distribution spec {spec!r}")


# ---------------------------------------------------------------------------
# sampling core


def _uniform_directions(d: int, count: int, rng: RngHandle) -> np.ndarray:
    g = rng.generator.standard_normal((count, d))
    norms = np.sqrt((g * g).sum(axis=1))
    return g / norms[:, None]


def _sample_coords(spec: DistributionSpec, count: int, rng: RngHandle) -> np.ndarray:
    """count i.i.d. points from spec as a (count, d) array."""
    if count == 0:
        return np.empty((0, dimension(spec)), dtype=np.float64)

    if isinstance(spec, UniformBall):
        u = _uniform_directions(spec.d, count, rng)
        r = rng.generator.random(count) ** (1.0 / spec.d)
        return u * r[:, None]

    if isinstance(spec, UniformSphere):
        return _uniform_directions(spec.d, count, rng)

    if isinstance(spec, RadialPower):
        u = _uniform_directions(spec.d, count, rng)
        a = spec.atom_at_boundary
        if a > 0.0:
            eta = np.where(
                rng.generator.random(count) < a, 0.0, rng.generator.random(count)
            )
        else:
            eta = rng.generator.random(count) ** (1.0 / spec.alpha)
        return u * (1.0 - eta)[:, None]

    if isinstance(spec, Sector):
        cos_cap = math.cos(spec.cap_angle)
        acc = spec.acceptance_probability()
        out = np.empty((count, dimension(spec)), dtype=np.float64)
        have = 0
        for _ in range(_MAX_REJECTION_ROUNDS):
            need = count - have
            batch = min(max(64, int(need / acc * 1.2)), 4_000_000)
            cand = _sample_coords(spec.base, batch, rng)
            norms = np.sqrt((cand * cand).sum(axis=1))
            proj = cand @ spec.cap_center
            with np.errstate(invalid="ignore", divide="ignore"):
                cos_angle = np.where(norms > 0.0, np.abs(proj) / norms, 1.0)
            ok = cand[cos_angle >= cos_cap]
            take = min(need, ok.shape[0])
            out[have : have + take] = ok[:take]
            have += take
            if have == count:
                return out
        raise NumericalError("sector rejection sampling failed to fill the batch")

    if isinstance(spec, SegmentMixture):
        idx = rng.generator.choice(
            spec.probs.size, size=count, p=spec.probs, replace=True
        )
        t = rng.generator.uniform(-1.0, 1.0, count)
        return spec.directions[idx] * t[:, None]

    if isinstance(spec, CircleDensity):
        out = np.empty((count, 2), dtype=np.float64)
        have = 0
        mean_acc = 1.0 / (2.0 * math.pi * spec.sup_bound)
        for _ in range(_MAX_REJECTION_ROUNDS):
            need = count - have
            batch = min(max(64, int(need / mean_acc * 1.2)), 4_000_000)
            u = rng.generator.uniform(0.0, 2.0 * math.pi, batch)
            h = rng.generator.uniform(0.0, spec.sup_bound, batch)
            keep = u[h < np.asarray(spec.density(u), dtype=np.float64)]
            take = min(need, keep.size)
            out[have : have + take, 0] = np.cos(keep[:take])
            out[have : have + take, 1] = np.sin(keep[:take])
            have += take
            if have == count:
                return out
        raise NumericalError("circle rejection sampling failed to fill the batch")

    raise TypeError(f"unknown distribution spec {spec!r}")


def _as_cloud(coords: np.ndarray) -> PointCloud:
    cloud = PointCloud(coords)
    if cloud.n and float(cloud.norms.max()) > 1.0 + 1e-9:
        raise NumericalError("sampled a point outside the unit ball")
    return cloud


def sample_point(spec: DistributionSpec, rng: RngHandle) -> Point:
    """One point distributed according to spec."""
    return Point(_sample_coords(spec, 1, rng)[0])


def sample_binomial_process(
    spec: DistributionSpec, n: int, rng: RngHandle
) -> PointCloud:
    """Exactly n i.i.d. points from spec."""
    if n < 1:
        raise ConfigurationError("a binomial process needs n >= 1")
    return _as_cloud(_sample_coords(spec, int(n), rng))


def sample_poisson_process(
    spec: DistributionSpec, n_mean: float, rng: RngHandle
) -> PointCloud:
    """N ~ Poisson(n_mean) i.i.d. points; the empty cloud is a legal result."""
    if not n_mean > 0:
        raise ConfigurationError("a Poisson process needs a positive mean")
    n = int(rng.generator.poisson(n_mean))
    return _as_cloud(_sample_coords(spec, n, rng))


# ---------------------------------------------------------------------------
# JSON construction

_FAMILY_NAMES = {
    UniformBall: "uniform-ball",
    UniformSphere: "uniform-sphere",
    RadialPower: "radial-power",
    Sector: "sector",
    SegmentMixture: "segments",
    CircleDensity: "circle-density",
}


def spec_from_json(obj: dict) -> DistributionSpec:
    """Build a DistributionSpec from its JSON object form.

    Fields: family, d, alpha, atom, cap_center, cap_angle, directions, probs,
    density = {kind: "uniform" | "cosine_mix", params}.  A sector's base is
    radial-power when alpha/atom are present, else the uniform ball.
    """
    if not isinstance(obj, dict):
        raise ConfigurationError("distribution JSON must be an object")
    family = obj.get("family")
    if family == "uniform-ball":
        return UniformBall(d=_req_int(obj, "d"))
    if family == "uniform-sphere":
        return UniformSphere(d=_req_int(obj, "d"))
    if family == "radial-power":
        return RadialPower(
            d=_req_int(obj, "d"),
            alpha=float(obj.get("alpha", 1.0)),
            atom_at_boundary=float(obj.get("atom", 0.0)),
        )
    if family == "sector":
        d = _req_int(obj, "d")
        if "alpha" in obj or "atom" in obj:
            base: DistributionSpec = RadialPower(
                d=d,
                alpha=float(obj.get("alpha", 1.0)),
                atom_at_boundary=float(obj.get("atom", 0.0)),
            )
        else:
            base = UniformBall(d=d)
        if "cap_center" not in obj or "cap_angle" not in obj:
            raise ConfigurationError("sector needs cap_center and cap_angle")
        return Sector(
            base=base,
            cap_center=np.asarray(obj["cap_center"], dtype=np.float64),
            cap_angle=float(obj["cap_angle"]),
        )
    if family == "segments":
        if "directions" not in obj or "probs" not in obj:
            raise ConfigurationError("segments needs directions and probs")
        return SegmentMixture(
            directions=np.asarray(obj["directions"], dtype=np.float64),
            probs=np.asarray(obj["probs"], dtype=np.float64),
        )
    if family == "circle-density":
        density = obj.get("density", {"kind": "uniform", "params": {}})
        kind = density.get("kind")
        params = density.get("params", {})
        if kind == "uniform":
            return CircleDensity.uniform()
        if kind == "cosine_mix":
            return CircleDensity.cosine_mix(
                amplitudes=params.get("amplitudes", []),
                phases=params.get("phases"),
            )
        raise ConfigurationError(f"unknown circle density kind {kind!r}")
    raise ConfigurationError(f"unknown distribution family {family!r}")


def spec_to_json(spec: DistributionSpec) -> dict:
    """Inverse of spec_from_json for every constructible spec."""
    if isinstance(spec, (UniformBall, UniformSphere)):
        return {"family": _FAMILY_NAMES[type(spec)], "d": spec.d}
    if isinstance(spec, RadialPower):
        return {
            "family": "radial-power",
            "d": spec.d,
            "alpha": spec.alpha,
            "atom": spec.atom_at_boundary,
        }
    if isinstance(spec, Sector):
        out = {
            "family": "sector",
            "d": dimension(spec),
            "cap_center": [float(x) for x in spec.cap_center],
            "cap_angle": spec.cap_angle,
        }
        if isinstance(spec.base, RadialPower):
            out["alpha"] = spec.base.alpha
            out["atom"] = spec.base.atom_at_boundary
        elif isinstance(spec.base, UniformSphere):
            # encoded as the boundary-atom limit of the radial-power family
            out["alpha"] = 0.0
            out["atom"] = 1.0
        return out
    if isinstance(spec, SegmentMixture):
        return {
            "family": "segments",
            "directions": [[float(x) for x in row] for row in spec.directions],
            "probs": [float(p) for p in spec.probs],
        }
    if isinstance(spec, CircleDensity):
        if spec.kind == "custom":
            raise ConfigurationError(
                "a custom circle density has no JSON form; use uniform/cosine_mix"
            )
        return {
            "family": "circle-density",
            "d": 2,
            "density": {"kind": spec.kind, "params": dict(spec.params)},
        }
    raise TypeError(f"unknown distribution spec {spec!r}")


def _req_int(obj: dict, key: str) -> int:
    if key not in obj:
        raise ConfigurationError(f"missing required field {key!r}")
    v = obj[key]
    if not isinstance(v, int) or isinstance(v, bool):
        raise ConfigurationError(f"field {key!r} must be an integer")
    return v
