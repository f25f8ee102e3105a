"""Experiment harness: replication plumbing, KS statistics, auto laws."""

import math
from dataclasses import replace

import numpy as np
import pytest

import diamlab as dl
from diamlab.errors import ConfigurationError
from diamlab.harness import resolve_threads

SEG_ONE = dl.SegmentMixture(np.array([[1.0, 0.0]]), np.array([1.0]))


def _config(**kw) -> dl.ExperimentConfig:
    base = dict(
        spec=SEG_ONE, n=50, process="binomial", replications=20, seed=9, gamma=2.0
    )
    base.update(kw)
    return dl.ExperimentConfig(**base)


# ---------------------------------------------------------------------------
# thread resolution


def test_resolve_threads_explicit():
    assert resolve_threads(3) == 3
    with pytest.raises(ConfigurationError):
        resolve_threads(0)


def test_resolve_threads_env(monkeypatch):
    monkeypatch.setenv("DIAMLAB_THREADS", "5")
    assert resolve_threads(None) == 5
    monkeypatch.setenv("DIAMLAB_THREADS", "zebra")
    with pytest.raises(ConfigurationError):
        resolve_threads(None)
    monkeypatch.delenv("DIAMLAB_THREADS")
    assert resolve_threads(None) >= 1


# ---------------------------------------------------------------------------
# config validation


def test_experiment_config_validation():
    with pytest.raises(ConfigurationError):
        _config(process="bootstrap")
    with pytest.raises(ConfigurationError):
        _config(replications=0)
    with pytest.raises(ConfigurationError):
        _config(n=0)
    with pytest.raises(ConfigurationError):
        _config(n=10.5)  # binomial needs an integer n
    with pytest.raises(ConfigurationError):
        _config(n=1)  # and at least two points
    with pytest.raises(ConfigurationError):
        _config(seed=2**64)
    with pytest.raises(ConfigurationError):
        _config(seed=-1)
    with pytest.raises(ConfigurationError):
        _config(gamma=0.0)
    cfg = _config(n=10.5, process="poisson")  # Poisson mean may be fractional
    assert cfg.n == 10.5


# ---------------------------------------------------------------------------
# empirical CDF


def test_empirical_cdf_evaluate():
    e = dl.EmpiricalCdf(np.array([3.0, 1.0, 2.0]))  # sorted on construction
    assert np.array_equal(e.samples, [1.0, 2.0, 3.0])
    assert e.count == 3
    assert e.evaluate(0.5) == 0.0
    assert e.evaluate(1.0) == pytest.approx(1 / 3)
    assert e.evaluate(2.5) == pytest.approx(2 / 3)
    assert e.evaluate(3.0) == 1.0
    out = e.evaluate(np.array([0.0, 2.0]))
    assert np.allclose(out, [0.0, 2 / 3])
    assert e.mean() == pytest.approx(2.0)


def test_empirical_cdf_empty_and_bad_shape():
    empty = dl.EmpiricalCdf(np.array([]))
    with pytest.raises(ValueError):
        empty.evaluate(1.0)
    with pytest.raises(ValueError):
        empty.mean()
    with pytest.raises(ValueError):
        dl.EmpiricalCdf(np.zeros((2, 2)))


# ---------------------------------------------------------------------------
# replication plumbing


def test_replication_records_match_manual_resampling():
    cfg = _config(n=2, replications=5)
    records = dl.replication_records(cfg)
    assert [r[0] for r in records] == list(range(5))
    scale = 2.0 ** (2.0 / cfg.gamma)
    for r, n_points, diam, deficit, degenerate in records:
        rng = dl.RngHandle.for_replication(cfg.seed, r)
        cloud = dl.sample_binomial_process(SEG_ONE, 2, rng)
        want_diam, want_deficit = dl.diameter_deficit(cloud)
        assert n_points == 2 and not degenerate
        assert diam == want_diam
        assert deficit == max(0.0, scale * want_deficit)


def test_run_experiment_deterministic_and_thread_invariant():
    cfg = _config(replications=16)
    a = dl.run_experiment(cfg)
    b = dl.run_experiment(cfg)
    c = dl.run_experiment(cfg, threads=4)
    assert np.array_equal(a.samples, b.samples)
    assert np.array_equal(a.samples, c.samples)
    assert np.all(np.diff(a.samples) >= 0)  # sorted output


def test_run_experiment_scaled_deficit_consistency():
    # away from diameter 2 the pipeline equals scaled_deficit(diameter_pruned)
    cfg = _config(spec=dl.UniformBall(3), n=40, replications=8, gamma=3.0)
    records = dl.replication_records(cfg)
    for r, _, diam, deficit, _ in records:
        rng = dl.RngHandle.for_replication(cfg.seed, r)
        cloud = dl.sample_binomial_process(cfg.spec, 40, rng)
        assert diam == dl.diameter_pruned(cloud)
        assert deficit == dl.scaled_deficit(diam, 40, 3.0)


def test_degenerate_replications_are_flagged():
    cfg = _config(process="poisson", n=0.2, replications=50)
    ecdf = dl.run_experiment(cfg)
    assert ecdf.degenerate_count >= 40
    scale = 0.2 ** (2.0 / cfg.gamma)
    assert np.isclose(ecdf.samples, 2.0 * scale).sum() >= ecdf.degenerate_count


def test_all_degenerate_raises():
    cfg = _config(process="poisson", n=1e-6, replications=10)
    with pytest.raises(ConfigurationError, match="degenerate"):
        dl.run_experiment(cfg)


# ---------------------------------------------------------------------------
# KS statistics


def test_ks_distance_on_exact_quantiles():
    # samples at the law's quantiles make D = 1/(2R) up to spacing effects
    law = dl.ContinuousLaw(1.0, 1.0)
    u = (np.arange(1000) + 0.5) / 1000
    samples = -2.0 * np.log1p(-u)
    d = dl.ks_distance(dl.EmpiricalCdf(samples), law)
    assert d == pytest.approx(0.0005, abs=1e-12)


def test_ks_distance_degenerate_cases():
    law = dl.ContinuousLaw(1.0, 1.0)
    median = -2.0 * math.log(0.5)
    assert dl.ks_distance(dl.EmpiricalCdf(np.array([median])), law) == pytest.approx(0.5)
    assert dl.ks_distance(dl.EmpiricalCdf(np.zeros(4)), law) == 1.0
    with pytest.raises(ValueError):
        dl.ks_distance(dl.EmpiricalCdf(np.array([])), law)


def test_ks_two_sample_known_values():
    a = dl.EmpiricalCdf(np.array([1.0, 2.0]))
    b = dl.EmpiricalCdf(np.array([1.5]))
    assert dl.ks_two_sample(a, b) == pytest.approx(0.5)
    assert dl.ks_two_sample(a, a) == 0.0
    disjoint = dl.EmpiricalCdf(np.array([10.0, 11.0]))
    assert dl.ks_two_sample(a, disjoint) == 1.0


def test_ks_two_sample_close_for_same_law():
    rng = np.random.default_rng(3)
    a = dl.EmpiricalCdf(rng.exponential(2.0, 4000))
    b = dl.EmpiricalCdf(rng.exponential(2.0, 4000))
    assert dl.ks_two_sample(a, b) < 0.06


# ---------------------------------------------------------------------------
# automatic law selection


def test_auto_gamma_per_family():
    assert dl.auto_gamma(dl.UniformBall(2)) == 2.5
    assert dl.auto_gamma(dl.UniformBall(3)) == 3.0
    assert dl.auto_gamma(dl.UniformBall(1)) == 2.0
    assert dl.auto_gamma(dl.UniformSphere(3)) == 1.0
    assert dl.auto_gamma(dl.RadialPower(3, 2.0)) == 5.0
    assert dl.auto_gamma(dl.RadialPower(3, 1.0, atom_at_boundary=0.5)) == 1.0
    sec = dl.Sector(dl.UniformBall(2), np.array([1.0, 0.0]), 1.0)
    assert dl.auto_gamma(sec) == 2.5
    assert dl.auto_gamma(SEG_ONE) == 2.0
    assert dl.auto_gamma(dl.CircleDensity.uniform()) == 0.5


def test_auto_limit_law_per_family():
    ball = dl.auto_limit_law(dl.UniformBall(2))
    assert isinstance(ball, dl.ContinuousLaw)
    assert ball.gamma == 2.5
    assert ball.sigma0 == pytest.approx(32.0 / (15.0 * math.pi), rel=1e-13)

    line = dl.auto_limit_law(dl.UniformBall(1))
    assert isinstance(line, dl.SegmentsLaw)
    assert np.array_equal(line.probs, [1.0])

    sphere = dl.auto_limit_law(dl.UniformSphere(3))
    assert sphere.gamma == 1.0 and sphere.sigma0 == pytest.approx(1.0, rel=1e-13)

    radial = dl.auto_limit_law(dl.RadialPower(3, 2.0))
    assert radial.sigma0 == pytest.approx(dl.sigma0_spherical(3, 2.0, 1.0), rel=1e-15)

    atom = dl.auto_limit_law(dl.RadialPower(3, 0.0, atom_at_boundary=0.5))
    assert atom.gamma == 1.0
    assert atom.sigma0 == pytest.approx(0.25 * dl.zeta_tail_constant(3), rel=1e-14)

    sec = dl.Sector(dl.UniformSphere(3), np.array([0.0, 0.0, 1.0]), math.pi / 3)
    law = dl.auto_limit_law(sec)
    assert law.gamma == 1.0
    assert law.sigma0 == pytest.approx(
        dl.zeta_tail_constant(3) * dl.spherical_cap_fraction(3, math.pi / 3),
        rel=1e-13,
    )

    seg = dl.auto_limit_law(SEG_ONE)
    assert isinstance(seg, dl.SegmentsLaw) and np.array_equal(seg.probs, [1.0])

    circ = dl.auto_limit_law(dl.CircleDensity.uniform())
    assert circ.gamma == 0.5
    assert circ.sigma0 == pytest.approx(2.0 / math.pi, abs=1e-10)


def test_auto_limit_law_none_when_opposite_arcs_empty():
    def half(u):
        u = np.asarray(u, dtype=np.float64)
        return np.where(np.mod(u, 2.0 * math.pi) < math.pi, 1.0 / math.pi, 0.0)

    spec = dl.CircleDensity(density=half, sup_bound=1.0 / math.pi)
    assert dl.auto_limit_law(spec) is None


# ---------------------------------------------------------------------------
# convergence table and de-Poissonisation


def test_convergence_table_validation():
    cfg = _config()
    with pytest.raises(ConfigurationError):
        dl.convergence_table(cfg, [100])
    with pytest.raises(ConfigurationError):
        dl.convergence_table(cfg, [100, 100])
    with pytest.raises(ConfigurationError):
        dl.convergence_table(cfg, [200, 100])


def test_convergence_table_light_run():
    cfg = _config(replications=60)
    rows = dl.convergence_table(cfg, [50, 200])
    assert [n for n, _ in rows] == [50.0, 200.0]
    assert all(0.0 <= ks <= 1.0 for _, ks in rows)


def test_depoissonisation_compare_light_run():
    kp, kb, kx = dl.depoissonisation_compare(SEG_ONE, 2000, 2.0, 300, seed=13)
    # 99% Kolmogorov band at R=300 is 0.094; finite-n bias at n=2000 is ~1e-3
    assert kp < 0.12 and kb < 0.12
    assert 0.0 <= kx <= 1.0
    with pytest.raises(ConfigurationError):
        dl.depoissonisation_compare(SEG_ONE, 1, 2.0, 10, seed=13)


def test_depoissonisation_compare_is_deterministic():
    a = dl.depoissonisation_compare(SEG_ONE, 100, 2.0, 40, seed=5)
    b = dl.depoissonisation_compare(SEG_ONE, 100, 2.0, 40, seed=5)
    assert a == b


# ---------------------------------------------------------------------------
# exact finite-n reference for the single segment


def test_segment_range_cdf_n2_closed_form():
    # for two points the range CDF is (t/4)^2 on [0, 4]
    for t in np.linspace(0.0, 4.0, 17):
        assert dl.segment_range_cdf(float(t), 2) == pytest.approx(
            (t / 4.0) ** 2, rel=1e-14, abs=1e-15
        )
    assert dl.segment_range_cdf(4.0, 2) == 1.0


def test_segment_range_cdf_shape_and_monotonicity():
    t = np.linspace(0.0, 40.0, 2001)
    f = dl.segment_range_cdf(t, 10)
    assert f[0] == 0.0
    assert np.all(np.diff(f) >= -1e-15)
    assert f[-1] <= 1.0
    assert dl.segment_range_cdf(2.0 * 10, 10) == 1.0
    assert isinstance(dl.segment_range_cdf(1.0, 10), float)


def test_segment_range_cdf_converges_to_limit_law():
    law = dl.SegmentsLaw(np.array([1.0]))
    t = np.linspace(0.0, 10.0, 101)
    exact = dl.segment_range_cdf(t, 1_000_000)
    assert np.abs(exact - dl.limit_cdf(law, t)).max() < 1e-4


def test_segment_range_cdf_domain():
    with pytest.raises(ValueError):
        dl.segment_range_cdf(1.0, 1)
    with pytest.raises(ValueError):
        dl.segment_range_cdf(-0.5, 5)
