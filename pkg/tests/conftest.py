"""Shared fixtures: the heavy Monte Carlo runs and the acceptance recorder.

The expensive empirical CDFs are session-scoped so that every criterion that
needs one (goodness of fit, de-Poissonisation, mean checks) reuses a single
run.  All seeds are fixed constants chosen up front.
"""

from __future__ import annotations

import sys

import numpy as np
import pytest

import diamlab as dl

# ---------------------------------------------------------------------------
# acceptance criterion recorder

_ACCEPTANCE: dict[int, tuple[str, bool, str]] = {}


def record_criterion(num: int, label: str, passed: bool, detail: str = "") -> None:
    """Store and immediately print one pass/fail line for criterion num."""
    _ACCEPTANCE[num] = (label, bool(passed), detail)
    status = "PASS" if passed else "FAIL"
    line = f"criterion {num:2d} {status}  {label}"
    if detail:
        line += f"  [{detail}]"
    # bypass capture so the line is visible while the suite runs
    print(line, file=sys.__stdout__, flush=True)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_ACCEPTANCE):
        label, ok, detail = _ACCEPTANCE[num]
        status = "PASS" if ok else "FAIL"
        line = f"criterion {num:2d} {status}  {label}"
        if detail:
            line += f"  [{detail}]"
        terminalreporter.write_line(line)


@pytest.fixture
def record():
    return record_criterion


# ---------------------------------------------------------------------------
# distribution specs shared across files

BALL2 = dl.UniformBall(2)
SPHERE3 = dl.UniformSphere(3)
SEG_ONE = dl.SegmentMixture(np.array([[1.0, 0.0]]), np.array([1.0]))
SEG_TWO = dl.SegmentMixture(
    np.array([[1.0, 0.0], [0.0, 1.0]]), np.array([0.5, 0.5])
)


def ks_against_callable(ecdf: dl.EmpiricalCdf, cdf_values: np.ndarray) -> float:
    """One-sample KS distance given the reference CDF at the sorted samples."""
    n = ecdf.count
    f = np.asarray(cdf_values, dtype=np.float64)
    i = np.arange(1, n + 1, dtype=np.float64)
    return max(float((i / n - f).max()), float((f - (i - 1.0) / n).max()), 0.0)


# ---------------------------------------------------------------------------
# heavy session fixtures (seeds fixed a priori)


@pytest.fixture(scope="session")
def ball2_binomial_ecdf() -> dl.EmpiricalCdf:
    cfg = dl.ExperimentConfig(
        spec=BALL2, n=50_000, process="binomial", replications=2000,
        seed=101, gamma=dl.auto_gamma(BALL2),
    )
    return dl.run_experiment(cfg)


@pytest.fixture(scope="session")
def ball2_poisson_ecdf() -> dl.EmpiricalCdf:
    cfg = dl.ExperimentConfig(
        spec=BALL2, n=50_000, process="poisson", replications=2000,
        seed=102, gamma=dl.auto_gamma(BALL2),
    )
    return dl.run_experiment(cfg)


@pytest.fixture(scope="session")
def sphere3_poisson_ecdf() -> dl.EmpiricalCdf:
    cfg = dl.ExperimentConfig(
        spec=SPHERE3, n=5_000, process="poisson", replications=2000,
        seed=201, gamma=dl.auto_gamma(SPHERE3),
    )
    return dl.run_experiment(cfg)


@pytest.fixture(scope="session")
def sphere3_binomial_ecdf() -> dl.EmpiricalCdf:
    cfg = dl.ExperimentConfig(
        spec=SPHERE3, n=5_000, process="binomial", replications=2000,
        seed=202, gamma=dl.auto_gamma(SPHERE3),
    )
    return dl.run_experiment(cfg)


@pytest.fixture(scope="session")
def segments_one_ecdf() -> dl.EmpiricalCdf:
    cfg = dl.ExperimentConfig(
        spec=SEG_ONE, n=10_000, process="binomial", replications=5000,
        seed=301, gamma=2.0,
    )
    return dl.run_experiment(cfg)


@pytest.fixture(scope="session")
def segments_two_ecdf() -> dl.EmpiricalCdf:
    cfg = dl.ExperimentConfig(
        spec=SEG_TWO, n=10_000, process="binomial", replications=5000,
        seed=302, gamma=2.0,
    )
    return dl.run_experiment(cfg)


@pytest.fixture(scope="session")
def circle_uniform_ecdf() -> dl.EmpiricalCdf:
    spec = dl.CircleDensity.uniform()
    cfg = dl.ExperimentConfig(
        spec=spec, n=5_000, process="binomial", replications=2000,
        seed=401, gamma=0.5,
    )
    return dl.run_experiment(cfg)
