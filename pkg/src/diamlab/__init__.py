"""diamlab: diameters of random point sets in the unit ball.

Samples point processes from several distribution families, computes the
largest interpoint distance with an exact pruned kernel, and compares the
scaled deficit n^(2/gamma) * (2 - diameter) against closed-form limit laws.
"""

from diamlab.geom import (
    Point,
    PointCloud,
    diameter_bruteforce,
    diameter_deficit,
    diameter_pruned,
    scaled_deficit,
)
from diamlab.limits import (
    ContinuousLaw,
    SegmentsLaw,
    SegmentsZetaLaw,
    aprs_envelope,
    gamma_exponent,
    limit_cdf,
    log_gamma,
    regularized_incomplete_beta,
    sigma0_circle_density,
    sigma0_sector,
    sigma0_spherical,
    spherical_cap_fraction,
    zeta_tail_constant,
)
from diamlab.sampler import (
    CircleDensity,
    RadialPower,
    RngHandle,
    Sector,
    SegmentMixture,
    UniformBall,
    UniformSphere,
    sample_binomial_process,
    sample_point,
    sample_poisson_process,
    spec_from_json,
    spec_to_json,
)
from diamlab.harness import (
    EmpiricalCdf,
    ExperimentConfig,
    auto_gamma,
    auto_limit_law,
    convergence_table,
    depoissonisation_compare,
    ks_distance,
    ks_two_sample,
    replication_records,
    run_experiment,
    segment_range_cdf,
)

__version__ = "0.1.0"

__all__ = [
    "Point",
    "PointCloud",
    "diameter_bruteforce",
    "diameter_deficit",
    "diameter_pruned",
    "scaled_deficit",
    "ContinuousLaw",
    "SegmentsLaw",
    "SegmentsZetaLaw",
    "aprs_envelope",
    "gamma_exponent",
    "limit_cdf",
    "log_gamma",
    "regularized_incomplete_beta",
    "sigma0_circle_density",
    "sigma0_sector",
    "sigma0_spherical",
    "spherical_cap_fraction",
    "zeta_tail_constant",
    "CircleDensity",
    "RadialPower",
    "RngHandle",
    "Sector",
    "SegmentMixture",
    "UniformBall",
    "UniformSphere",
    "sample_binomial_process",
    "sample_point",
    "sample_poisson_process",
    "spec_from_json",
    "spec_to_json",
    "EmpiricalCdf",
    "ExperimentConfig",
    "auto_gamma",
    "auto_limit_law",
    "convergence_table",
    "depoissonisation_compare",
    "ks_distance",
    "ks_two_sample",
    "replication_records",
    "run_experiment",
    "segment_range_cdf",
]
