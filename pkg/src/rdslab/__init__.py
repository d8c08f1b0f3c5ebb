"""Simulation and estimation toolkit for random dynamical systems.

Random orbits arise by composing i.i.d. map draws; the package simulates
these chains, estimates contraction/ergodic/fractal observables along
them, evaluates the matching closed-form concentration bounds, and checks
empirically that the bounds dominate the observed tails.
"""

from .spaces import (
    Circle,
    Interval,
    Projective,
    RegionSet,
    canonical_direction,
    circle_delta,
    diameter,
    distance,
    grid,
)
from .streams import SeededStream
from .maps import (
    Affine,
    DrivingMeasure,
    MoebiusDecay,
    PolynomialDecay,
    ProjectiveAction,
    SingularDerivativeError,
    apply_map,
    derivative,
    gee_diameter_c1,
    gee_diameter_sup,
    log_derivative,
    sample_map,
)
from .chains import (
    EnumerationGuardError,
    MatrixProduct,
    Trajectory,
    WordTable,
    compose_reversed,
    coupled_distance,
    draw_word,
    enumerate_expectation,
    matrix_product,
    simulate,
    simulate_coupled,
    word_maps,
    word_table,
)
from .observables import OBSERVABLES, Observable, get_observable
from .measures import (
    EmpiricalMeasure,
    kantorovich_circle,
    kantorovich_gaussian,
    kantorovich_interval,
)
from .estimators import (
    CorrelationSum,
    LambdaEstimate,
    Sigma2Estimate,
    StationaryApprox,
    birkhoff_average,
    correlation_coefficient_pj,
    correlation_dimension,
    correlation_sum,
    empirical_measure,
    lambda_n,
    log_averaged_measure,
    lyapunov_1d,
    lyapunov_projective,
    nonexpansive_fixed_points,
    pair_distance_profile,
    phi0,
    sigma2_estimate,
    stationary_approx,
    synchronization,
)
from .bounds import (
    BoundInputs,
    BoundResult,
    appendix_checks,
    beta_n,
    circle_lyap_bound,
    corrdim_bound,
    devroye_rhs,
    empirical_kappa_bound,
    interval_kappa_bound,
    lln_bound,
    main_tail_bound,
    matrix_norm_bound,
    projective_lyap_bound,
    refined_alpha,
    refined_tail_bound,
    sync_bound,
    wilson_interval,
)
from .harness import (
    ExperimentConfig,
    SystemSpec,
    TailReport,
    build_system,
    run_asclt,
    run_lambda_survey,
    run_tail,
)

__version__ = "0.1.0"
