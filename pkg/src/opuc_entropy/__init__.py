"""Orthogonal polynomials on the unit circle, entropy integrals, and the
point-mass construction that makes them grow like sqrt(n) along a
subsequence.

Layers:

- ``opuc``: Szego recurrence on circle grids, leading coefficients,
  Christoffel-Darboux kernels, exact-arithmetic oracles.
- ``measures``: Bernstein-Szego densities plus atoms, quadrature, the
  Geronimus point-mass perturbation, truncate/extend/perturb plumbing.
- ``entropy``: entropy and gauge integrals with log+/log- splits and
  log-domain atom terms.
- ``blocks``: block-constant parameter profiles and their ratio
  functionals, plus a sphere-constrained extremal search.
- ``construction``: the staged driver with checkpoint persistence, state
  serialization and the calibration of growth constants.
- ``realline``: transfer to orthogonal polynomials on [-1, 1].
"""

from .blocks import (
    BlockSpec,
    block_breakpoints,
    block_gammas,
    denominator_value,
    extremal_search,
    gamma_psi,
    gamma_upper_bound,
    profile_for_length,
)
from .construction import (
    ConstructionState,
    StageRecord,
    TransformResult,
    ac_approximation,
    calibrate,
    load_calibration,
    load_state,
    run_construction,
    save_state,
    sigma_measure,
    transform_step,
)
from .entropy import (
    BUILTIN_GAUGES,
    EntropyReport,
    Gauge,
    entropy_integral,
    entropy_upper_bound,
    gauge_integral,
    log_minus_check,
    validate_gauge,
)
from .errors import (
    CTooSmallError,
    DegenerateMeasureError,
    InfeasibleParametersError,
    IntegrationError,
    InvalidParameterError,
    KMaxTooLargeError,
    NumericalError,
    OutOfRangeError,
    ResolutionError,
    StageFailureError,
    ValidationError,
)
from .measures import (
    MeasureSpec,
    QuadratureResult,
    add_atom,
    bernstein_szego,
    density_on_grid,
    extend_schur,
    geronimus_perturbed_phi,
    integrate,
    kappa_choice,
    lebesgue,
    load_measure,
    moments_from_measure,
    save_measure,
    schur_of_perturbed,
    szego_integral,
)
from .opuc import (
    CircleGrid,
    GridPolynomialPair,
    LogScalar,
    as_schur,
    cd_kernel_at_one,
    coefficients_from_grid,
    evaluate,
    exact_moments_from_schur,
    gram_schmidt_oracle,
    grid_for_degree,
    initial_pair,
    leading_coefficient_log,
    log_values_at_one,
    normalized_sweep,
    schur_from_moments,
    szego_step,
)
from .realline import RealLineReport, jacobi_from_schur, real_line_map
from .trig import TrigPoly, trig_approx

__version__ = "0.1.0"
