"""Heat kernels, exit laws and survival estimates for killed isotropic
alpha-stable processes."""

from .domains import (
    Ball,
    BallUnionExteriorBall,
    CircularCone,
    Domain,
    ExteriorBall,
    FatWitness,
    HalfSpace,
    HyperplaneComplement,
    Intersection,
    IntervalComplement,
    SpecialLipschitz,
    c11_scale,
    contains,
    dist_to_complement,
    domain_from_dict,
    domain_to_dict,
    fat_witness,
    scale_domain,
)
from .errors import (
    EstimateDiagnostic,
    FitError,
    InconclusiveError,
    MissingParameterError,
    UnsupportedRegimeError,
)
from .kernels import (
    Bracket,
    SurvivalProfile,
    ball_exit_tail,
    ball_exit_tail_exact,
    ball_green,
    ball_poisson,
    expected_exit_time_ball,
    exterior_ball_martin,
    heat_kernel_profile,
    punctured_line_green,
    survival_profile,
)
from .montecarlo import (
    ExitSample,
    MCEstimate,
    bhp_cross_ratio,
    estimate_beta,
    estimate_heat_kernel,
    estimate_lambda1,
    estimate_survival,
    sample_ball_exit_position,
    sample_ball_exit_positions,
    sample_exit_position_wos,
    sample_exit_positions_wos,
    sample_stable_increment,
    sample_stable_increments,
    simulate_exit,
    survival_curve,
)
from .stable import (
    DensityEval,
    StableParams,
    free_density,
    free_density_bound,
    free_density_radial,
    incomplete_kernel_integral,
    levy_constant,
    levy_density,
    levy_symbol_quadrature,
    peak_density,
)

__version__ = "0.1.0"
