"""Minimal-lifting resolvent splitting toolkit: operator catalog, fixed-point
drivers, contraction diagnostics, a primal-dual algorithm, and TV denoising.
"""

__version__ = "0.1.0"

from .operators import (
    LinearMap,
    NumericError,
    OperatorDesc,
    ProxSpec,
    UsageError,
    counterexample_cone_ops,
    counterexample_zero_ops,
    prox_conjugate,
    prox_iso,
    prox_quadratic_shift,
    prox_scaled_square,
    quadratic_shift_spec,
    resolvent_cone_shift,
    resolvent_skew,
    scaled_square_spec,
)
from .splitting import (
    IterationTrace,
    SplitProblem,
    dr_apply,
    dr_product_apply,
    drive,
    mt_apply,
    mt_fixed_point_residual,
    shadow_tuple,
)
from .diagnostics import (
    RateReport,
    alpha_chain,
    check_descent_inequality,
    epsilon_chain,
    fit_rate,
    primal_dual_gap,
    snr,
    theoretical_beta,
)
from .primal_dual import PDProblem, PDState, as_split_problem, assemble_operators, pd_step
from .imaging import (
    DenoiseParams,
    add_gaussian_noise,
    build_denoise_problem,
    discrete_gradient_adjoint,
    discrete_gradient_apply,
    load_pgm,
    phantom,
    save_pgm,
    solve_identity_plus_DtD,
)
