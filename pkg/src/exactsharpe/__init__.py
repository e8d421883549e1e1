"""Exact budget-constrained maximization of the risk-adjusted return ``mu'w / sqrt(w' omega w)``."""
from .closed_form import (
    ClosedFormTrace,
    PortfolioReport,
    RecursionCoeffs,
    build_B,
    build_uv,
    compute_alpha_beta,
    compute_t_star,
    portfolio_metrics,
    recursion_coefficients,
    risk_adjusted_return,
    solve_weights,
    solver_order,
    three_asset_weights,
    two_asset_weights,
)
from .errors import (
    DegenerateDenominator,
    DegenerateNormalization,
    DimensionMismatch,
    EqualConsecutiveMeans,
    NotSpd,
    ParseError,
    PortfolioError,
    StationaryPointNotMax,
)
from .estimation import ReturnSeries, estimate_moments, min_variance_weights
from .linalg import check_spd, quad_form, solve
from .moments import AssetMoments
from .oracle import (
    KktResidual,
    check_solution,
    grid_search_max,
    kkt_residual,
    pairwise_ratio_check,
    random_instance,
    tangency_weights,
)

__version__ = "0.1.0"
