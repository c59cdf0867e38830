"""Truncated-chain solver for the piecewise-linear New Keynesian model at the ELB."""

from .errors import (
    ClassifierMismatch,
    ContradictionError,
    InconclusiveError,
    MixedStructureError,
    ModelError,
    NoBifurcation,
    ParameterError,
    UnsupportedDecomposition,
)
from .model import (
    AssumptionReport,
    ModelParams,
    ReducedForm,
    Regime,
    ShockSpec,
    baseline_params,
    d_bar,
    d_bar0,
    eigenvalues_2x2,
    elb_inflation_threshold,
    f_of_p,
    p_bar,
    regime_system,
    spectral_radius_2x2,
    validate_params,
)
from .multiplier import (
    Context,
    ModalDecomposition,
    MultiplierSeries,
    ar2_coefficients,
    ar2_decompose,
    ell_plus,
    multiplier_mixed,
    multiplier_pl,
    multiplier_pl_limit,
    multiplier_pn,
    multiplier_series,
)
from .paths import (
    MsvReport,
    PathKind,
    PathSolution,
    PeriodState,
    limit_impact,
    msv_candidates,
    realize_path,
    solve_hypothetical_path,
    step_back,
)
from .regions import RegionGrid, RegionLabel, classify_msv, classify_truncated, ell_bar, region_map

__version__ = "0.1.0"
