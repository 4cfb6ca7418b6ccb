"""Group lasso, group MCP and group SCAD by group descent."""
from .cv import CVResult, Metric, cross_validate
from .design import DataError, GroupedDesign
from .linear import NumericalError, SolverState, fit_linear, group_update
from .logistic import MMState, check_saturation, fit_logistic, mm_cycle
from .ortho import OrthoTransform, back_transform, orthonormalize
from .path import FitPath, build_grid, fit_path, lambda_max
from .penalties import (
    Family,
    Loss,
    Objective,
    PenaltySpec,
    firm_mcp,
    firm_scad,
    mv_threshold,
    objective,
    penalty_value,
    soft_threshold,
)

__version__ = "0.1.0"
