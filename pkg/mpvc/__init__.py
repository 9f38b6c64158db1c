"""Biblioteca para programas matemáticos com restrições evanescentes (MPVC)."""

from .config import config, Config, ConfigurationError
from .expr import Expr, VarSpace, ExprError, ExprSyntaxError, parse_expr, to_text, evaluate, grad
from .model import (
    MpvcProblem,
    IndexSets,
    ProblemError,
    ProblemParseError,
    InfeasiblePointError,
    classify,
    is_feasible,
    load_problem,
    parse_problem,
)
from .penalty import OmegaPoint, dist_omega, penalty_tailored, penalty_l1
from .cq import CqStatus, CqVerdict, CqReport, MultiplierVector, full_report
from .empirics import scan_error_bound, penalty_sweep, probe_acq
from .audit import audit_corpus
from .solver import SolveConfig, solve_mpvc
from .report import Report, ReportLoadError, save_report, load_report
from .display import Display
from .version import __version__

__all__ = [
    "__version__",
    "config",
    "Config",
    "ConfigurationError",
    "Expr",
    "VarSpace",
    "ExprError",
    "ExprSyntaxError",
    "parse_expr",
    "to_text",
    "evaluate",
    "grad",
    "MpvcProblem",
    "IndexSets",
    "ProblemError",
    "ProblemParseError",
    "InfeasiblePointError",
    "classify",
    "is_feasible",
    "load_problem",
    "parse_problem",
    "OmegaPoint",
    "dist_omega",
    "penalty_tailored",
    "penalty_l1",
    "CqStatus",
    "CqVerdict",
    "CqReport",
    "MultiplierVector",
    "full_report",
    "scan_error_bound",
    "penalty_sweep",
    "probe_acq",
    "audit_corpus",
    "SolveConfig",
    "solve_mpvc",
    "Report",
    "ReportLoadError",
    "save_report",
    "load_report",
    "Display",
]
