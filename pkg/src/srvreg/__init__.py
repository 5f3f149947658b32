"""Registration of open curves in the square-root-velocity framework via HJB grid solvers."""
from .curves import SampledCurve, SrvField, Reparam, apply_reparam, inverse_srvt, srvt
from .errors import ConfigError, CurveError, NumericalError, SrvregError
from .geodesics import geodesic, shape_distance
from .pipeline import register
from .problems import CurvePair, FieldProblem, constant_problem
from .registration import ReparamPath, backtrack, eval_Jh
from .solver import GridSpec, SchemeConfig, solve

__all__ = [
    "SampledCurve", "SrvField", "Reparam", "apply_reparam", "inverse_srvt", "srvt",
    "ConfigError", "CurveError", "NumericalError", "SrvregError",
    "geodesic", "shape_distance", "register",
    "CurvePair", "FieldProblem", "constant_problem",
    "ReparamPath", "backtrack", "eval_Jh",
    "GridSpec", "SchemeConfig", "solve",
]
