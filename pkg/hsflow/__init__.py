from .flow import FlowState, semigroup_check, solve
from .metric import MetricParams, j_upper_dp
from .plfunc import PeakonConfig, PiecewiseLinearFn, from_peakons, hat, sawtooth

try:
    from ._version import __version__, __version_tuple__
except ImportError:  # pragma: no cover
    __version__ = version = "unknown"
    __version_tuple__ = version_tuple = ("unknown",)  # type: ignore

__all__ = [
    "__version__",
    "__version_tuple__",
    "FlowState",
    "semigroup_check",
    "solve",
    "MetricParams",
    "j_upper_dp",
    "PeakonConfig",
    "PiecewiseLinearFn",
    "from_peakons",
    "hat",
    "sawtooth",
]
