from hsflow.utils.sentinels import INFINITY

from .axioms import AxiomReport, metric_axioms_suite
from .measures import EnergyAtomSeq, quantize
from .space import MetricParams, Point, PointX, dist_X
from .transport import (
    MonotonePlan,
    TransportOutcome,
    align,
    angular_increments,
    discard_all_cost,
    evolved_plan_cost,
    j_upper_dp,
    kantorovich_assignment,
    plan_cost,
    plan_cost_time_shift,
)

__all__ = [
    "INFINITY",
    "AxiomReport",
    "metric_axioms_suite",
    "EnergyAtomSeq",
    "quantize",
    "MetricParams",
    "Point",
    "PointX",
    "dist_X",
    "MonotonePlan",
    "TransportOutcome",
    "align",
    "angular_increments",
    "discard_all_cost",
    "evolved_plan_cost",
    "j_upper_dp",
    "kantorovich_assignment",
    "plan_cost",
    "plan_cost_time_shift",
]
