from .axioms import MetricAxioms, axiom_family, metric_axioms
from .base import Scenario, ScenarioResult
from .example1 import Example1, example1, example1_u, example1_v
from .example2 import Example2, example2, lower_bound
from .peakons import (
    HamiltonianCrosscheck,
    PeakonDrift,
    hamiltonian_crosscheck,
    integrate_peakons,
    peakon_drift,
)
from .zero_data import ZeroData, zero_data_suite

__all__ = [
    "Scenario",
    "ScenarioResult",
    "MetricAxioms",
    "axiom_family",
    "metric_axioms",
    "Example1",
    "example1",
    "example1_u",
    "example1_v",
    "Example2",
    "example2",
    "lower_bound",
    "HamiltonianCrosscheck",
    "PeakonDrift",
    "hamiltonian_crosscheck",
    "integrate_peakons",
    "peakon_drift",
    "ZeroData",
    "zero_data_suite",
]
