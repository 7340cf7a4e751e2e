from __future__ import annotations

import itertools
from typing import Any, List, Mapping, Optional, Sequence

import pandas
from interface_meta import override

from hsflow.metric import AxiomReport, MetricParams, metric_axioms_suite
from hsflow.plfunc import PiecewiseLinearFn, hat, sawtooth

from .base import Scenario, ScenarioResult

DEFAULT_EPSILON = 0.05
SHRINK_FACTOR = 1.8
VIOLATION_FLOOR = 1e-12


def axiom_family() -> List[PiecewiseLinearFn]:
    """
    Six functions of assorted shapes. The last two have energy `1.025`, so
    their final atom is lighter than the others at a quantum of `0.05` but
    not at `0.025`.
    """
    return [
        hat(),
        hat(center=0.5, height=1.5),
        hat(center=-0.5, half_width=2),
        sawtooth(2),
        PiecewiseLinearFn([0, 1, 1.1], [0, 1, 1.05]),
        PiecewiseLinearFn([-1, 0, 0.4], [0, -1, -0.9]),
    ]


def _frame(report: AxiomReport) -> pandas.DataFrame:
    n = len(report.values)
    return pandas.DataFrame(
        [
            (report.epsilon, i, j, float(report.values[i, j]))
            for i, j in itertools.product(range(n), repeat=2)
        ],
        columns=["epsilon", "i", "j", "value"],
    )


def metric_axioms(
    us: Optional[Sequence[PiecewiseLinearFn]] = None,
    epsilon: float = DEFAULT_EPSILON,
    mp: Optional[MetricParams] = None,
) -> ScenarioResult:
    """
    Check identity, symmetry and the triangle inequality of the quantized
    distance at `epsilon` and at `epsilon / 2`, and that the worst violation
    shrinks by at least `SHRINK_FACTOR` when the quantum halves.

    Only atoms lighter than the quantum break symmetry and the triangle
    inequality, so violations below `VIOLATION_FLOOR` count as none.
    """
    us = axiom_family() if us is None else list(us)
    mp = mp or MetricParams(1.0)
    coarse = metric_axioms_suite(us, epsilon, mp)
    fine = metric_axioms_suite(us, 0.5 * epsilon, mp)

    result = ScenarioResult(
        name="metric_axioms",
        params={"epsilon": float(epsilon), "kappa0": mp.kappa0, "functions": len(us)},
    )
    result.outputs.update({"coarse": coarse.to_dict(), "fine": fine.to_dict()})
    result.flags.update(
        {
            "axioms_coarse": coarse.passed,
            "axioms_fine": fine.passed,
            "violations_shrink": fine.violation
            <= max(coarse.violation / SHRINK_FACTOR, VIOLATION_FLOOR),
        }
    )
    result.artifacts["axioms"] = pandas.concat([_frame(coarse), _frame(fine)], ignore_index=True)
    return result


class MetricAxioms(Scenario):
    REGISTER_NAME = "metric_axioms"

    @override
    def run(self, params: Mapping[str, Any]) -> ScenarioResult:
        return metric_axioms(
            epsilon=float(params.get("epsilon", DEFAULT_EPSILON)),
            mp=MetricParams(float(params.get("kappa0", 1.0))),
        )
