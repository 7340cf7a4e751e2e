from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass
from typing import Any, Dict, Sequence

import numpy

from hsflow.plfunc import PiecewiseLinearFn

from .measures import quantize
from .space import MetricParams
from .transport import align

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class AxiomReport:
    """
    The metric axioms of the quantized transport distance, evaluated on a
    family of functions.

    Attributes:
        epsilon: The quantum.
        params: The metric parameters.
        values: `values[i, j]` is the distance from function `i` to function `j`.
    """

    epsilon: float
    params: MetricParams
    values: numpy.ndarray

    @property
    def slack(self) -> float:
        return self.params.slack(self.epsilon)

    @property
    def identity_defect(self) -> float:
        return float(numpy.max(numpy.abs(numpy.diag(self.values))))

    @property
    def symmetry_gap(self) -> float:
        return float(numpy.max(numpy.abs(self.values - self.values.T)))

    @property
    def triangle_excess(self) -> float:
        """
        `max_{i,j,k} d(i, k) - d(i, j) - d(j, k)`; nonpositive when the
        triangle inequality holds exactly.
        """
        through = numpy.min(self.values[:, :, None] + self.values[None, :, :], axis=1)
        return float(numpy.max(self.values - through))

    @property
    def violation(self) -> float:
        return max(self.symmetry_gap, self.triangle_excess, 0.0)

    @property
    def passed(self) -> bool:
        return (
            self.identity_defect <= 1e-12
            and self.symmetry_gap <= self.slack
            and self.triangle_excess <= self.slack
        )

    def to_dict(self) -> Dict[str, Any]:
        n = len(self.values)
        pairs = [[i, j] for i, j in itertools.product(range(n), repeat=2)]
        return {
            "pairs": pairs,
            "values": [float(self.values[i, j]) for i, j in pairs],
            "slacks": {"epsilon": self.epsilon, "slack": self.slack},
            "bounds": {
                "identity_defect": self.identity_defect,
                "symmetry_gap": self.symmetry_gap,
                "triangle_excess": self.triangle_excess,
            },
            "passed": self.passed,
        }


def metric_axioms_suite(
    us: Sequence[PiecewiseLinearFn], epsilon: float, mp: MetricParams
) -> AxiomReport:
    """
    Evaluate the quantized transport distance between all ordered pairs of
    `us` and collect the identity, symmetry and triangle defects.
    """
    if len(us) < 3:
        raise ValueError("The metric axioms suite needs at least three functions.")
    atoms = [quantize(u, epsilon) for u in us]
    values = numpy.zeros((len(us), len(us)))
    for i, j in itertools.product(range(len(us)), repeat=2):
        values[i, j] = align(atoms[i], atoms[j], mp).value
    report = AxiomReport(epsilon=float(epsilon), params=mp, values=values)
    logger.debug(
        "Axioms at epsilon=%r: symmetry gap %r, triangle excess %r.",
        epsilon,
        report.symmetry_gap,
        report.triangle_excess,
    )
    return report
