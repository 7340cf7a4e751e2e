from __future__ import annotations

from typing import Any, Mapping

import numpy
from interface_meta import override

from hsflow.energy import (
    QUADRATURE_TOLERANCE,
    BumpTestFunction,
    TestFunction,
    conservative_witness,
    conservative_witness_check,
)
from hsflow.flow import FlowState
from hsflow.plfunc import PiecewiseLinearFn

from .base import Scenario, ScenarioResult

DEFAULT_BUMP = BumpTestFunction(t0=1.0, x0=0.0, rt=0.5, rx=1.5)
WITNESS_ENERGY = 8.0
SAMPLE_TIMES = (0.0, 0.5, 1.0, 2.0, 5.0)


def zero_data_suite(tf: TestFunction = DEFAULT_BUMP) -> ScenarioResult:
    """
    Contrast the two continuations of zero data: the dissipative solver stays
    at zero, while the conservative witness carries energy 8 from `t = 0⁺`
    on and satisfies the conservation law, but not the dissipation
    inequality across `t = 0`.
    """
    st = FlowState(PiecewiseLinearFn.constant(0.0))
    dissipative_sup = max(st.solve(t).sup_norm() for t in SAMPLE_TIMES)
    witness_energies = [conservative_witness(t).energy() for t in SAMPLE_TIMES]
    slopes = [float(conservative_witness(t).slopes[0]) for t in SAMPLE_TIMES[1:]]
    identity_residual, violation = conservative_witness_check(tf)

    result = ScenarioResult(name="zero_data", params={"bump": repr(tf)})
    result.outputs.update(
        {
            "dissipative_sup": dissipative_sup,
            "witness_energies": witness_energies,
            "witness_slopes": slopes,
            "identity_residual": identity_residual,
            "dissipativity_violation": violation,
        }
    )
    result.flags.update(
        {
            "dissipative_zero": dissipative_sup == 0.0,
            "witness_slopes": bool(
                numpy.allclose(slopes, [2.0 / t for t in SAMPLE_TIMES[1:]], rtol=1e-12)
            ),
            "energy_jump": witness_energies[0] == 0.0
            and bool(numpy.allclose(witness_energies[1:], WITNESS_ENERGY, rtol=1e-12)),
            "conservation_identity": identity_residual <= QUADRATURE_TOLERANCE,
            "dissipation_violated": violation > QUADRATURE_TOLERANCE,
        }
    )
    return result


class ZeroData(Scenario):
    REGISTER_NAME = "zero_data"

    @override
    def run(self, params: Mapping[str, Any]) -> ScenarioResult:
        return zero_data_suite()
