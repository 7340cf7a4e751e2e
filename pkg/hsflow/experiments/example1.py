"""
Weak convergence of initial data does not control the solutions.

The data `ū_n` and `v̄_n` agree with the hat `h` outside `[0, 1]` and, on each
of `n` cells of `[0, 1]`, add a rescaled copy of `f` (slopes -2, 0) or `g`
(slopes -3, 0, -1) to `h`. They converge to each other uniformly, with
weakly converging gradients and energy densities, but `v̄_n` loses half of
its energy at `t = 2/3` while `ū_n` keeps all of it until `t = 1`.
"""

from __future__ import annotations

from typing import Any, Mapping

import numpy
import pandas
from interface_meta import override

from hsflow.flow import FlowState
from hsflow.metric import MetricParams, j_upper_dp
from hsflow.plfunc import PiecewiseLinearFn

from .base import Scenario, ScenarioResult

# Profiles on [0, 1], as breakpoints and values.
F_PROFILE = (numpy.array([0.0, 0.5, 1.0]), numpy.array([1.0, 0.0, 0.0]))
G_PROFILE = (
    numpy.array([0.0, 1.0 / 6.0, 0.5, 1.0]),
    numpy.array([1.0, 0.5, 0.5, 0.0]),
)

WEAK_CONVERGENCE_CONSTANT = 2.0


def _cells(profile: tuple, n: int) -> PiecewiseLinearFn:
    if n < 1:
        raise ValueError("`n` must be a positive integer.")
    offsets, values = profile
    x, y = [-1.0, 0.0], [0.0, 1.0]
    for i in range(1, n + 1):
        x.extend((i - 1 + offsets[1:]) / n)
        y.extend(1.0 - i / n + values[1:] / n)
    return PiecewiseLinearFn(x, y)


def example1_u(n: int) -> PiecewiseLinearFn:
    """
    `ū_n`: the hat with `n` rescaled copies of `f` on `[0, 1]`.
    """
    return _cells(F_PROFILE, n)


def example1_v(n: int) -> PiecewiseLinearFn:
    """
    `v̄_n`: the hat with `n` rescaled copies of `g` on `[0, 1]`.
    """
    return _cells(G_PROFILE, n)


def expected_energy_u(t: float) -> float:
    return 3.0 if t < 1 else 1.0


def expected_energy_v(t: float) -> float:
    if t < 2.0 / 3.0:
        return 3.0
    return 1.5 if t < 2 else 1.0


def example1(
    n: int, t: float = 0.8, epsilon: float = 0.02, kappa0: float = 3.0
) -> ScenarioResult:
    u, v = example1_u(n), example1_v(n)
    st_u, st_v = FlowState(u), FlowState(v)
    result = ScenarioResult(
        name="example1",
        params={"n": n, "t": t, "epsilon": epsilon, "kappa0": kappa0},
    )

    profile_energies = [PiecewiseLinearFn(*p).energy() for p in (F_PROFILE, G_PROFILE)]
    sup_distance = u.sup_distance(v)
    grid = numpy.linspace(0.0, 1.0, 201)
    gradient_gap = numpy.abs((u(grid) - v(grid)) - (u(0.0) - v(0.0)))
    energy_gap = numpy.abs(
        (u.cumulative_energy(grid) - v.cumulative_energy(grid))
        - (u.cumulative_energy(0.0) - v.cumulative_energy(0.0))
    )
    solved_u, solved_v = st_u.solve(t), st_v.solve(t)
    energy_u, energy_v = solved_u.energy(), solved_v.energy()

    result.outputs.update(
        {
            "profile_energies": profile_energies,
            "energy_u0": u.energy(),
            "energy_v0": v.energy(),
            "sup_distance": sup_distance,
            "weak_gradient_gap": float(gradient_gap.max()),
            "weak_energy_gap": float(energy_gap.max()),
            "first_blowup_u": st_u.first_blowup_time,
            "first_blowup_v": st_v.first_blowup_time,
            "energy_u": energy_u,
            "energy_v": energy_v,
        }
    )
    result.flags.update(
        {
            "profile_energies": bool(numpy.allclose(profile_energies, 2.0, rtol=1e-12)),
            "sup_norm_decay": sup_distance <= 2.0 / n,
            "weak_convergence_premises": max(gradient_gap.max(), energy_gap.max())
            <= WEAK_CONVERGENCE_CONSTANT / n,
            "first_blowups": bool(
                numpy.isclose(st_u.first_blowup_time, 1.0)
                and numpy.isclose(st_v.first_blowup_time, 2.0 / 3.0)
            ),
            "energy_u": abs(energy_u - expected_energy_u(t)) <= 1e-12 * 3,
            "energy_v": abs(energy_v - expected_energy_v(t)) <= 1e-12 * 3,
        }
    )

    distance = j_upper_dp(solved_u, solved_v, epsilon, MetricParams(kappa0)).value
    result.outputs["distance"] = distance
    if 2.0 / 3.0 < t < 1.0:
        result.flags["distance_separated"] = distance > 0.1

    times = numpy.union1d(numpy.linspace(0.0, 1.2, 13), [2.0 / 3.0, 1.0])
    result.artifacts["energy_curve"] = pandas.DataFrame(
        {
            "t": times,
            "energy_u": [st_u.solve(s).energy() for s in times],
            "energy_v": [st_v.solve(s).energy() for s in times],
        }
    )
    return result


class Example1(Scenario):
    REGISTER_NAME = "example1"

    @override
    def run(self, params: Mapping[str, Any]) -> ScenarioResult:
        return example1(
            n=int(params.get("n", 4)),
            t=float(params.get("t", 0.8)),
            epsilon=float(params.get("epsilon", 0.02)),
            kappa0=float(params.get("kappa0", 3.0)),
        )
