"""
Sawtooth functions whose energy measures are Cauchy for the Kantorovich
distance but not for the monotone transport distance: teeth of `u^m` cannot be
split across several teeth of `u^n` without crossing a tooth of the opposite
slope, so every monotone plan pays at least `(n - m) / (8n)`.
"""

from __future__ import annotations

import warnings
from typing import Any, Mapping, Optional

import pandas
from interface_meta import override

from hsflow.errors import SubsamplingWarning
from hsflow.metric import MetricParams, j_upper_dp, kantorovich_assignment
from hsflow.plfunc import sawtooth

from .base import Scenario, ScenarioResult


def lower_bound(m: int, n: int) -> float:
    """
    `(1/4n) · (n - m)/2`, the cost below which no monotone plan from `u^m` to
    `u^n` can go.
    """
    return (n - m) / (8.0 * n)


def example2(
    m: int,
    n: int,
    epsilon: Optional[float] = None,
    mp: Optional[MetricParams] = None,
    contrast: bool = False,
) -> ScenarioResult:
    """
    Compare the sawtooth functions `u^m` and `u^n`.

    Args:
        m: Teeth of the first function.
        n: Teeth of the second function; must exceed `m`.
        epsilon: The quantum; defaults to `1 / (8n)`, which resolves every
            half-tooth of `u^n` with two atoms.
        mp: The metric parameters; defaults to `κ₀ = 1`.
        contrast: Whether to also compute the unconstrained assignment value,
            which the monotonicity constraint should exceed.
    """
    if not 1 <= m < n:
        raise ValueError(f"Expected `1 <= m < n`, got m={m!r}, n={n!r}.")
    epsilon = 1.0 / (8 * n) if epsilon is None else float(epsilon)
    mp = mp or MetricParams(1.0)
    u, v = sawtooth(m), sawtooth(n)
    bound = lower_bound(m, n)

    outcome = j_upper_dp(u, v, epsilon, mp)
    refined = j_upper_dp(u, v, epsilon / 2, mp)
    slack = mp.slack(epsilon)

    result = ScenarioResult(
        name="example2",
        params={"m": m, "n": n, "epsilon": epsilon, "kappa0": mp.kappa0},
    )
    result.outputs.update(
        {
            "distance": outcome.value,
            "distance_refined": refined.value,
            "lower_bound": bound,
            "limit_bound": 0.125,
            "slack": slack,
            "matched_pairs": len(outcome.plan.matches),
        }
    )
    result.flags.update(
        {
            "lower_bound": outcome.value >= bound,
            "refined_lower_bound": refined.value >= bound,
            "refinement": refined.value <= outcome.value + slack,
        }
    )
    result.artifacts["distance_vs_epsilon"] = pandas.DataFrame(
        {
            "epsilon": [epsilon, epsilon / 2],
            "distance": [outcome.value, refined.value],
            "lower_bound": [bound, bound],
        }
    )

    if contrast:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            assignment = kantorovich_assignment(u, v, epsilon, mp)
        result.outputs["assignment"] = assignment
        result.flags["assignment_below_distance"] = assignment < outcome.value
        if any(issubclass(w.category, SubsamplingWarning) for w in caught):
            result.notes.append(
                "The assignment contrast was computed on subsampled atoms."
            )
    return result


class Example2(Scenario):
    REGISTER_NAME = "example2"

    @override
    def run(self, params: Mapping[str, Any]) -> ScenarioResult:
        kappa0 = params.get("kappa0")
        return example2(
            m=int(params.get("m", 1)),
            n=int(params.get("n", 8)),
            epsilon=params.get("epsilon"),
            mp=MetricParams(float(kappa0)) if kappa0 is not None else None,
            contrast=bool(params.get("contrast", False)),
        )
