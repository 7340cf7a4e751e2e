from __future__ import annotations

import copy
import logging
import math
import warnings
from dataclasses import dataclass
from typing import Any, Tuple

import numpy
import scipy.optimize
import wrapt

from hsflow.errors import SubsamplingWarning
from hsflow.flow import FlowState, _check_time
from hsflow.plfunc import PiecewiseLinearFn

from .measures import EnergyAtomSeq, quantize
from .space import (
    HALF_PI,
    MetricParams,
    angle,
    distances_to_infinity,
    paired_distances,
    pairwise_distances,
)

logger = logging.getLogger(__name__)

ASSIGNMENT_CAP = 200

# Constant in `π/2 + arctan(y) <= c/|y|` for `y <= -1`.
ARCTAN_TAIL_CONSTANT = 1.0


@dataclass(frozen=True, eq=False)
class MonotonePlan:
    """
    A discrete transportation plan between two atom sequences.

    Attributes:
        matches: Array of shape `(P, 2)` of matched atom indices, strictly
            increasing in both columns.
        discarded_u: Indices of atoms of the first sequence sent to `∞`.
        discarded_v: Indices of atoms of the second sequence sent to `∞`.
    """

    matches: numpy.ndarray
    discarded_u: numpy.ndarray
    discarded_v: numpy.ndarray

    def __post_init__(self) -> None:
        matches = numpy.asarray(self.matches, dtype=int).reshape(-1, 2)
        if numpy.any(numpy.diff(matches, axis=0) <= 0):
            raise ValueError("Matched pairs must be strictly increasing in both coordinates.")
        self.__dict__["matches"] = matches
        self.__dict__["discarded_u"] = numpy.asarray(self.discarded_u, dtype=int)
        self.__dict__["discarded_v"] = numpy.asarray(self.discarded_v, dtype=int)

    def covers(self, n_u: int, n_v: int) -> bool:
        """
        Whether every atom of each side is either matched or discarded, and
        only once.
        """
        u = numpy.sort(numpy.concatenate([self.matches[:, 0], self.discarded_u]))
        v = numpy.sort(numpy.concatenate([self.matches[:, 1], self.discarded_v]))
        return numpy.array_equal(u, numpy.arange(n_u)) and numpy.array_equal(
            v, numpy.arange(n_v)
        )

    def reversed(self) -> MonotonePlan:
        return MonotonePlan(
            matches=self.matches[:, ::-1],
            discarded_u=self.discarded_v,
            discarded_v=self.discarded_u,
        )


class TransportOutcome(wrapt.ObjectProxy):
    """
    The value of an optimal quantized monotone plan.

    The outcome behaves like the (float) value itself, and additionally
    carries the plan and the atom sequences it was computed from.
    """

    def __init__(
        self,
        value: float,
        plan: MonotonePlan,
        atoms_u: EnergyAtomSeq,
        atoms_v: EnergyAtomSeq,
        params: MetricParams,
    ):
        wrapt.ObjectProxy.__init__(self, float(value))
        self._self_plan = plan
        self._self_atoms_u = atoms_u
        self._self_atoms_v = atoms_v
        self._self_params = params

    @property
    def value(self) -> float:
        return self.__wrapped__

    @property
    def plan(self) -> MonotonePlan:
        return self._self_plan

    @property
    def atoms_u(self) -> EnergyAtomSeq:
        return self._self_atoms_u

    @property
    def atoms_v(self) -> EnergyAtomSeq:
        return self._self_atoms_v

    @property
    def params(self) -> MetricParams:
        return self._self_params

    @property
    def epsilon(self) -> float:
        return self._self_atoms_u.epsilon

    def __repr__(self) -> str:
        return f"TransportOutcome({self.__wrapped__!r}, matched={len(self.plan.matches)})"

    def __copy__(self) -> TransportOutcome:
        return type(self)(
            self.__wrapped__, self.plan, self.atoms_u, self.atoms_v, self.params
        )

    def __deepcopy__(self, memo: Any = None) -> TransportOutcome:
        return type(self)(
            self.__wrapped__,
            copy.deepcopy(self.plan, memo),
            copy.deepcopy(self.atoms_u, memo),
            copy.deepcopy(self.atoms_v, memo),
            self.params,
        )

    def __reduce_ex__(self, protocol: Any) -> Tuple[Any, Tuple]:
        return TransportOutcome, (
            self.__wrapped__,
            self.plan,
            self.atoms_u,
            self.atoms_v,
            self.params,
        )


# Costs


def _match_costs(a: EnergyAtomSeq, b: EnergyAtomSeq, mp: MetricParams) -> numpy.ndarray:
    # Unequal masses (remainder atoms) match their common mass and send the
    # excess to infinity.
    distances = pairwise_distances(a.x, a.u, a.w, b.x, b.u, b.w, mp.kappa0)
    mass_a, mass_b = a.mass[:, None], b.mass[None, :]
    common = numpy.minimum(mass_a, mass_b)
    return (
        common * distances
        + (mass_a - common) * distances_to_infinity(a.w, mp.kappa0)[:, None]
        + (mass_b - common) * distances_to_infinity(b.w, mp.kappa0)[None, :]
    )


def _discard_costs(a: EnergyAtomSeq, mp: MetricParams) -> numpy.ndarray:
    return a.mass * distances_to_infinity(a.w, mp.kappa0)


def plan_cost(
    plan: MonotonePlan, a: EnergyAtomSeq, b: EnergyAtomSeq, mp: MetricParams
) -> float:
    """
    The cost of `plan` between the atom sequences `a` and `b`.
    """
    i, j = plan.matches[:, 0], plan.matches[:, 1]
    mass_a, mass_b = a.mass[i], b.mass[j]
    common = numpy.minimum(mass_a, mass_b)
    distances = paired_distances(
        a.x[i], a.u[i], a.w[i], b.x[j], b.u[j], b.w[j], mp.kappa0
    )
    matched = (
        common * distances
        + (mass_a - common) * distances_to_infinity(a.w[i], mp.kappa0)
        + (mass_b - common) * distances_to_infinity(b.w[j], mp.kappa0)
    )
    return float(
        numpy.sum(matched)
        + numpy.sum(_discard_costs(a, mp)[plan.discarded_u])
        + numpy.sum(_discard_costs(b, mp)[plan.discarded_v])
    )


def discard_all_cost(a: EnergyAtomSeq, b: EnergyAtomSeq, mp: MetricParams) -> float:
    """
    The cost of the feasible plan that sends every atom to `∞`.
    """
    return float(numpy.sum(_discard_costs(a, mp)) + numpy.sum(_discard_costs(b, mp)))


# Monotone alignment


def align(a: EnergyAtomSeq, b: EnergyAtomSeq, mp: MetricParams) -> TransportOutcome:
    """
    The optimal monotone plan between two atom sequences.

    The table `C[i][j]` holds the cheapest plan for the first `i` atoms of `a`
    and the first `j` atoms of `b`; its last cell is attained by matching
    `(a_i, b_j)`, discarding `a_i`, or discarding `b_j`. Each row is filled
    at once: after the match/discard-`a` candidates are known, discarding
    atoms of `b` is a running minimum along the row.
    """
    n, m = len(a), len(b)
    match = _match_costs(a, b, mp)
    drop_a = _discard_costs(a, mp)
    drop_b = _discard_costs(b, mp)
    prefix_b = numpy.concatenate([[0.0], numpy.cumsum(drop_b)])

    table = numpy.empty((n + 1, m + 1))
    table[0] = prefix_b
    for i in range(1, n + 1):
        candidates = numpy.empty(m + 1)
        candidates[0] = table[i - 1, 0] + drop_a[i - 1]
        candidates[1:] = numpy.minimum(
            table[i - 1, :-1] + match[i - 1], table[i - 1, 1:] + drop_a[i - 1]
        )
        table[i] = prefix_b + numpy.minimum.accumulate(candidates - prefix_b)

    matches, discarded_u, discarded_v = [], [], []
    i, j = n, m
    while i > 0 or j > 0:
        options = (
            table[i - 1, j - 1] + match[i - 1, j - 1] if i > 0 and j > 0 else numpy.inf,
            table[i - 1, j] + drop_a[i - 1] if i > 0 else numpy.inf,
            table[i, j - 1] + drop_b[j - 1] if j > 0 else numpy.inf,
        )
        choice = int(numpy.argmin(options))
        if choice == 0:
            matches.append((i - 1, j - 1))
            i, j = i - 1, j - 1
        elif choice == 1:
            discarded_u.append(i - 1)
            i -= 1
        else:
            discarded_v.append(j - 1)
            j -= 1

    plan = MonotonePlan(
        matches=numpy.array(matches[::-1], dtype=int).reshape(-1, 2),
        discarded_u=numpy.array(discarded_u[::-1], dtype=int),
        discarded_v=numpy.array(discarded_v[::-1], dtype=int),
    )
    logger.debug(
        "Aligned %d and %d atoms: %d matched, value %r.", n, m, len(matches), table[n, m]
    )
    return TransportOutcome(table[n, m], plan, a, b, mp)


def j_upper_dp(
    u: PiecewiseLinearFn, v: PiecewiseLinearFn, epsilon: float, mp: MetricParams
) -> TransportOutcome:
    """
    Approximate the transport distance between `u` and `v` from above by the
    optimal monotone plan between their quantized energy measures.

    Args:
        u: The first function.
        v: The second function.
        epsilon: The quantum used for both energy measures.
        mp: The metric parameters.
    """
    return align(quantize(u, epsilon), quantize(v, epsilon), mp)


# Explicit plans


def _integral_abs_linear(
    f0: numpy.ndarray, f1: numpy.ndarray, length: numpy.ndarray
) -> numpy.ndarray:
    # ∫|f| over a segment on which f is linear with end values f0, f1.
    same_sign = f0 * f1 >= 0
    spread = numpy.abs(f0) + numpy.abs(f1)
    crossing = (f0**2 + f1**2) / (2 * numpy.where(spread > 0, spread, 1.0))
    return length * numpy.where(same_sign, 0.5 * numpy.abs(f0 + f1), crossing)


def angular_increments(st: FlowState, t: float) -> numpy.ndarray:
    """
    `|arctan ū_x - arctan u_x(t, ξ)|` on each segment, or `NaN` for segments
    that are dead at time `t`.
    """
    alive = st.alive(t)
    gradient = st.gradient_along(t, st.initial.x[:-1])
    return numpy.where(
        alive, numpy.abs(angle(st.slopes) - angle(gradient)), numpy.nan
    )


def plan_cost_time_shift(
    st: FlowState, t: float, mp: MetricParams
) -> Tuple[float, float]:
    """
    The cost of transporting the energy of `ū` to that of `u(t)` along the
    characteristics, together with the a priori bound on it which is linear
    in `t` for small times.

    Surviving segments are matched with their images; each point is charged
    the distance between `(x, ū(x), arctan ū_x(x))` and its image. The
    position and value gaps are linear along a segment and are integrated
    exactly, while the angle gap is constant per segment. Dead segments are
    sent to `∞`.

    Returns:
        The pair `(cost, bound)`.
    """
    t = _check_time(t)
    u = st.initial
    energy = st.total_mass
    bound = (
        math.pi * t / 4
        + (ARCTAN_TAIL_CONSTANT + mp.kappa0) / 2
        + u.sup_norm()
        + (t + 2) / 8 * energy
    ) * t * energy
    if u.n_segments == 0:
        return 0.0, bound

    alive = st.alive(t)
    position_gap = u.x - numpy.asarray(st.xi(t, u.x))
    value_gap = u.y - numpy.asarray(st.u_along(t, u.x))
    density = u.masses / u.lengths
    survivors = density * (
        _integral_abs_linear(position_gap[:-1], position_gap[1:], u.lengths)
        + _integral_abs_linear(value_gap[:-1], value_gap[1:], u.lengths)
    ) + mp.kappa0 * numpy.nan_to_num(angular_increments(st, t)) * u.masses
    dead = distances_to_infinity(angle(st.slopes), mp.kappa0) * u.masses
    cost = float(numpy.sum(numpy.where(alive, survivors, dead)))
    return cost, bound


def _evolve_atoms(st: FlowState, atoms: EnergyAtomSeq, t: float) -> EnergyAtomSeq:
    return EnergyAtomSeq(
        x=numpy.asarray(st.xi(t, atoms.x)),
        u=numpy.asarray(st.u_along(t, atoms.x)),
        w=numpy.asarray(angle(st.gradient_along(t, atoms.x))),
        mass=atoms.mass,
        segment=atoms.segment,
        epsilon=atoms.epsilon,
    )


def evolved_plan_cost(
    stU: FlowState,
    stV: FlowState,
    base: TransportOutcome,
    t: float,
    mp: MetricParams,
) -> float:
    """
    The cost at time `t` of the plan obtained by moving every atom of `base`
    along its characteristic.

    Matched pairs in which either atom has collapsed are both sent to `∞`
    (a collapsed atom sits at angle `-π/2` and costs nothing there).
    """
    t = _check_time(t)
    a = _evolve_atoms(stU, base.atoms_u, t)
    b = _evolve_atoms(stV, base.atoms_v, t)
    i, j = base.plan.matches[:, 0], base.plan.matches[:, 1]
    collapsed = (a.w[i] <= -HALF_PI) | (b.w[j] <= -HALF_PI)
    plan = MonotonePlan(
        matches=base.plan.matches[~collapsed],
        discarded_u=numpy.concatenate([base.plan.discarded_u, i[collapsed]]),
        discarded_v=numpy.concatenate([base.plan.discarded_v, j[collapsed]]),
    )
    return plan_cost(plan, a, b, mp)


# Unconstrained contrast


def kantorovich_assignment(
    u: PiecewiseLinearFn,
    v: PiecewiseLinearFn,
    epsilon: float,
    mp: MetricParams,
    cap: int = ASSIGNMENT_CAP,
) -> float:
    """
    The optimal cost when the monotonicity of plans is dropped: an assignment
    problem between the atoms of `u` and `v`, in which every atom may also be
    sent to `∞`.

    Atom sequences longer than `cap` are subsampled (with a warning), keeping
    their total mass.
    """
    atoms = []
    for seq in (quantize(u, epsilon), quantize(v, epsilon)):
        if len(seq) > cap:
            step = -(-len(seq) // cap)
            warnings.warn(
                f"Subsampling {len(seq)} atoms by a factor {step} for the assignment contrast.",
                SubsamplingWarning,
            )
            seq = seq.subsample(step)
        atoms.append(seq)
    a, b = atoms
    n, m = len(a), len(b)
    if n + m == 0:
        return 0.0

    cost = numpy.zeros((n + m, m + n))
    cost[:n, :m] = _match_costs(a, b, mp)
    cost[:n, m:] = numpy.inf
    cost[:n, m:][numpy.diag_indices(n)] = _discard_costs(a, mp)
    cost[n:, :m] = numpy.inf
    cost[n:, :m][numpy.diag_indices(m)] = _discard_costs(b, mp)
    rows, cols = scipy.optimize.linear_sum_assignment(cost)
    return float(cost[rows, cols].sum())
