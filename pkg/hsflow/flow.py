"""
The exact dissipative flow of piecewise-linear data.

Along the characteristic starting at `y` the gradient solves `ż = -z²/2`, so a
segment with negative slope `s` steepens until its blow-up time `-2/s`, after
which it has collapsed to a point and its energy has been removed. Between
consecutive blow-up epochs the survivor set is frozen, so the potential
`φ(t, y)` is piecewise constant in time and every time integral entering the
characteristics is available in closed form. No time stepping is involved.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Union

import numpy
import pandas

from .plfunc import ArrayLike, PiecewiseLinearFn, _scalar_or_array

logger = logging.getLogger(__name__)

TIE_TOLERANCE = 1e-12


def _check_time(t: float, name: str = "t") -> float:
    t = float(t)
    if not numpy.isfinite(t) or t < 0:
        raise ValueError(
            f"Time `{name}` must be a finite nonnegative number, not {t!r}; the dissipative flow is only defined forward in time."
        )
    return t


def blowup_time(slope: ArrayLike) -> Union[float, numpy.ndarray]:
    """
    The time `-2/slope` at which a negative gradient reaches `-∞` along its
    characteristic; `+∞` for nonnegative slopes.
    """
    slopes = numpy.asarray(slope, dtype=float)
    with numpy.errstate(divide="ignore"):
        times = numpy.where(slopes < 0, -2.0 / numpy.where(slopes < 0, slopes, -1.0), numpy.inf)
    return _scalar_or_array(times, slope)


@dataclass(frozen=True)
class CharacteristicMap:
    """
    The map `y ↦ ξ(t, y)` at a fixed time.

    It is piecewise linear on the breakpoints of the initial datum, with slope
    `jacobian[k]` on segment `k` and slope one on both tails (so it is onto).

    Attributes:
        time: The time `t`.
        y: The breakpoints of the initial datum.
        xi: The images `ξ(t, y_k)` of those breakpoints.
        jacobian: The derivative `ξ_y` on each segment; `¼(2 + t s_k)²` for
            surviving segments and `0` for collapsed ones.
    """

    time: float
    y: numpy.ndarray
    xi: numpy.ndarray
    jacobian: numpy.ndarray

    def __call__(self, y: ArrayLike) -> Union[float, numpy.ndarray]:
        y_arr = numpy.asarray(y, dtype=float)
        values = (
            numpy.interp(y_arr, self.y, self.xi)
            + numpy.minimum(y_arr - self.y[0], 0.0)
            + numpy.maximum(y_arr - self.y[-1], 0.0)
        )
        return _scalar_or_array(values, y)

    @property
    def is_nondecreasing(self) -> bool:
        return bool(numpy.all(numpy.diff(self.xi) >= 0))


@dataclass(frozen=True, eq=False)
class FlowState:
    """
    An initial datum together with its segment table, from which the solution
    at any time is obtained in closed form.

    Attributes:
        initial: The initial datum `ū`.
    """

    initial: PiecewiseLinearFn

    def __post_init__(self) -> None:
        if not isinstance(self.initial, PiecewiseLinearFn):
            raise TypeError(
                f"`initial` must be a `PiecewiseLinearFn`, not {type(self.initial).__name__}."
            )
        logger.debug(
            "Flow state with %d segments; epochs: %s",
            self.initial.n_segments,
            self.epochs.tolist(),
        )

    # Segment table

    @property
    def slopes(self) -> numpy.ndarray:
        return self.initial.slopes

    @property
    def lengths(self) -> numpy.ndarray:
        return self.initial.lengths

    @property
    def masses(self) -> numpy.ndarray:
        return self.initial.masses

    @cached_property
    def blowup_times(self) -> numpy.ndarray:
        return numpy.atleast_1d(blowup_time(self.slopes))

    @cached_property
    def epochs(self) -> numpy.ndarray:
        """
        The sorted distinct finite blow-up times.
        """
        return numpy.unique(self.blowup_times[numpy.isfinite(self.blowup_times)])

    @property
    def first_blowup_time(self) -> float:
        return float(self.epochs[0]) if len(self.epochs) else numpy.inf

    @property
    def total_mass(self) -> float:
        return float(numpy.sum(self.masses))

    def alive(self, t: float) -> numpy.ndarray:
        """
        The survivor mask at time `t`. A segment is already dead at its own
        blow-up time.
        """
        t = _check_time(t)
        return 2.0 + t * self.slopes > TIE_TOLERANCE

    def survivor_mass(self, t: float) -> float:
        return float(numpy.sum(self.masses[self.alive(t)]))

    def _lifetimes(self, t: float) -> numpy.ndarray:
        return numpy.minimum(t, self.blowup_times)

    def _potential(self, weights: numpy.ndarray, y: ArrayLike) -> numpy.ndarray:
        # ¼ Σ_j w_j c_j(y): weights to the left count +1, to the right -1,
        # and the segment containing y is split linearly.
        cumulative = numpy.concatenate([[0.0], numpy.cumsum(weights)])
        return 0.25 * (2.0 * numpy.interp(y, self.initial.x, cumulative) - cumulative[-1])

    # Flow

    def phi(self, t: float, y: ArrayLike) -> Union[float, numpy.ndarray]:
        """
        The potential `φ(t, y)`: a quarter of the surviving energy to the left
        of `y` minus that to the right.
        """
        weights = numpy.where(self.alive(t), self.masses, 0.0)
        return _scalar_or_array(self._potential(weights, y), y)

    def u_along(self, t: float, y: ArrayLike) -> Union[float, numpy.ndarray]:
        """
        The solution value `ū(y) + ∫_0^t φ(s, y) ds` along the characteristic
        from `y`.

        Each segment contributes to `φ(s, y)` with a constant weight up to its
        blow-up time, so the time integral weighs segment `j` by
        `min(t, T_j)`.
        """
        t = _check_time(t)
        weights = self.masses * self._lifetimes(t)
        return _scalar_or_array(
            numpy.asarray(self.initial(y)) + self._potential(weights, y), y
        )

    def xi(self, t: float, y: ArrayLike) -> Union[float, numpy.ndarray]:
        """
        The characteristic `ξ(t, y) = y + t ū(y) + ∫_0^t (t - s) φ(s, y) ds`.
        """
        t = _check_time(t)
        tau = self._lifetimes(t)
        weights = self.masses * (t * tau - 0.5 * tau**2)
        y_arr = numpy.asarray(y, dtype=float)
        return _scalar_or_array(
            y_arr + t * numpy.asarray(self.initial(y)) + self._potential(weights, y),
            y,
        )

    def gradient_along(self, t: float, y: ArrayLike) -> Union[float, numpy.ndarray]:
        """
        The gradient `2 ū_x(y) / (2 + t ū_x(y))` along the characteristic from
        `y`, or `-∞` once that characteristic's segment has collapsed.
        """
        t = _check_time(t)
        slope = numpy.asarray(self.initial.slope_at(y), dtype=float)
        denominator = 2.0 + t * slope
        alive = denominator > TIE_TOLERANCE
        gradient = numpy.where(
            alive, 2.0 * slope / numpy.where(alive, denominator, 1.0), -numpy.inf
        )
        return _scalar_or_array(gradient, y)

    def characteristics(self, t: float) -> CharacteristicMap:
        t = _check_time(t)
        alive = self.alive(t)
        return CharacteristicMap(
            time=t,
            y=self.initial.x,
            xi=numpy.asarray(self.xi(t, self.initial.x)),
            jacobian=numpy.where(alive, 0.25 * (2.0 + t * self.slopes) ** 2, 0.0),
        )

    def solve(self, t: float) -> PiecewiseLinearFn:
        """
        The solution `u(t, ·)` as a piecewise-linear function.

        Surviving segments are stretched by `¼(2 + t s_k)²` and their slopes
        become `2 s_k / (2 + t s_k)`; dead segments collapse to a single
        breakpoint. The result is assembled from these per-segment increments,
        anchored at the image of the first breakpoint, so that every survivor
        keeps its energy even when its image is shorter than the spacing of
        floating-point numbers near it.

        Args:
            t: The (nonnegative) time.
        """
        t = _check_time(t)
        x0 = self.initial.x[0]
        anchor_x = float(self.xi(t, x0))
        anchor_u = float(self.u_along(t, x0))

        alive = self.alive(t)
        stretch = 1.0 + 0.5 * t * self.slopes
        lengths = (self.lengths * stretch**2)[alive]
        rises = (self.lengths * self.slopes * stretch)[alive]

        logger.debug(
            "Solved to t=%r: %d of %d segments survive.",
            t,
            int(alive.sum()),
            self.initial.n_segments,
        )
        if not numpy.any(alive):
            return PiecewiseLinearFn.constant(anchor_u, at=anchor_x)
        return PiecewiseLinearFn.from_increments(anchor_x, anchor_u, lengths, rises)

    def energy_curve(self, times: Iterable[float]) -> pandas.DataFrame:
        """
        Tabulate `t ↦ energy(u(t))` at the requested times and at every epoch
        up to the last of them, which together describe the full step function.
        """
        times = numpy.array([_check_time(t) for t in times], dtype=float)
        horizon = times.max() if len(times) else 0.0
        grid = numpy.union1d(times, self.epochs[self.epochs <= horizon])
        return pandas.DataFrame(
            {
                "t": grid,
                "energy": [self.solve(t).energy() for t in grid],
                "survivor_mass": [self.survivor_mass(t) for t in grid],
            }
        )


# Functional interface


def gradient_along(st: FlowState, t: float, y: ArrayLike) -> Union[float, numpy.ndarray]:
    return st.gradient_along(t, y)


def phi(st: FlowState, t: float, y: ArrayLike) -> Union[float, numpy.ndarray]:
    return st.phi(t, y)


def xi(st: FlowState, t: float, y: ArrayLike) -> Union[float, numpy.ndarray]:
    return st.xi(t, y)


def u_along(st: FlowState, t: float, y: ArrayLike) -> Union[float, numpy.ndarray]:
    return st.u_along(t, y)


def solve(st: FlowState, t: float) -> PiecewiseLinearFn:
    return st.solve(t)


def semigroup_check(st: FlowState, s: float, t: float) -> float:
    """
    Compare `S_{s+t} ū` with `S_t S_s ū`.

    Returns:
        The larger of the sup-norm distance and the energy difference of the
        two solutions.
    """
    s, t = _check_time(s, "s"), _check_time(t)
    direct = st.solve(s + t)
    composed = FlowState(st.solve(s)).solve(t)
    return max(direct.sup_distance(composed), abs(direct.energy() - composed.energy()))
