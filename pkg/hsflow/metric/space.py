"""
The compactified state space `ℝ² × (-π/2, π/2] ∪ {∞}` on which energy
measures live. A point `(x, u, w)` records a position, the value of the
function there and the angle `w = arctan(u_x)`; all points with `w = -π/2`
(infinitely steep downward gradients) are identified with `∞`.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy

from hsflow.utils.sentinels import INFINITY, _InfinityType

HALF_PI = 0.5 * numpy.pi


@dataclass(frozen=True)
class MetricParams:
    """
    Parameters of the distance on the state space.

    Attributes:
        kappa0: The weight of the angular coordinate.
    """

    kappa0: float = 1.0

    def __post_init__(self) -> None:
        kappa0 = float(self.kappa0)
        if not (numpy.isfinite(kappa0) and kappa0 > 0):
            raise ValueError(f"`kappa0` must be finite and positive, not {self.kappa0!r}.")
        self.__dict__["kappa0"] = kappa0

    @classmethod
    def for_energy(cls, energy: float) -> MetricParams:
        """
        The default parameters for data of the given energy: `κ₀ = max(1, E)`.
        """
        return cls(kappa0=max(1.0, float(energy)))

    def slack(self, epsilon: float) -> float:
        """
        The cost `2 ε κ₀ π` of pricing one atom of mass `ε` fully to `∞` in
        both directions.
        """
        return 2.0 * epsilon * self.kappa0 * numpy.pi


@dataclass(frozen=True)
class PointX:
    x: float
    u: float
    w: float

    def __post_init__(self) -> None:
        if not (numpy.isfinite(self.x) and numpy.isfinite(self.u)):
            raise ValueError("Points of the state space need finite `x` and `u`.")
        if not -HALF_PI < self.w <= HALF_PI:
            raise ValueError(
                f"The angle `w` must lie in (-π/2, π/2], not {self.w!r}; use `INFINITY` for -π/2."
            )

    @classmethod
    def from_slope(cls, x: float, u: float, slope: float) -> Point:
        w = float(angle(slope))
        if w <= -HALF_PI:
            return INFINITY
        return cls(x, u, w)


Point = Union[PointX, _InfinityType]


def angle(slope: Union[float, numpy.ndarray]) -> Union[float, numpy.ndarray]:
    """
    `arctan(slope)`, with slope `-∞` mapped to `-π/2`.
    """
    return numpy.arctan(slope)


def distances_to_infinity(w: numpy.ndarray, kappa0: float) -> numpy.ndarray:
    return kappa0 * numpy.abs(HALF_PI + numpy.asarray(w, dtype=float))


def pairwise_distances(
    xa: numpy.ndarray,
    ua: numpy.ndarray,
    wa: numpy.ndarray,
    xb: numpy.ndarray,
    ub: numpy.ndarray,
    wb: numpy.ndarray,
    kappa0: float,
) -> numpy.ndarray:
    """
    The matrix of distances between two families of finite points.
    """
    direct = (
        numpy.abs(numpy.subtract.outer(xa, xb))
        + numpy.abs(numpy.subtract.outer(ua, ub))
        + kappa0 * numpy.abs(numpy.subtract.outer(wa, wb))
    )
    via_infinity = numpy.add.outer(
        distances_to_infinity(wa, kappa0), distances_to_infinity(wb, kappa0)
    )
    return numpy.minimum(direct, via_infinity)


def dist_X(p: Point, q: Point, mp: MetricParams) -> float:
    """
    The distance between two points of the state space: the cheaper of going
    directly and of going through `∞`.
    """
    if p is INFINITY and q is INFINITY:
        return 0.0
    if p is INFINITY:
        p, q = q, p
    if q is INFINITY:
        return float(distances_to_infinity(p.w, mp.kappa0))
    return float(
        pairwise_distances(p.x, p.u, p.w, q.x, q.u, q.w, mp.kappa0)
    )


def paired_distances(
    xa: numpy.ndarray,
    ua: numpy.ndarray,
    wa: numpy.ndarray,
    xb: numpy.ndarray,
    ub: numpy.ndarray,
    wb: numpy.ndarray,
    kappa0: float,
) -> numpy.ndarray:
    """
    The distances between corresponding points of two equally long families.
    """
    direct = numpy.abs(xa - xb) + numpy.abs(ua - ub) + kappa0 * numpy.abs(wa - wb)
    return numpy.minimum(
        direct, distances_to_infinity(wa, kappa0) + distances_to_infinity(wb, kappa0)
    )
