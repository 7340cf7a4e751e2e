from __future__ import annotations

from abc import abstractmethod
from dataclasses import dataclass
from typing import Tuple, Union

import numpy
from interface_meta import InterfaceMeta, override

ArrayOrFloat = Union[float, numpy.ndarray]


class TestFunction(metaclass=InterfaceMeta):
    """
    A compactly supported C¹ function on the `(t, x)` plane, used to test
    weak formulations.
    """

    __test__ = False
    INTERFACE_RAISE_ON_VIOLATION = True

    def __call__(self, t: float, x: ArrayOrFloat) -> ArrayOrFloat:
        return self.value(t, x)

    @abstractmethod
    def value(self, t: float, x: ArrayOrFloat) -> ArrayOrFloat:
        """
        The value of the test function at time `t` and positions `x`.
        """

    @abstractmethod
    def partials(self, t: float, x: ArrayOrFloat) -> Tuple[ArrayOrFloat, ArrayOrFloat]:
        """
        The partial derivatives `(φ_t, φ_x)` at time `t` and positions `x`.
        """

    @property
    @abstractmethod
    def support(self) -> Tuple[Tuple[float, float], Tuple[float, float]]:
        """
        The box `((t_lo, t_hi), (x_lo, x_hi))` outside of which the test
        function vanishes.
        """


def _profile(r: ArrayOrFloat) -> numpy.ndarray:
    r = numpy.asarray(r, dtype=float)
    return numpy.where(numpy.abs(r) < 1, (1 - r**2) ** 2, 0.0)


def _profile_derivative(r: ArrayOrFloat) -> numpy.ndarray:
    r = numpy.asarray(r, dtype=float)
    return numpy.where(numpy.abs(r) < 1, -4 * r * (1 - r**2), 0.0)


@dataclass(frozen=True)
class BumpTestFunction(TestFunction):
    """
    The product `b((t - t0) / rt) b((x - x0) / rx)` of polynomial bumps
    `b(r) = (1 - r²)²` on `|r| < 1`.
    """

    t0: float
    x0: float
    rt: float
    rx: float

    def __post_init__(self) -> None:
        if not (self.rt > 0 and self.rx > 0):
            raise ValueError("Bump radii `rt` and `rx` must be positive.")

    @override
    def value(self, t: float, x: ArrayOrFloat) -> ArrayOrFloat:
        return _profile((t - self.t0) / self.rt) * _profile(
            (numpy.asarray(x) - self.x0) / self.rx
        )

    @override
    def partials(self, t: float, x: ArrayOrFloat) -> Tuple[ArrayOrFloat, ArrayOrFloat]:
        rt = (t - self.t0) / self.rt
        rx = (numpy.asarray(x) - self.x0) / self.rx
        phi_t = _profile_derivative(rt) / self.rt * _profile(rx)
        phi_x = _profile(rt) * _profile_derivative(rx) / self.rx
        return phi_t, phi_x

    @override  # type: ignore
    @property
    def support(self) -> Tuple[Tuple[float, float], Tuple[float, float]]:
        return (
            (self.t0 - self.rt, self.t0 + self.rt),
            (self.x0 - self.rx, self.x0 + self.rx),
        )
