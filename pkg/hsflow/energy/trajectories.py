from __future__ import annotations

import inspect
from abc import abstractmethod
from typing import Dict, List, Optional, Type, Union

import numpy
from interface_meta import InterfaceMeta, override

from hsflow.errors import ImplementationNotFound
from hsflow.flow import FlowState, _check_time
from hsflow.plfunc import PiecewiseLinearFn


class TrajectoryMeta(InterfaceMeta):
    INTERFACE_RAISE_ON_VIOLATION = True

    REGISTERED_NAMES: Dict[str, Type[Trajectory]] = {}

    def __register_implementation__(cls) -> None:
        if "REGISTER_NAME" in cls.__dict__ and cls.REGISTER_NAME:
            cls.REGISTERED_NAMES[cls.REGISTER_NAME] = cls

    def for_name(cls, name: Union[str, Type[Trajectory]]) -> Type[Trajectory]:
        if inspect.isclass(name) and issubclass(name, Trajectory):
            return name
        if name not in cls.REGISTERED_NAMES:
            raise ImplementationNotFound(
                f"No trajectory is registered under {name!r}. Available trajectories are: {sorted(cls.REGISTERED_NAMES)}."
            )
        return cls.REGISTERED_NAMES[name]


class Trajectory(metaclass=TrajectoryMeta):
    """
    A map `t ↦ u(t, ·)` into piecewise-linear functions, not necessarily
    produced by the dissipative solver. Weak formulations are checked against
    this interface.
    """

    REGISTER_NAME: Optional[str] = None

    @abstractmethod
    def at(self, t: float) -> PiecewiseLinearFn:
        """
        The state of the trajectory at time `t`.
        """

    def kinks(self, t1: float, t2: float) -> List[float]:
        """
        The times in `(t1, t2)` at which the trajectory is not smooth in time.
        Quadrature in time splits its intervals there.
        """
        return []

    def energy(self, t: float) -> float:
        return self.at(t).energy()


class DissipativeTrajectory(Trajectory):
    """
    The dissipative solution issued from a flow state.
    """

    REGISTER_NAME = "dissipative"

    def __init__(self, state: Union[FlowState, PiecewiseLinearFn]):
        if isinstance(state, PiecewiseLinearFn):
            state = FlowState(state)
        self.state = state

    @override
    def at(self, t: float) -> PiecewiseLinearFn:
        return self.state.solve(t)

    @override
    def kinks(self, t1: float, t2: float) -> List[float]:
        epochs = self.state.epochs
        return epochs[(epochs > t1) & (epochs < t2)].tolist()


def conservative_witness(t: float) -> PiecewiseLinearFn:
    """
    The energy-conserving solution issued from zero data: `-2t` for
    `x <= -t²`, `2x/t` for `|x| < t²` and `2t` for `x >= t²`. Its energy is 8
    at every positive time and 0 at `t = 0`.
    """
    t = _check_time(t)
    if t == 0:
        return PiecewiseLinearFn.constant(0.0)
    return PiecewiseLinearFn.from_increments(
        -(t**2), -2.0 * t, numpy.array([2.0 * t**2]), numpy.array([4.0 * t])
    )


class ConservativeWitness(Trajectory):
    """
    The conservative continuation from zero data, in which energy 8 appears
    out of nothing at `t = 0`.
    """

    REGISTER_NAME = "witness112"

    @override
    def at(self, t: float) -> PiecewiseLinearFn:
        return conservative_witness(t)
