from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Iterable, List, Tuple

import numpy
import pandas

from hsflow.flow import FlowState, _check_time

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class DissipationAtom:
    """
    A point mass of the dissipation measure: the energy `mass` removed at
    time `epoch` from the point `location` where a segment collapsed.
    """

    epoch: float
    location: float
    mass: float

    def __post_init__(self) -> None:
        if not numpy.isfinite(self.epoch):
            raise ValueError("Dissipation atoms must have a finite `epoch`.")
        if not self.mass > 0:
            raise ValueError("Dissipation atoms must carry a positive `mass`.")


def dissipation_atoms(st: FlowState) -> List[DissipationAtom]:
    """
    One atom per segment with negative initial slope, ordered by epoch and
    then by location. Segments dying at the same epoch keep separate atoms.
    """
    atoms = []
    for k in numpy.flatnonzero(numpy.isfinite(st.blowup_times)):
        epoch = float(st.blowup_times[k])
        atoms.append(
            DissipationAtom(
                epoch=epoch,
                location=float(st.xi(epoch, st.initial.x[k])),
                mass=float(st.masses[k]),
            )
        )
    return sorted(atoms, key=lambda atom: (atom.epoch, atom.location))


def dissipated_mass(st: FlowState, t1: float, t2: float) -> float:
    """
    The mass of the atoms released in the window `(t1, t2]`.
    """
    released = st.alive(t1) & ~st.alive(t2)
    return float(numpy.sum(st.masses[released]))


def energy_balance(st: FlowState, t1: float, t2: float) -> Tuple[float, float]:
    """
    Compare the energy lost by the solution between `t1` and `t2` with the
    mass of the dissipation atoms released in `(t1, t2]`.

    Returns:
        The pair `(lhs, rhs)`, where `lhs = energy(u(t1)) - energy(u(t2))` and
        `rhs` is the released mass.
    """
    t1, t2 = _check_time(t1, "t1"), _check_time(t2, "t2")
    if t2 < t1:
        raise ValueError(f"Expected `t1 <= t2`, got {t1!r} and {t2!r}.")
    lhs = st.solve(t1).energy() - st.solve(t2).energy()
    return lhs, dissipated_mass(st, t1, t2)


def atoms_frame(atoms: Iterable[DissipationAtom]) -> pandas.DataFrame:
    return pandas.DataFrame(
        [(atom.epoch, atom.location, atom.mass) for atom in atoms],
        columns=["epoch", "location", "mass"],
    )


def balance_frame(st: FlowState, times: Iterable[float]) -> pandas.DataFrame:
    """
    The energy balance over each window between consecutive (sorted) `times`.
    """
    times = sorted(_check_time(t) for t in times)
    rows = [(t1, t2, *energy_balance(st, t1, t2)) for t1, t2 in zip(times[:-1], times[1:])]
    return pandas.DataFrame(rows, columns=["t1", "t2", "lhs", "rhs"])
