from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy
import pandas

from hsflow.plfunc import PiecewiseLinearFn

from .space import angle

logger = logging.getLogger(__name__)

# Remainders below this fraction of the quantum are absorbed by the last atom.
REMAINDER_TOLERANCE = 1e-9


@dataclass(frozen=True, eq=False)
class EnergyAtomSeq:
    """
    A quantization of the energy measure of a piecewise-linear function into
    atoms of mass `epsilon` (the final atom may be lighter), ordered by
    position.

    Attributes:
        x: The atom positions (mass midpoints).
        u: The function values at the atom positions.
        w: The angles `arctan(u_x)` of the segments containing the atoms.
        mass: The atom masses.
        segment: The index of the source segment of each atom.
        epsilon: The quantum.
    """

    x: numpy.ndarray
    u: numpy.ndarray
    w: numpy.ndarray
    mass: numpy.ndarray
    segment: numpy.ndarray
    epsilon: float

    def __len__(self) -> int:
        return len(self.mass)

    @property
    def total_mass(self) -> float:
        return float(numpy.sum(self.mass))

    @classmethod
    def empty(cls, epsilon: float) -> EnergyAtomSeq:
        return cls(
            x=numpy.empty(0),
            u=numpy.empty(0),
            w=numpy.empty(0),
            mass=numpy.empty(0),
            segment=numpy.empty(0, dtype=int),
            epsilon=epsilon,
        )

    def subsample(self, step: int) -> EnergyAtomSeq:
        """
        Keep every `step`-th atom, scaling masses so that the total mass is
        preserved.
        """
        keep = numpy.arange(0, len(self), step)
        mass = self.mass[keep] * (self.total_mass / numpy.sum(self.mass[keep]))
        return EnergyAtomSeq(
            x=self.x[keep],
            u=self.u[keep],
            w=self.w[keep],
            mass=mass,
            segment=self.segment[keep],
            epsilon=self.epsilon * step,
        )

    def to_frame(self) -> pandas.DataFrame:
        return pandas.DataFrame(
            {
                "x": self.x,
                "u": self.u,
                "w": self.w,
                "mass": self.mass,
                "segment": self.segment,
            }
        )


def quantize(u: PiecewiseLinearFn, epsilon: float) -> EnergyAtomSeq:
    """
    Cut the cumulative energy of `u` at multiples of `epsilon` and place one
    atom at the mass midpoint of each chunk.

    The angle of an atom is that of the segment containing its midpoint, even
    when its chunk straddles a breakpoint. Functions without energy yield an
    empty sequence.

    Args:
        u: The function whose energy measure is quantized.
        epsilon: The quantum (atom mass).
    """
    if not epsilon > 0:
        raise ValueError(f"The quantum `epsilon` must be positive, not {epsilon!r}.")
    cumulative = u.cumulative_masses
    total = float(cumulative[-1])
    if total <= 0:
        logger.debug("Quantizing a function without energy gives no atoms.")
        return EnergyAtomSeq.empty(epsilon)

    n_full = int(numpy.floor(total / epsilon))
    remainder = total - n_full * epsilon
    if remainder > REMAINDER_TOLERANCE * epsilon or n_full == 0:
        n_atoms = n_full + 1
    else:
        n_atoms = n_full
    cuts = numpy.minimum(numpy.arange(n_atoms + 1) * epsilon, total)
    cuts[-1] = total
    mass = numpy.diff(cuts)
    midpoints = 0.5 * (cuts[1:] + cuts[:-1])

    # Flat segments carry no mass, so `side="right"` skips them.
    segment = numpy.searchsorted(cumulative, midpoints, side="right") - 1
    segment = numpy.clip(segment, 0, u.n_segments - 1)
    fraction = (midpoints - cumulative[segment]) / u.masses[segment]
    x = u.x[segment] + fraction * u.lengths[segment]
    logger.debug("Quantized energy %r into %d atoms of mass %r.", total, n_atoms, epsilon)
    return EnergyAtomSeq(
        x=x,
        u=numpy.asarray(u(x)),
        w=numpy.asarray(angle(u.slopes[segment])),
        mass=mass,
        segment=segment,
        epsilon=float(epsilon),
    )
