"""
Weak formulations of the energy law, checked by quadrature.

For a test function `φ` write `E_φ(t) = ∫ u_x²(t) φ(t) dx` and
`Φ(t) = ∫ (u_x² φ_t + u u_x² φ_x)(t) dx`. Dissipative solutions satisfy
`E_φ(t2) - E_φ(t1) <= ∫_{t1}^{t2} Φ(t) dt` for nonnegative `φ`; solutions which
conserve energy satisfy `∫ Φ(t) dt = 0` whenever `φ` is supported in `t > 0`.
"""

from __future__ import annotations

import dataclasses
import logging
from typing import Tuple

import numpy

from hsflow.flow import FlowState
from hsflow.plfunc import PiecewiseLinearFn
from hsflow.utils.quadrature import gauss_legendre, integrate_refined

from .test_functions import BumpTestFunction, TestFunction
from .trajectories import ConservativeWitness, DissipativeTrajectory, Trajectory

logger = logging.getLogger(__name__)

QUADRATURE_TOLERANCE = 1e-3

# Three nodes already integrate the polynomial bump against linear `u` exactly.
SPACE_ORDER = 4


def _weighted_integrals(
    f: PiecewiseLinearFn, tf: TestFunction, t: float
) -> Tuple[float, float]:
    (t_lo, t_hi), (x_lo, x_hi) = tf.support
    if not t_lo < t < t_hi or f.n_segments == 0:
        return 0.0, 0.0
    left = numpy.maximum(f.x[:-1], x_lo)
    right = numpy.minimum(f.x[1:], x_hi)
    overlap = right > left
    # Survivors shorter than the float spacing share both breakpoints and
    # act as point masses.
    pinched = (f.x[1:] == f.x[:-1]) & (f.x[:-1] > x_lo) & (f.x[:-1] < x_hi)

    energy, flux = 0.0, 0.0
    if numpy.any(overlap):
        left, right = left[overlap], right[overlap]
        density = f.masses[overlap] / f.lengths[overlap]

        nodes, weights = gauss_legendre(SPACE_ORDER)
        half = 0.5 * (right - left)
        points = 0.5 * (right + left)[:, None] + half[:, None] * nodes[None, :]
        phi = tf(t, points)
        phi_t, phi_x = tf.partials(t, points)
        transport = phi_t + f(points.ravel()).reshape(points.shape) * phi_x

        scale = density * half
        energy += float(numpy.sum(scale * (phi @ weights)))
        flux += float(numpy.sum(scale * (transport @ weights)))
    if numpy.any(pinched):
        at = f.x[:-1][pinched]
        mass = f.masses[pinched]
        phi_t, phi_x = tf.partials(t, at)
        energy += float(numpy.sum(mass * tf(t, at)))
        flux += float(numpy.sum(mass * (phi_t + numpy.asarray(f(at)) * phi_x)))
    return energy, flux


def weighted_energy(f: PiecewiseLinearFn, tf: TestFunction, t: float) -> float:
    """
    `∫ u_x² φ(t, x) dx` for the function `f` taken as the state at time `t`.
    """
    return _weighted_integrals(f, tf, t)[0]


def energy_flux(f: PiecewiseLinearFn, tf: TestFunction, t: float) -> float:
    """
    `∫ (u_x² φ_t + u u_x² φ_x)(t, x) dx` for the function `f` taken as the
    state at time `t`.
    """
    return _weighted_integrals(f, tf, t)[1]


def dissipation_residual(
    trajectory: Trajectory,
    tf: TestFunction,
    t1: float,
    t2: float,
    tolerance: float = QUADRATURE_TOLERANCE,
) -> float:
    """
    The residual `∫_{t1}^{t2} Φ dt - (E_φ(t2) - E_φ(t1))` of the dissipation
    inequality along `trajectory`; nonnegative for dissipative solutions.

    Raises:
        QuadratureUnresolved: If the time integral does not stabilise.
    """
    lhs = weighted_energy(trajectory.at(t2), tf, t2) - weighted_energy(
        trajectory.at(t1), tf, t1
    )
    (t_lo, t_hi), _ = tf.support
    lo, hi = max(t1, t_lo), min(t2, t_hi)
    rhs = 0.0
    if hi > lo:
        rhs = integrate_refined(
            lambda t: energy_flux(trajectory.at(t), tf, t),
            [lo, *trajectory.kinks(lo, hi), hi],
            tolerance=tolerance / 10,
        )
    logger.debug("Dissipation residual on (%r, %r]: rhs=%r lhs=%r", t1, t2, rhs, lhs)
    return rhs - lhs


def dissipation_inequality_check(
    st: FlowState,
    tf: TestFunction,
    t1: float,
    t2: float,
    tolerance: float = QUADRATURE_TOLERANCE,
) -> float:
    """
    The signed residual of the dissipation inequality for the solver's
    trajectory between `0 < t1 < t2`. It is expected to be at least
    `-tolerance`, and to match `defect_pairing` up to quadrature error.
    """
    if not 0 < t1 < t2:
        raise ValueError(f"Expected `0 < t1 < t2`, got {t1!r} and {t2!r}.")
    return dissipation_residual(DissipativeTrajectory(st), tf, t1, t2, tolerance)


def defect_pairing(st: FlowState, tf: TestFunction, t1: float, t2: float) -> float:
    """
    The pairing of the dissipation measure restricted to `(t1, t2]` with the
    test function, i.e. `Σ m_k φ(T_k, location_k)` over the atoms released in
    that window. This is the exact value of the dissipation residual.
    """
    released = st.alive(t1) & ~st.alive(t2)
    total = 0.0
    for k in numpy.flatnonzero(released):
        epoch = float(st.blowup_times[k])
        total += float(st.masses[k]) * float(tf(epoch, st.xi(epoch, st.initial.x[k])))
    return total


def conservative_witness_check(
    tf: TestFunction, tolerance: float = QUADRATURE_TOLERANCE
) -> Tuple[float, float]:
    """
    Check the conservative zero-data solution against both weak formulations.

    Args:
        tf: A test function supported in `t > 0`, used for the distributional
            conservation law. When it is a `BumpTestFunction`, its radii are
            reused for a bump centred at the origin which measures how much
            the solution violates the dissipation inequality from `t1 = 0`.

    Returns:
        The pair `(identity_residual, dissipativity_violation)`. The first is
        the absolute value of the conservation integral and is expected to
        vanish; the second is positive (about `8 φ(0, 0)`), since energy 8
        appears at `t = 0`.
    """
    (t_lo, t_hi), _ = tf.support
    if t_lo <= 0:
        raise ValueError(
            "The conservation identity is checked for test functions supported in `t > 0`."
        )
    witness = ConservativeWitness()
    identity_residual = abs(dissipation_residual(witness, tf, t_lo, t_hi, tolerance))

    if isinstance(tf, BumpTestFunction):
        origin_bump = dataclasses.replace(tf, t0=0.0, x0=0.0)
    else:
        origin_bump = BumpTestFunction(t0=0.0, x0=0.0, rt=t_hi - t_lo, rx=1.0)
    violation = -dissipation_residual(
        witness, origin_bump, 0.0, origin_bump.support[0][1], tolerance
    )
    return identity_residual, violation
