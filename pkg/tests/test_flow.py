import re

import numpy
import pytest

from hsflow.experiments import example1_u, example1_v
from hsflow.flow import (
    CharacteristicMap,
    FlowState,
    blowup_time,
    gradient_along,
    phi,
    semigroup_check,
    solve,
    u_along,
    xi,
)
from hsflow.plfunc import PiecewiseLinearFn


@pytest.fixture
def hat_state(hat_function):
    return FlowState(hat_function)


def _survivor_masses_close(st, t):
    e = st.solve(t).energy()
    return e == pytest.approx(st.survivor_mass(t), rel=1e-12, abs=1e-12)


class TestBlowupTime:
    def test_scalar(self):
        assert blowup_time(-3) == pytest.approx(2 / 3)
        assert blowup_time(-2) == 1
        assert blowup_time(5) == numpy.inf
        assert blowup_time(0) == numpy.inf

    def test_vectorized(self):
        assert numpy.array_equal(blowup_time([-1, 0, 2, -4]), [2, numpy.inf, numpy.inf, 0.5])

    def test_against_riccati_integration(self):
        # ż = -z²/2 from z(0) = -2, integrated until the gradient is huge.
        z, t, h = -2.0, 0.0, 1e-5
        while z > -1e6:
            z -= h * z**2 / 2
            t += h
        assert t == pytest.approx(blowup_time(-2), abs=1e-3)


class TestFlowState:
    def test_constructor(self, hat_state):
        assert numpy.array_equal(hat_state.blowup_times, [numpy.inf, 2])
        assert numpy.array_equal(hat_state.epochs, [2])
        assert hat_state.first_blowup_time == 2
        assert hat_state.total_mass == 2
        assert FlowState(PiecewiseLinearFn([0, 1], [0, 1])).first_blowup_time == numpy.inf

        with pytest.raises(TypeError, match="`initial` must be a `PiecewiseLinearFn`"):
            FlowState([0, 1])

    def test_negative_times(self, hat_state):
        with pytest.raises(ValueError, match=re.escape("Time `t` must be a finite nonnegative number")):
            hat_state.solve(-1)
        with pytest.raises(ValueError, match="nonnegative"):
            hat_state.phi(numpy.nan, 0)

    def test_alive(self, hat_state):
        assert numpy.array_equal(hat_state.alive(1.9), [True, True])
        # A segment is dead at its own blow-up time.
        assert numpy.array_equal(hat_state.alive(2), [True, False])
        assert hat_state.survivor_mass(3) == 1

    def test_gradient_along(self):
        st = FlowState(PiecewiseLinearFn([0, 1], [0, -2]))
        assert gradient_along(st, 0.5, 0.5) == pytest.approx(-4)
        assert gradient_along(st, 1.5, 0.5) == -numpy.inf
        assert st.gradient_along(1, 0.5) == -numpy.inf
        assert st.gradient_along(3, 5) == 0

    def test_phi(self, hat_state):
        assert phi(hat_state, 0, 2) == 0.5
        assert phi(hat_state, 0, -2) == -0.5
        assert phi(hat_state, 3, 2) == 0.25

    def test_phi_matches_nonlocal_term(self, corpus):
        for f in corpus[:10]:
            st = FlowState(f)
            grid = numpy.linspace(f.x[0] - 1, f.x[-1] + 1, 101)
            assert numpy.allclose(st.phi(0, grid), f.nonlocal_term(grid), rtol=0, atol=1e-12)

    def test_characteristics(self, hat_state):
        assert xi(hat_state, 1, -2) == pytest.approx(-2.25)
        assert u_along(hat_state, 1, -2) == pytest.approx(-0.5)
        assert xi(hat_state, 2, 0) == pytest.approx(2)
        assert hat_state.xi(0, 0.3) == 0.3

        cmap = hat_state.characteristics(1)
        assert isinstance(cmap, CharacteristicMap)
        assert numpy.allclose(cmap.jacobian, [2.25, 0.25])
        assert cmap.is_nondecreasing
        assert cmap(-2) == pytest.approx(-2.25)
        assert cmap(10) == pytest.approx(10 + (cmap.xi[-1] - 1))

        dead = hat_state.characteristics(3)
        assert numpy.allclose(dead.jacobian, [(1 + 1.5) ** 2, 0])
        assert dead.xi[1] == pytest.approx(dead.xi[2])

    def test_characteristic_odes(self, small_corpus):
        # ξ_t = u along characteristics, and u_t = φ there.
        h = 1e-5
        for f in small_corpus:
            st = FlowState(f)
            t = 0.5 * min(st.first_blowup_time, 1.0)
            y = numpy.linspace(f.x[0] - 0.5, f.x[-1] + 0.5, 17)
            dxi = (st.xi(t + h, y) - st.xi(t - h, y)) / (2 * h)
            du = (st.u_along(t + h, y) - st.u_along(t - h, y)) / (2 * h)
            assert numpy.allclose(dxi, st.u_along(t, y), atol=1e-5)
            assert numpy.allclose(du, st.phi(t, y), atol=1e-5)

    def test_monotone_characteristics(self, corpus):
        for f in corpus:
            st = FlowState(f)
            for t in (0.0, 0.1, 0.7, 2.0, 10.0):
                cmap = st.characteristics(t)
                # Collapsed segments map to a point up to rounding.
                assert numpy.all(numpy.diff(cmap.xi) >= -1e-9 * max(1.0, numpy.abs(cmap.xi).max()))
                assert numpy.all(cmap.jacobian >= 0)


class TestSolve:
    def test_hat(self, hat_state, hat_function):
        assert solve(hat_state, 0) == hat_function
        assert [hat_state.solve(t).energy() for t in (0, 1, 2, 3)] == pytest.approx([2, 2, 1, 1])

        solved = hat_state.solve(1)
        assert numpy.allclose(solved.x, [-1.25, 1.0, 1.25])
        assert numpy.allclose(solved.slopes, [2 / 3, -2])

        collapsed = hat_state.solve(3)
        assert collapsed.n_segments == 1
        assert collapsed.slopes[0] == pytest.approx(2 / 5)

    def test_survivors_below_float_spacing(self):
        # Just before blow-up the steep segment is far shorter than the spacing
        # of floats near x = 1000, yet it still carries energy 4.
        st = FlowState(PiecewiseLinearFn([1000, 1001, 1002], [0, -2, -1]))
        t = 1 - 1e-7
        assert numpy.array_equal(st.alive(t), [True, True])

        solved = st.solve(t)
        assert solved.n_segments == 2
        assert solved.lengths[0] == pytest.approx(1e-14, rel=1e-6)
        assert solved.energy() == pytest.approx(st.survivor_mass(t), rel=1e-12)
        assert solved.energy() == pytest.approx(5, rel=1e-9)
        assert solved.tail_values[1] == pytest.approx(st.u_along(t, 1002), abs=1e-12)
        assert solved(st.xi(t, 1002)) == pytest.approx(st.u_along(t, 1002), abs=1e-12)

    def test_zero_data(self):
        st = FlowState(PiecewiseLinearFn.constant(0.0))
        for t in (0, 0.5, 1, 2, 5):
            assert st.solve(t).sup_norm() == 0
            assert st.solve(t).energy() == 0

    def test_example1_energies(self):
        for n in (1, 4, 16):
            v = FlowState(example1_v(n))
            u = FlowState(example1_u(n))
            assert v.first_blowup_time == pytest.approx(2 / 3)
            assert u.first_blowup_time == pytest.approx(1)
            assert v.solve(0.8).energy() == pytest.approx(1.5, rel=1e-12)
            assert u.solve(0.8).energy() == pytest.approx(3, rel=1e-12)

    def test_solution_along_characteristics(self, corpus):
        for f in corpus[:20]:
            st = FlowState(f)
            y = numpy.linspace(f.x[0] - 1, f.x[-1] + 1, 41)
            for t in (0.3, 1.0, 2.5):
                solved = st.solve(t)
                assert numpy.allclose(solved(st.xi(t, y)), st.u_along(t, y), atol=1e-6)

    def test_energy_identity(self, corpus):
        rng = numpy.random.default_rng(1)
        for f in corpus:
            st = FlowState(f)
            for t in rng.uniform(0, 3, size=20):
                assert _survivor_masses_close(st, t)

    def test_energy_nonincreasing(self, corpus):
        for f in corpus[:10]:
            curve = FlowState(f).energy_curve([0, 0.5, 1, 3])
            assert list(curve.columns) == ["t", "energy", "survivor_mass"]
            assert numpy.all(numpy.diff(curve["energy"]) <= 1e-12 * max(1, f.energy()))
            assert numpy.allclose(curve["energy"], curve["survivor_mass"], rtol=1e-12)

    def test_holder_property(self, corpus):
        rng = numpy.random.default_rng(2)
        for f in corpus:
            st = FlowState(f)
            for t in (0.2, 1.5):
                solved = st.solve(t)
                pairs = rng.uniform(solved.x[0] - 1, solved.x[-1] + 1, size=(10_000, 2))
                assert solved.holder_bound_check(pairs)


class TestSemigroup:
    def test_hat(self, hat_state):
        assert semigroup_check(hat_state, 1, 1.5) <= 1e-8
        assert semigroup_check(hat_state, 0, 3) <= 1e-12

    def test_corpus(self, corpus):
        rng = numpy.random.default_rng(3)
        for f in corpus:
            st = FlowState(f)
            horizon = min(3.0, 2 * st.epochs[-1]) if len(st.epochs) else 3.0
            for s, t in rng.uniform(0, horizon, size=(4, 2)):
                assert semigroup_check(st, s, t) <= 1e-8

    def test_negative_times(self, hat_state):
        with pytest.raises(ValueError, match="`s`"):
            semigroup_check(hat_state, -1, 1)
