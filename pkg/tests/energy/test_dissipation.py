import numpy
import pytest

from hsflow.energy import (
    DissipationAtom,
    atoms_frame,
    balance_frame,
    dissipated_mass,
    dissipation_atoms,
    energy_balance,
)
from hsflow.experiments import example1_v
from hsflow.flow import FlowState
from hsflow.plfunc import PiecewiseLinearFn


@pytest.fixture
def hat_state(hat_function):
    return FlowState(hat_function)


class TestDissipationAtoms:
    def test_hat(self, hat_state):
        (atom,) = dissipation_atoms(hat_state)
        assert atom.epoch == 2
        assert atom.location == pytest.approx(2)
        assert atom.mass == 1

    def test_nondecreasing_data(self):
        assert dissipation_atoms(FlowState(PiecewiseLinearFn([0, 1, 2], [0, 1, 1]))) == []

    def test_simultaneous_blowups(self):
        atoms = dissipation_atoms(FlowState(example1_v(3)))
        # One atom per collapsing segment, ordered by epoch.
        assert [atom.epoch for atom in atoms] == pytest.approx([2 / 3] * 3 + [2] * 3)
        assert sum(atom.mass for atom in atoms[:3]) == pytest.approx(1.5)
        locations = [atom.location for atom in atoms[:3]]
        assert locations == sorted(locations)

    def test_validation(self):
        with pytest.raises(ValueError, match="finite `epoch`"):
            DissipationAtom(epoch=numpy.inf, location=0.0, mass=1.0)
        with pytest.raises(ValueError, match="positive `mass`"):
            DissipationAtom(epoch=1.0, location=0.0, mass=0.0)

    def test_frame(self, hat_state):
        frame = atoms_frame(dissipation_atoms(hat_state))
        assert list(frame.columns) == ["epoch", "location", "mass"]
        assert frame.shape == (1, 3)
        assert atoms_frame([]).shape == (0, 3)


class TestEnergyBalance:
    def test_hat(self, hat_state):
        assert energy_balance(hat_state, 1, 3) == pytest.approx((1, 1))
        assert energy_balance(hat_state, 0, 1.5) == pytest.approx((0, 0))
        # Released in (t1, t2]: the atom at t = 2 belongs to the window ending there.
        assert dissipated_mass(hat_state, 1, 2) == 1
        assert dissipated_mass(hat_state, 2, 3) == 0

    def test_example1(self):
        st = FlowState(example1_v(4))
        assert energy_balance(st, 0.5, 0.7) == pytest.approx((1.5, 1.5))

    def test_order(self, hat_state):
        with pytest.raises(ValueError, match="Expected `t1 <= t2`"):
            energy_balance(hat_state, 2, 1)

    def test_random_partitions(self, corpus):
        rng = numpy.random.default_rng(4)
        for f in corpus:
            st = FlowState(f)
            times = numpy.sort(rng.uniform(0, 3, size=8))
            frame = balance_frame(st, times)
            assert list(frame.columns) == ["t1", "t2", "lhs", "rhs"]
            assert len(frame) == 7
            assert numpy.allclose(frame["lhs"], frame["rhs"], rtol=0, atol=1e-12 * max(1, f.energy()))

    def test_total(self, corpus):
        for f in corpus[:10]:
            st = FlowState(f)
            released = sum(atom.mass for atom in dissipation_atoms(st))
            horizon = st.epochs.max() + 1 if len(st.epochs) else 0.0
            assert st.solve(horizon).energy() + released == pytest.approx(f.energy(), rel=1e-12)
