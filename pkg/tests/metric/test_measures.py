import numpy
import pytest

from hsflow.metric import EnergyAtomSeq, quantize
from hsflow.plfunc import PiecewiseLinearFn, sawtooth


class TestQuantize:
    def test_hat(self, hat_function):
        atoms = quantize(hat_function, 0.5)
        assert len(atoms) == 4
        assert numpy.allclose(atoms.x, [-0.75, -0.25, 0.25, 0.75])
        assert numpy.allclose(atoms.u, [0.25, 0.75, 0.75, 0.25])
        assert numpy.allclose(atoms.w, [numpy.pi / 4] * 2 + [-numpy.pi / 4] * 2)
        assert numpy.array_equal(atoms.mass, [0.5] * 4)
        assert numpy.array_equal(atoms.segment, [0, 0, 1, 1])

    def test_remainder(self, hat_function):
        atoms = quantize(hat_function, 0.3)
        assert len(atoms) == 7
        assert numpy.allclose(atoms.mass[:-1], 0.3)
        assert atoms.mass[-1] == pytest.approx(0.2)
        assert atoms.total_mass == pytest.approx(2, rel=1e-15)

    def test_large_quantum(self, hat_function):
        atoms = quantize(hat_function, 5)
        assert len(atoms) == 1
        assert atoms.mass[0] == 2

    def test_constant(self):
        atoms = quantize(PiecewiseLinearFn.constant(1.0), 0.1)
        assert len(atoms) == 0
        assert atoms.total_mass == 0

    def test_flat_segments_carry_no_atoms(self):
        f = PiecewiseLinearFn([0, 1, 2, 3], [0, 1, 1, 0])
        atoms = quantize(f, 0.25)
        assert not numpy.any(atoms.segment == 1)
        assert atoms.total_mass == pytest.approx(2)

    def test_total_mass(self, corpus):
        for f in corpus:
            for epsilon in (0.5, 0.05):
                atoms = quantize(f, epsilon)
                assert atoms.total_mass == pytest.approx(f.energy(), rel=1e-12)
                assert numpy.all(numpy.diff(atoms.x) >= 0)
                assert numpy.all(atoms.mass[:-1] == pytest.approx(epsilon))

    def test_validation(self, hat_function):
        with pytest.raises(ValueError, match="`epsilon` must be positive"):
            quantize(hat_function, 0)


class TestEnergyAtomSeq:
    def test_subsample(self):
        atoms = quantize(sawtooth(2), 0.05)
        coarse = atoms.subsample(4)
        assert len(coarse) == 5
        assert coarse.epsilon == pytest.approx(0.2)
        assert coarse.total_mass == pytest.approx(atoms.total_mass)

    def test_to_frame(self, hat_function):
        frame = quantize(hat_function, 0.5).to_frame()
        assert list(frame.columns) == ["x", "u", "w", "mass", "segment"]
        assert len(frame) == 4

    def test_empty(self):
        assert len(EnergyAtomSeq.empty(0.1)) == 0
