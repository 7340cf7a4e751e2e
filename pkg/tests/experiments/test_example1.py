import numpy
import pytest

from hsflow.experiments import Example1, example1, example1_u, example1_v
from hsflow.experiments.example1 import expected_energy_u, expected_energy_v


class TestData:
    def test_profiles(self):
        u, v = example1_u(4), example1_v(4)
        assert u.energy() == pytest.approx(3)
        assert v.energy() == pytest.approx(3)
        assert u.sup_distance(v) <= 2 / 4
        assert u(-1) == v(-1) == 0
        assert u(0) == v(0) == 1
        assert u(1) == v(1) == 0

    def test_cells(self):
        u = example1_u(2)
        assert numpy.allclose(u.x, [-1, 0, 0.25, 0.5, 0.75, 1])
        assert numpy.allclose(u.slopes, [1, -2, 0, -2, 0])
        assert numpy.allclose(example1_v(1).slopes, [1, -3, 0, -1])

        with pytest.raises(ValueError, match="positive integer"):
            example1_u(0)

    def test_expected_energies(self):
        assert expected_energy_u(0.5) == 3
        assert expected_energy_u(1) == 1
        assert expected_energy_v(0.5) == 3
        assert expected_energy_v(0.8) == 1.5
        assert expected_energy_v(3) == 1


class TestExample1:
    def test_n4(self):
        result = example1(4)
        assert result.passed, result.failed_flags
        assert result.outputs["energy_u"] == pytest.approx(3)
        assert result.outputs["energy_v"] == pytest.approx(1.5)
        assert result.outputs["first_blowup_v"] == pytest.approx(2 / 3)
        assert result.outputs["distance"] > 0.1
        assert list(result.artifacts["energy_curve"].columns) == ["t", "energy_u", "energy_v"]

    @pytest.mark.slow
    @pytest.mark.parametrize("n", [16, 64])
    def test_larger_n(self, n):
        result = example1(n)
        assert result.passed, result.failed_flags
        assert result.outputs["sup_distance"] <= 2 / n

    def test_before_blowup(self):
        result = example1(2, t=0.5)
        assert "distance_separated" not in result.flags
        assert result.flags["energy_v"]
        assert result.outputs["energy_v"] == pytest.approx(3)

    def test_scenario(self):
        result = Example1().run({"n": 4, "t": 0.8})
        assert result.name == "example1"
        assert result.params["n"] == 4
        assert result.passed
