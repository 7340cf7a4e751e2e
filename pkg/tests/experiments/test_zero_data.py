import pytest

from hsflow.experiments import ZeroData, zero_data_suite


class TestZeroData:
    def test_suite(self):
        result = zero_data_suite()
        assert result.passed, result.failed_flags
        assert result.outputs["dissipative_sup"] == 0
        assert result.outputs["witness_energies"] == pytest.approx([0, 8, 8, 8, 8])
        assert result.outputs["witness_slopes"] == pytest.approx([4, 2, 1, 0.4])
        assert result.outputs["dissipativity_violation"] == pytest.approx(8, rel=1e-2)

    def test_scenario(self):
        assert ZeroData().run({}).name == "zero_data"
