import pytest

from hsflow.experiments import Example2, example2, lower_bound
from hsflow.metric import MetricParams


class TestExample2:
    def test_lower_bound(self):
        assert lower_bound(1, 8) == pytest.approx(7 / 64)
        assert lower_bound(2, 16) == pytest.approx(0.109375)
        assert lower_bound(1, 10**6) == pytest.approx(1 / 8, rel=1e-5)

    def test_m1_n8(self):
        result = example2(1, 8)
        assert result.passed, result.failed_flags
        assert result.params["epsilon"] == 1 / 64
        assert result.outputs["distance"] >= 7 / 64
        assert result.outputs["distance_refined"] >= 7 / 64
        assert list(result.artifacts["distance_vs_epsilon"].columns) == [
            "epsilon",
            "distance",
            "lower_bound",
        ]

    def test_contrast(self):
        result = example2(4, 8, epsilon=1 / 64, contrast=True)
        assert result.flags["assignment_below_distance"]
        assert result.outputs["assignment"] < result.outputs["distance"]
        assert result.notes == []

    def test_kappa0(self):
        result = example2(2, 4, mp=MetricParams(3.0))
        assert result.params["kappa0"] == 3
        assert result.flags["lower_bound"]

    def test_validation(self):
        with pytest.raises(ValueError, match="1 <= m < n"):
            example2(4, 4)

    def test_scenario(self):
        result = Example2().run({"m": 2, "n": 16})
        assert result.passed
        assert result.outputs["distance"] >= 0.10
