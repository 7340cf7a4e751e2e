import pandas
import pytest

from hsflow.errors import ContractFailed, ImplementationNotFound
from hsflow.experiments import (
    Example1,
    Example2,
    HamiltonianCrosscheck,
    PeakonDrift,
    Scenario,
    ScenarioResult,
    ZeroData,
)


class TestScenarioResult:
    @pytest.fixture
    def result(self):
        return ScenarioResult(
            name="demo",
            params={"n": 1},
            outputs={"value": 0.5},
            flags={"b": True, "a": False},
            artifacts={"table": pandas.DataFrame({"x": [1.0]})},
        )

    def test_flags(self, result):
        assert not result.passed
        assert result.failed_flags == ["a"]
        with pytest.raises(ContractFailed, match="`demo` failed its checks: a"):
            result.check()

        result.flags["a"] = True
        assert result.check() is result

    def test_to_dict(self, result):
        assert result.to_dict() == {
            "name": "demo",
            "params": {"n": 1},
            "outputs": {"value": 0.5},
            "flags": {"a": False, "b": True},
            "passed": False,
            "artifacts": ["table"],
            "notes": [],
        }

    def test_no_flags(self):
        assert ScenarioResult(name="empty", params={}).passed


class TestScenarioRegistry:
    def test_for_name(self):
        assert Scenario.for_name("example1") is Example1
        assert Scenario.for_name("example2") is Example2
        assert Scenario.for_name("peakon_drift") is PeakonDrift
        assert Scenario.for_name("hamiltonian_crosscheck") is HamiltonianCrosscheck
        assert Scenario.for_name("zero_data") is ZeroData
        assert Scenario.for_name(ZeroData) is ZeroData

        with pytest.raises(ImplementationNotFound, match="No scenario is registered under 'example3'"):
            Scenario.for_name("example3")
