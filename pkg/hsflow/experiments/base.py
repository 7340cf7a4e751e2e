from __future__ import annotations

import inspect
from abc import abstractmethod
from dataclasses import dataclass, field
from typing import Any, Dict, List, Mapping, Optional, Type, Union

import pandas
from interface_meta import InterfaceMeta

from hsflow.errors import ContractFailed, ImplementationNotFound


@dataclass
class ScenarioResult:
    """
    The outcome of a scripted scenario.

    Attributes:
        name: The scenario name.
        params: The parameters the scenario was run with.
        outputs: Scalar outputs (energies, distances, bounds, ...).
        flags: Named pass/fail checks.
        artifacts: Tables to be written next to the result, by name.
        notes: Free-form remarks, e.g. about competing readings of a formula.
    """

    name: str
    params: Dict[str, Any]
    outputs: Dict[str, Any] = field(default_factory=dict)
    flags: Dict[str, bool] = field(default_factory=dict)
    artifacts: Dict[str, pandas.DataFrame] = field(default_factory=dict)
    notes: List[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(self.flags.values())

    @property
    def failed_flags(self) -> List[str]:
        return sorted(name for name, ok in self.flags.items() if not ok)

    def check(self) -> ScenarioResult:
        """
        Raises:
            ContractFailed: If any flag is false.
        """
        if not self.passed:
            raise ContractFailed(
                f"Scenario `{self.name}` failed its checks: {', '.join(self.failed_flags)}."
            )
        return self

    def to_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "params": self.params,
            "outputs": self.outputs,
            "flags": {name: bool(ok) for name, ok in self.flags.items()},
            "passed": self.passed,
            "artifacts": sorted(self.artifacts),
            "notes": list(self.notes),
        }


class ScenarioMeta(InterfaceMeta):
    INTERFACE_RAISE_ON_VIOLATION = True

    REGISTERED_NAMES: Dict[str, Type[Scenario]] = {}

    def __register_implementation__(cls) -> None:
        if "REGISTER_NAME" in cls.__dict__ and cls.REGISTER_NAME:
            cls.REGISTERED_NAMES[cls.REGISTER_NAME] = cls

    def for_name(cls, name: Union[str, Type[Scenario]]) -> Type[Scenario]:
        if inspect.isclass(name) and issubclass(name, Scenario):
            return name
        if name not in cls.REGISTERED_NAMES:
            raise ImplementationNotFound(
                f"No scenario is registered under {name!r}. Available scenarios are: {sorted(cls.REGISTERED_NAMES)}."
            )
        return cls.REGISTERED_NAMES[name]


class Scenario(metaclass=ScenarioMeta):
    """
    A named, parameterised reproduction that can be launched from a
    configuration block. Implementations read the parameters they understand
    and fall back to their own defaults for the rest.
    """

    REGISTER_NAME: Optional[str] = None

    @abstractmethod
    def run(self, params: Mapping[str, Any]) -> ScenarioResult:
        """
        Run the scenario.

        Args:
            params: Parameters by name (`n`, `m`, `t`, `epsilon`, `kappa0`,
                `peakons`, ...). Unknown names are ignored.
        """
