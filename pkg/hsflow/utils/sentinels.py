from __future__ import annotations

from typing import Dict

from typing_extensions import Self


class _InfinityType:
    """
    The single point at infinity of the compactified state space. Every point
    whose angle equals -pi/2 is identified with it.
    """

    __instance__ = None

    def __new__(cls) -> _InfinityType:
        if cls.__instance__ is None:
            cls.__instance__ = super(_InfinityType, cls).__new__(cls)
        return cls.__instance__

    def __repr__(self) -> str:
        return "INFINITY"

    def __reduce__(self) -> str:
        return "INFINITY"

    def __copy__(self) -> Self:
        return self

    def __deepcopy__(self, memo: Dict) -> Self:
        return self


INFINITY = _InfinityType()
