import copy
import pickle

from hsflow.utils.sentinels import INFINITY, _InfinityType


class TestInfinity:
    def test_singleton(self):
        assert _InfinityType() is INFINITY
        assert copy.copy(INFINITY) is INFINITY
        assert copy.deepcopy(INFINITY) is INFINITY
        assert pickle.loads(pickle.dumps(INFINITY)) is INFINITY

    def test_repr(self):
        assert repr(INFINITY) == "INFINITY"
