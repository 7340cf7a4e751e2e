import numpy
import pytest

from hsflow.plfunc import PiecewiseLinearFn, hat

CORPUS_SIZE = 50
CORPUS_SEED = 20240611


def random_function(rng, max_segments=40):
    k = int(rng.integers(1, max_segments + 1))
    lengths = rng.uniform(0.05, 1.0, size=k)
    x = rng.uniform(-3.0, 0.0) + numpy.concatenate([[0.0], numpy.cumsum(lengths)])
    return PiecewiseLinearFn(x, rng.normal(size=k + 1))


@pytest.fixture(scope="session")
def corpus():
    rng = numpy.random.default_rng(CORPUS_SEED)
    return [random_function(rng) for _ in range(CORPUS_SIZE)]


@pytest.fixture(scope="session")
def small_corpus():
    rng = numpy.random.default_rng(CORPUS_SEED + 1)
    return [random_function(rng, max_segments=6) for _ in range(10)]


@pytest.fixture
def hat_function():
    return hat()


@pytest.fixture
def rng():
    return numpy.random.default_rng(0)
