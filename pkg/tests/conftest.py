import numpy as np
import pytest


class FakeRng:
    """Scripted stand-in for a Generator: returns queued uniforms in order."""

    def __init__(self, values):
        self._values = list(values)

    def random(self):
        return self._values.pop(0)


@pytest.fixture
def fake_rng():
    return FakeRng


def rng_of(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


@pytest.fixture
def rng():
    return rng_of(20260810)
