import numpy as np
import pytest

from fuzzysphere import ToeplitzQuantizer


@pytest.fixture(scope="session")
def quantizer_cache():
    """Shared standard quantizers; building the coherent basis dominates test time."""
    cache = {}

    def get(k):
        if k not in cache:
            cache[k] = ToeplitzQuantizer(k=k)
        return cache[k]

    return get


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20260819)
