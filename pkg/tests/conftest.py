import numpy as np
import pytest

from ergokit import corpus


@pytest.fixture
def two_state():
    return corpus.two_state_fixture()


@pytest.fixture
def fast_two_state():
    return corpus.fast_two_state_fixture()


@pytest.fixture
def blocky():
    return corpus.block_fixture()


@pytest.fixture
def embedded():
    return corpus.embedded_fixture()


@pytest.fixture(scope="session")
def small_corpus():
    # shared across test modules; keep it small so the unit suite stays fast
    return corpus.build_corpus(seed=0, dims=(2, 3, 4), chains_per_dim=2)


@pytest.fixture
def rng():
    return np.random.default_rng(42)
