import numpy as np
import pytest
from hypothesis import settings

# first calls may include numba compilation
settings.register_profile("qgmarket", deadline=None)
settings.load_profile("qgmarket")

from qgmarket.distribution import QGaussianParams
from qgmarket.sampling import SeededStream, sample_q_gaussian

SEED = 20260101


def draw(q, beta, n, seed=SEED, counter=0):
    return sample_q_gaussian(QGaussianParams(q, beta), n, SeededStream(seed, counter))


@pytest.fixture
def rng():
    return np.random.default_rng(SEED)


@pytest.fixture(scope="session")
def fixture_csv():
    from qgmarket.synthetic import fixture_path
    return str(fixture_path())
