import numpy as np
import pytest

from noisytele.qstate import random_density

SEED = 20240613


@pytest.fixture
def rng():
    return np.random.default_rng(SEED)


def random_two_qubit_densities(n=200, seed=SEED):
    """Fixed-seed two-qubit mixed states cycling through ranks 1 to 4."""
    rng = np.random.default_rng([seed, 8])
    return [random_density(rng, 2, rank=1 + k % 4) for k in range(n)]


KT_GRID = [round(0.05 * i, 2) for i in range(21)]
