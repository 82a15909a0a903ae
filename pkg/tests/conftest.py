import pytest

from helpers import make_system


@pytest.fixture
def base_params():
    """The (kappa_wg, kappa_sc, g) = (100, 300, 20) two-atom system, C = 4."""
    return make_system()


@pytest.fixture
def rng():
    import numpy as np

    return np.random.default_rng(20260810)
