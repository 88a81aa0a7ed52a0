import numpy as np
import pytest

from biphoton import CouplingConfig


@pytest.fixture
def cfg_half():
    """Equal couplings at the default resonant wavenumber."""
    return CouplingConfig.from_chirality(0.5, 1.2)


@pytest.fixture
def cfg_quarter():
    return CouplingConfig.from_chirality(0.25, 1.2)


@pytest.fixture
def cfg_left():
    """Fully chiral: no right movers."""
    return CouplingConfig.from_chirality(0.0, 1.2)


@pytest.fixture
def cfg_right():
    """Fully chiral: no left movers."""
    return CouplingConfig.from_chirality(1.0, 1.2)


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
