import numpy as np
import pytest

from ifelab.core.dynamics import TimeGrid
from ifelab.families.dephasing import bosonic_dephasing
from ifelab.families.spin_boson import spin_boson_dephasing
from ifelab.families.two_qubit import two_qubit_xy


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(scope="session")
def default_grid():
    """t ∈ [0, 20], 200 samples"""
    return TimeGrid.uniform(20.0, 200)


@pytest.fixture(scope="session")
def short_grid():
    return TimeGrid.uniform(5.0, 60)


@pytest.fixture(scope="session")
def two_qubit():
    return two_qubit_xy(1.0, 0.7, 0.3)


@pytest.fixture(scope="session")
def spin_boson():
    return spin_boson_dephasing(2, [1.0, 1.0], [0.9], [0.2], 4)


@pytest.fixture(scope="session")
def dephasing():
    return bosonic_dephasing([0.5, -0.5], 0.9, [0.2, -0.2], 3)
