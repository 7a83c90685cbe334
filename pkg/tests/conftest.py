import numpy as np
import pytest

from biortho.lattice import UnitSystem, build_lattice


@pytest.fixture(scope="session")
def lat8():
    return build_lattice(8, 1.0, UnitSystem())


@pytest.fixture(scope="session")
def lat16():
    return build_lattice(16, 1.0, UnitSystem())


@pytest.fixture(scope="session")
def lat16_m0():
    return build_lattice(16, 1.0, UnitSystem(mass=0.0))


@pytest.fixture(scope="session")
def odd_units_lattice():
    """Non-unit hbar, c and mass so that misplaced constants show up."""
    return build_lattice(16, 0.7, UnitSystem(hbar=1.7, c=2.3, eps0=0.6, mass=0.9))


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
