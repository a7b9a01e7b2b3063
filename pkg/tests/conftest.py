"""Shared fixtures: canonical lattices and surfaces used across the suite."""
import math

import numpy as np
import pytest

from flatheat import ReducedLattice, klein_bottle, torus

HONEYCOMB_B = math.sqrt(3.0) / 2.0


@pytest.fixture(scope="session")
def square_lattice():
    return ReducedLattice.from_parameters(0.0, 1.0)


@pytest.fixture(scope="session")
def honeycomb_lattice():
    return ReducedLattice.from_parameters(0.5, HONEYCOMB_B)


@pytest.fixture(scope="session")
def square_torus():
    return torus(0.0, 1.0)


@pytest.fixture(scope="session")
def honeycomb_torus():
    return torus(0.5, HONEYCOMB_B)


@pytest.fixture(scope="session")
def generic_torus():
    return torus(0.3, 1.2)


@pytest.fixture(scope="session")
def klein13():
    return klein_bottle(1.3)


@pytest.fixture()
def rng():
    return np.random.default_rng(20240817)
