"""Shared fixtures for the hyperpolygon toolkit tests."""

from fractions import Fraction

import numpy as np
import pytest
from hypothesis import settings

from scalar_linalg import DEFAULT_TOLERANCE, set_tolerance
from hyperpolygon import WeightVector
from higgs import default_points
from tests import instances

settings.register_profile("default", max_examples=50, deadline=None)
settings.load_profile("default")


def pytest_addoption(parser):
    parser.addoption(
        "--update-golden",
        action="store_true",
        default=False,
        help="Rewrite the files under tests/golden from the current output",
    )


@pytest.fixture(autouse=True)
def reset_tolerance():
    yield
    set_tolerance(DEFAULT_TOLERANCE)


@pytest.fixture
def hand_point():
    return instances.hand_point()


@pytest.fixture
def third_weights():
    return WeightVector.uniform(4, Fraction(1, 3))


@pytest.fixture
def points4():
    return default_points(4)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
