import os

import pytest

from twistnz import parse_triangulation, solve_flattening, solve_shapes

FIXTURE_DIR = os.path.join(os.path.dirname(__file__), os.pardir, "fixtures")


def fixture_path(name):
    return os.path.join(FIXTURE_DIR, name + ".json")


def load_triangulation(name):
    with open(fixture_path(name)) as fh:
        return parse_triangulation(fh.read())


@pytest.fixture(scope="session")
def fig8():
    return load_triangulation("4_1")


@pytest.fixture(scope="session")
def six3():
    return load_triangulation("6_3")


@pytest.fixture(scope="session")
def fig8_geometry(fig8):
    sol = solve_shapes(fig8)
    return sol.z, solve_flattening(fig8)


@pytest.fixture(scope="session")
def six3_geometry(six3):
    sol = solve_shapes(six3)
    return sol.z, solve_flattening(six3)
