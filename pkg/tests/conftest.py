import numpy as np
import pytest

from splitflow.model import EquationKind, PotentialSpec, ProblemSpec
from splitflow.operators import make_context
from splitflow.spectral import build_grid


@pytest.fixture(scope="session")
def grid1d():
    return build_grid(10.0, 256, 1)


@pytest.fixture(scope="session")
def dispersive_ctx(grid1d):
    problem = ProblemSpec(
        kind=EquationKind.SCHRODINGER, theta=1.0, potential=PotentialSpec(2, 1.0)
    )
    return make_context(problem, grid1d)


@pytest.fixture(scope="session")
def dispersive_linear_ctx(grid1d):
    problem = ProblemSpec(
        kind=EquationKind.SCHRODINGER, theta=0.0, potential=PotentialSpec(2, 1.0)
    )
    return make_context(problem, grid1d)


@pytest.fixture(scope="session")
def diffusive_ctx(grid1d):
    problem = ProblemSpec(
        kind=EquationKind.PARABOLIC, theta=1.0, potential=PotentialSpec(2, -1.0)
    )
    return make_context(problem, grid1d)


@pytest.fixture()
def rng():
    return np.random.default_rng(42)
