"""Shared fixtures: one default grid per session, plus smaller grids for
cross-resolution and property tests."""

import pytest

from blacksoliton.grid import Grid
from blacksoliton.profiles import black_soliton, soliton_jet


@pytest.fixture(scope="session")
def grid():
    """The default laboratory grid (h = 0.02)."""
    return Grid(40.0, 4001)


@pytest.fixture(scope="session")
def coarse_grid():
    """Same box at half resolution (h = 0.04), for stability-under-refinement."""
    return Grid(40.0, 2001)


@pytest.fixture(scope="session")
def small_grid():
    """Short box for dense-solver cross-checks."""
    return Grid(20.0, 1001)


@pytest.fixture(scope="session")
def bundle(grid):
    return black_soliton(grid)


@pytest.fixture(scope="session")
def s0(grid):
    return soliton_jet(grid)


@pytest.fixture(scope="session")
def u0c(s0):
    return s0.f.astype(complex)
