"""Grid construction, differentiation, quadrature, and jet algebra."""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from blacksoliton.grid import Grid, GridTooSmall, Jet, NotOnGrid, as_jet, jet_product


def test_grid_basics(grid):
    assert grid.h == pytest.approx(0.02)
    assert grid.x[0] == -40.0 and grid.x[-1] == 40.0
    assert grid.x[grid.center] == 0.0
    assert grid.node_index(10.0) == 2500
    with pytest.raises(NotOnGrid):
        grid.node_index(10.005)


def test_grid_validation():
    with pytest.raises(GridTooSmall):
        Grid(40.0, 5)
    with pytest.raises(ValueError):
        Grid(40.0, 4000)        # even N has no center node
    with pytest.raises(ValueError):
        Grid(-1.0, 4001)


def test_check_field(grid):
    with pytest.raises(ValueError):
        grid.check_field(np.zeros(7))
    bad = np.zeros(grid.N)
    bad[3] = np.nan
    with pytest.raises(ValueError):
        grid.check_field(bad)


def test_diff_accuracy(grid):
    f = np.sin(0.5 * grid.x)
    err1 = np.max(np.abs(grid.diff(f, 1) - 0.5 * np.cos(0.5 * grid.x)))
    err2 = np.max(np.abs(grid.diff(f, 2) + 0.25 * np.sin(0.5 * grid.x)))
    assert err1 <= 1e-9
    assert err2 <= 1e-7
    with pytest.raises(ValueError):
        grid.diff(f, 3)


def test_diff_parity(grid):
    """Mirrored edge stencils: derivative of an even field is exactly odd."""
    f = np.exp(-grid.x**2 / 8.0)
    d = grid.diff(f, 1)
    assert np.max(np.abs(d + d[::-1])) <= 1e-12


def test_integrate_polynomial_exactness(grid):
    # Simpson is exact on cubics up to roundoff accumulation
    val = grid.integrate(grid.x**3 - 2.0 * grid.x**2 + 1.0)
    exact = -2.0 * (2 * 40.0**3) / 3.0 + 2 * 40.0
    assert val == pytest.approx(exact, rel=1e-13)


def test_integrate_window(grid):
    f = np.cos(grid.x) ** 2
    full = grid.integrate(f)
    assert grid.integrate_window(f, -40.0, 40.0) == pytest.approx(full, rel=1e-14)
    half = grid.integrate_window(f, -10.0, 10.0)
    exact = 10.0 + np.sin(20.0) / 2.0
    assert half == pytest.approx(exact, rel=1e-8)    # composite-Simpson h^4 error


def test_cumulative(grid):
    f = np.exp(-grid.x**2)
    F = grid.cumulative(f)
    assert F[0] == 0.0
    assert F[-1] == pytest.approx(grid.integrate(f), rel=1e-12)
    Fc = grid.cumulative_from_center(f)
    assert Fc[grid.center] == 0.0
    # both antiderivatives differ by a constant
    d = F - Fc
    assert np.max(d) - np.min(d) <= 1e-12 * np.max(np.abs(F))


def test_jet_from_samples(grid):
    f = np.tanh(grid.x / 2.0)
    j = Jet.from_samples(grid, f)
    s = 1.0 / np.cosh(grid.x / 2.0) ** 2
    assert np.max(np.abs(j.fx - 0.5 * s)) <= 1e-8
    assert np.max(np.abs(j.fxx + 0.5 * s * np.tanh(grid.x / 2.0))) <= 1e-6


def test_as_jet_passthrough(grid, s0):
    assert as_jet(grid, s0) is s0
    j = as_jet(grid, s0.f)
    assert np.array_equal(j.f, s0.f)


def test_jet_algebra(grid, s0):
    two = 2.0 * s0
    assert np.array_equal(two.f, 2.0 * s0.f)
    assert np.array_equal(two.fxxx, 2.0 * s0.fxxx)
    summed = s0 + two
    assert np.allclose(summed.fx, 3.0 * s0.fx, rtol=0, atol=0)
    z = s0.astype(complex)
    assert z.f.dtype == complex


def test_jet_product_derivatives(grid, s0):
    """Leibniz chains in jet_product against the analytic square."""
    sq = jet_product(s0, s0)
    t = s0.f
    assert np.max(np.abs(sq.f - t**2)) == 0.0
    assert np.max(np.abs(sq.fx - 2.0 * t * s0.fx)) <= 1e-15
    assert np.max(np.abs(sq.fxx - 2.0 * (s0.fx**2 + t * s0.fxx))) <= 1e-15
    # fourth derivative against a finite difference of the third
    fd = grid.diff(sq.fxxx, 1)
    assert np.max(np.abs(sq.fxxxx - fd)) <= 1e-5


@settings(max_examples=25, deadline=None)
@given(a=st.floats(-3, 3, allow_nan=False), b=st.floats(-3, 3, allow_nan=False))
def test_integrate_linearity(a, b):
    g = Grid(10.0, 201)
    f1 = np.exp(-g.x**2)
    f2 = np.sin(g.x) * np.exp(-g.x**2 / 2)
    lhs = g.integrate(a * f1 + b * f2)
    rhs = a * g.integrate(f1) + b * g.integrate(f2)
    assert lhs == pytest.approx(rhs, abs=1e-12)


@settings(max_examples=25, deadline=None)
@given(w=st.floats(0.5, 2.0, allow_nan=False))
def test_integrate_derivative_telescopes(w):
    """int f' = f(L) - f(-L); localized f makes it vanish."""
    g = Grid(20.0, 801)
    f = np.exp(-(g.x / w) ** 2)
    assert abs(g.integrate(g.diff(f, 1))) <= 1e-10
