"""Soliton profiles of the defocusing cubic NLS, sampled from closed forms.

The black soliton u0(x) = tanh(x/sqrt2) solves

    u0'  = (1 - u0^2)/sqrt2,        u0'' + u0 - u0^3 = 0,

and is the stationary state of the rotating-frame equation
i phi_t + phi_xx + (1-|phi|^2) phi = 0.  The dark solitons

    Phi_nu(x) = sqrt(1 - nu^2/2) tanh(kappa x) + i nu/sqrt2,
    kappa     = sqrt(1 - nu^2/2)/sqrt2,

travel at speed nu in that frame.  All derivatives here come from the
closed forms, never from finite differences: that decision is what lets
kernel identities downstream hold at roundoff instead of at stencil
accuracy.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import Grid, Jet

SQRT2 = np.sqrt(2.0)


class SpeedOutOfRange(ValueError):
    """Dark-soliton speed must satisfy |nu| < sqrt2."""


def _tanh_jet_arrays(x: np.ndarray, amp: float, kappa: float):
    """amp*tanh(kappa x) and its first four derivatives.

    sech is evaluated as 1/cosh so the tails keep full relative precision
    instead of cancelling in 1 - tanh^2.
    """
    z = kappa * x
    t = np.tanh(z)
    s2 = 1.0 / np.cosh(z) ** 2
    f = amp * t
    fx = amp * kappa * s2
    fxx = -2.0 * amp * kappa**2 * s2 * t
    fxxx = 2.0 * amp * kappa**3 * s2 * (3.0 * t * t - 1.0)
    fxxxx = 8.0 * amp * kappa**4 * s2 * t * (2.0 - 3.0 * t * t)
    return f, fx, fxx, fxxx, fxxxx


def soliton_jet(grid: Grid) -> Jet:
    """Jet of the black soliton u0 = tanh(x/sqrt2), derivatives 0..4."""
    return Jet(*_tanh_jet_arrays(grid.x, 1.0, 1.0 / SQRT2))


def u0_fifth_derivative(grid: Grid) -> np.ndarray:
    """Closed-form u0''''' (used by stencil-accuracy tests).

    d^5/dz^5 tanh(z) = sech^2(z) * (16 - 120 sech^2 + 120 sech^4).
    """
    z = grid.x / SQRT2
    s2 = 1.0 / np.cosh(z) ** 2
    c = 1.0 / SQRT2
    return c**5 * s2 * (16.0 - 120.0 * s2 + 120.0 * s2 * s2)


def u0_sixth_derivative(grid: Grid) -> np.ndarray:
    """Closed-form u0'''''' (completes the jet of u0'').

    d^6/dz^6 tanh(z) = tanh(z) sech^2(z) (-32 + 480 sech^2 - 720 sech^4).
    """
    z = grid.x / SQRT2
    t = np.tanh(z)
    s2 = 1.0 / np.cosh(z) ** 2
    c = 1.0 / SQRT2
    return c**6 * t * s2 * (-32.0 + 480.0 * s2 - 720.0 * s2 * s2)


def du0_jet(grid: Grid) -> Jet:
    """Jet of u0' (all five members from closed forms)."""
    s = soliton_jet(grid)
    return Jet(s.fx, s.fxx, s.fxxx, s.fxxxx, u0_fifth_derivative(grid))


def d2u0_jet(grid: Grid) -> Jet:
    """Jet of u0''."""
    s = soliton_jet(grid)
    return Jet(s.fxx, s.fxxx, s.fxxxx, u0_fifth_derivative(grid),
               u0_sixth_derivative(grid))


@dataclass(frozen=True)
class SolitonBundle:
    """Black-soliton samples u0, u0', u0'', u0''' on a grid."""

    grid: Grid
    u0: np.ndarray
    du0: np.ndarray
    d2u0: np.ndarray
    d3u0: np.ndarray

    @property
    def jet(self) -> Jet:
        f, fx, fxx, fxxx, fxxxx = _tanh_jet_arrays(self.grid.x, 1.0, 1.0 / SQRT2)
        return Jet(f, fx, fxx, fxxx, fxxxx)

    @property
    def norm_du0_sq(self) -> float:
        """||u0'||_L2^2, closed form 2 sqrt2/3."""
        return 2.0 * SQRT2 / 3.0


def black_soliton(grid: Grid) -> SolitonBundle:
    f, fx, fxx, fxxx, _ = _tanh_jet_arrays(grid.x, 1.0, 1.0 / SQRT2)
    return SolitonBundle(grid, f, fx, fxx, fxxx)


def translated_soliton(grid: Grid, xi: float, order: int = 3):
    """u0(x - xi) and derivatives, resampled from the closed form.

    Returns a tuple of arrays (u0, u0', ..., up to ``order``).  The
    modulation solver calls this every Newton step, so translation never
    goes through interpolation.
    """
    f, fx, fxx, fxxx, fxxxx = _tanh_jet_arrays(grid.x - xi, 1.0, 1.0 / SQRT2)
    return (f, fx, fxx, fxxx, fxxxx)[: order + 1]


def dark_soliton(grid: Grid, nu: float) -> np.ndarray:
    """Dark-soliton profile Phi_nu on the grid (complex field)."""
    return dark_soliton_jet(grid, nu).f


def dark_soliton_jet(grid: Grid, nu: float) -> Jet:
    if not abs(nu) < SQRT2:
        raise SpeedOutOfRange(f"|nu| must be < sqrt2, got nu={nu}")
    c = np.sqrt(1.0 - nu * nu / 2.0)
    kappa = c / SQRT2
    f, fx, fxx, fxxx, fxxxx = _tanh_jet_arrays(grid.x, c, kappa)
    return Jet(f + 1j * (nu / SQRT2) * np.ones_like(f),
               fx.astype(complex), fxx.astype(complex),
               fxxx.astype(complex), fxxxx.astype(complex))
