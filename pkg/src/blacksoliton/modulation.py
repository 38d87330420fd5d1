"""Decomposition near the soliton orbit and modulation-parameter rates.

A field close to the orbit {e^{-i theta} u0(. - xi)} is written as

    e^{i theta} psi(. + xi) = u0 + u + iv,
    <u0', u> = 0,   <u0'', v> = 0,

by Newton iteration on the residual map

    f(xi, theta) = ( <u0'(.-xi), Re(e^{i theta} psi)>,
                     <u0''(.-xi), Im(e^{i theta} psi)> ),

whose Jacobian at the soliton is diag(||u0'||^2, -||u0'||^2), hence
invertible uniformly near the orbit.  Along a trajectory the parameter
velocities solve the 2x2 system

    B (xidot, thetadot)^T = (<L- u0', v>, <L+ u0'', u>)^T + cubic brackets,

with B an O(eps) perturbation of -||u0'||^2 I.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.interpolate import CubicSpline

from .grid import Grid
from .profiles import black_soliton, translated_soliton


class ShiftTooLarge(ValueError):
    """|xi| beyond L/2 leaves no room for the soliton core."""


class NoConvergence(RuntimeError):
    """Newton left the orbital neighborhood (the numerical epsilon_0)."""


class SingularB(RuntimeError):
    """Rate system matrix is numerically singular; far outside the small-eps regime."""


@dataclass(frozen=True)
class ModulationState:
    xi: float
    theta: float            # wrapped to (-pi, pi]
    u: np.ndarray
    v: np.ndarray
    residual: float         # |f| at the accepted iterate
    iterations: int

    def reassemble(self, grid: Grid) -> np.ndarray:
        """e^{-i theta}(u0 + u + iv)(. - xi), inverse of the decomposition."""
        w = black_soliton(grid).u0 + self.u + 1j * self.v
        spline = CubicSpline(grid.x, w)
        shifted = spline(np.clip(grid.x - self.xi, -grid.L, grid.L))
        return np.exp(-1j * self.theta) * shifted


@dataclass(frozen=True)
class RateSystem:
    B: np.ndarray           # 2x2
    rhs: np.ndarray         # 2-vector
    rates: np.ndarray       # (xidot, thetadot)


def f_residual(grid: Grid, psi: np.ndarray, xi: float, theta: float) -> np.ndarray:
    if not -grid.L / 2 <= xi <= grid.L / 2:
        raise ShiftTooLarge(f"|xi| = {abs(xi):.3g} exceeds L/2 = {grid.L / 2}")
    du0m, d2u0m = translated_soliton(grid, xi, order=2)[1:]
    w = np.exp(1j * theta) * np.asarray(psi)
    return np.array([grid.integrate(du0m * w.real),
                     grid.integrate(d2u0m * w.imag)])


def f_jacobian(grid: Grid, psi: np.ndarray, xi: float, theta: float) -> np.ndarray:
    _, du0m, d2u0m, d3u0m = translated_soliton(grid, xi, order=3)
    w = np.exp(1j * theta) * np.asarray(psi)
    return np.array([
        [-grid.integrate(d2u0m * w.real), -grid.integrate(du0m * w.imag)],
        [-grid.integrate(d3u0m * w.imag), grid.integrate(d2u0m * w.real)],
    ])


def _wrap_phase(theta: float) -> float:
    t = (theta + np.pi) % (2.0 * np.pi) - np.pi
    return t + 2.0 * np.pi if t <= -np.pi else t


def solve_modulation(grid: Grid, psi: np.ndarray, guess: tuple[float, float] = (0.0, 0.0),
                     tol: float = 1e-12, max_iter: int = 25) -> ModulationState:
    """Newton on f_residual with the analytic Jacobian.

    Steps larger than |dxi| = 1 or |dtheta| = 0.5 are halved; failure to
    converge within ``max_iter`` marks the input as outside the basin.
    """
    psi = np.asarray(psi, complex)
    xi, theta = float(guess[0]), float(guess[1])
    res = f_residual(grid, psi, xi, theta)     # ShiftTooLarge here blames the guess
    it = 0
    restarted = False
    while True:
        while np.max(np.abs(res)) > tol:
            if it >= max_iter:
                raise NoConvergence(
                    f"residual {np.max(np.abs(res)):.2e} after {max_iter} Newton steps")
            step = np.linalg.solve(f_jacobian(grid, psi, xi, theta), -res)
            while abs(step[0]) > 1.0 or abs(step[1]) > 0.5:
                step = 0.5 * step
            xi, theta = xi + step[0], theta + step[1]
            try:
                res = f_residual(grid, psi, xi, theta)
            except ShiftTooLarge as exc:
                # iterate wandered out of the box: that is a basin failure
                raise NoConvergence(f"Newton left the admissible shift range: {exc}") from exc
            it += 1
        # Root quality: near the orbit the Jacobian is close to
        # diag(||u0'||^2, -||u0'||^2).  A flipped (1,1) entry marks the
        # antipodal root (theta off by pi, perturbation -2u0 + small),
        # which one restart repairs; a collapsed determinant marks a
        # spurious root with the profile parked against the boundary.
        J = f_jacobian(grid, psi, xi, theta)
        if J[0, 0] < -0.1 and not restarted:
            restarted = True
            theta += np.pi
            res = f_residual(grid, psi, xi, theta)
            continue
        if J[0, 0] < 0.1 or np.linalg.det(J) > -0.05:
            raise NoConvergence(
                f"converged to a degenerate root (J00 {J[0, 0]:.3f}, det {np.linalg.det(J):.3f})")
        break
    u0m = translated_soliton(grid, xi, order=0)[0]
    pert = np.exp(1j * theta) * psi - u0m          # smooth and small: safe to interpolate
    spline = CubicSpline(grid.x, pert)
    shifted = spline(np.clip(grid.x + xi, -grid.L, grid.L))
    return ModulationState(xi=xi, theta=_wrap_phase(theta),
                           u=shifted.real.copy(), v=shifted.imag.copy(),
                           residual=float(np.max(np.abs(res))), iterations=it)


def modulation_rates(grid: Grid, state: ModulationState) -> RateSystem:
    """Assemble and solve the 2x2 system for (xidot, thetadot).

    Closed forms for the linear brackets: L- u0' = -2 u0^2 u0' and
    L+ u0'' = -6 u0 u0'^2.
    """
    b = black_soliton(grid)
    u, v = state.u, state.v
    ux, vx = grid.diff(u, 1), grid.diff(v, 1)
    nsq = grid.integrate(b.du0 * b.du0)
    B = np.array([
        [-nsq - grid.integrate(b.du0 * ux), grid.integrate(b.du0 * v)],
        [grid.integrate(b.d2u0 * vx), -nsq + grid.integrate(b.d2u0 * u)],
    ])
    if abs(np.linalg.det(B)) < 1e-6:
        raise SingularB(f"det B = {np.linalg.det(B):.2e}")
    eta = 2.0 * b.u0 * u + u * u + v * v
    rhs = np.array([
        grid.integrate(-2.0 * b.u0**2 * b.du0 * v) + grid.integrate(b.du0 * eta * v),
        grid.integrate(-6.0 * b.u0 * b.du0**2 * u)
        + grid.integrate(b.d2u0 * ((3.0 * b.u0 * u + u * u + v * v) * u + b.u0 * v * v)),
    ])
    return RateSystem(B=B, rhs=rhs, rates=np.linalg.solve(B, rhs))


class ModulationTracker:
    """One trajectory's cursor: previous (xi, theta) seeds the next solve,
    with theta unwrapped so rate estimates see a continuous series."""

    def __init__(self, grid: Grid, guess: tuple[float, float] = (0.0, 0.0)):
        self.grid = grid
        self.xi = float(guess[0])
        self.theta = float(guess[1])

    def observe(self, phi: np.ndarray) -> tuple[ModulationState, RateSystem]:
        state = solve_modulation(self.grid, phi, guess=(self.xi, self.theta))
        theta = state.theta + 2.0 * np.pi * np.round((self.theta - state.theta)
                                                     / (2.0 * np.pi))
        state = ModulationState(xi=state.xi, theta=theta, u=state.u, v=state.v,
                                residual=state.residual, iterations=state.iterations)
        self.xi, self.theta = state.xi, state.theta
        return state, modulation_rates(self.grid, state)
