"""Conserved functionals and the distance d_R for fields near the black soliton.

For psi with |psi| -> 1 at the box ends the integrands below all decay,
so composite Simpson on the truncated line stands in for the integrals
over R.  The five tracked quantities are

    Q   = int (|psi|^2 - 1)                      (unrenormalized mass)
    M   = -int Im(conj(psi) psi_x)               (unrenormalized momentum)
    E   = int (|psi_x|^2 + (1-|psi|^2)^2 / 2)    (energy)
    S   = int (|psi_xx|^2 + 3|psi|^2|psi_x|^2
               + ((|psi|^2)_x)^2/2 + (1-|psi|^2)^2 (1+|psi|^2/2))
    Lam = S - 2E,

with closed-form soliton values E = 4 sqrt2/3, S = 12 sqrt2/5,
Lam = -4 sqrt2/15, Q = -2 sqrt2, M = 0.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .grid import Grid, Jet, as_jet, jet_product
from .profiles import soliton_jet


class BadBoundary(UserWarning):
    """Field modulus at the box ends is visibly away from 1."""


@dataclass(frozen=True)
class ConservedSet:
    t: float
    Q: float
    M: float
    E: float
    S: float
    Lam: float

    def as_dict(self) -> dict[str, float]:
        return {"t": self.t, "Q": self.Q, "M": self.M,
                "E": self.E, "S": self.S, "Lambda": self.Lam}


def conserved(grid: Grid, psi, t: float = 0.0,
              boundary_tol: float = 1e-6) -> ConservedSet:
    """Evaluate Q, M, E, S, Lam on a complex field (array or jet)."""
    j = as_jet(grid, psi)
    edge = max(abs(abs(j.f[0]) - 1.0), abs(abs(j.f[-1]) - 1.0))
    if edge > boundary_tol:
        warnings.warn(
            f"boundary modulus off background by {edge:.2e}; "
            "quadrature tails are polluted", BadBoundary, stacklevel=2)

    m = j.f.real**2 + j.f.imag**2          # |psi|^2
    ax2 = j.fx.real**2 + j.fx.imag**2      # |psi_x|^2
    axx2 = j.fxx.real**2 + j.fxx.imag**2   # |psi_xx|^2
    mx = 2.0 * (j.f.real * j.fx.real + j.f.imag * j.fx.imag)   # (|psi|^2)_x
    one_m = 1.0 - m

    Q = grid.integrate(m - 1.0)
    M = -grid.integrate(j.f.real * j.fx.imag - j.f.imag * j.fx.real)
    E = grid.integrate(ax2 + 0.5 * one_m**2)
    S = grid.integrate(axx2 + 3.0 * m * ax2 + 0.5 * mx**2 + one_m**2 * (1.0 + 0.5 * m))
    return ConservedSet(t=t, Q=float(Q), M=float(M), E=float(E), S=float(S),
                        Lam=float(S - 2.0 * E))


@dataclass(frozen=True)
class PerturbationTriple:
    """Real/imaginary perturbation (u, v) around u0 and eta = |psi|^2 - u0^2."""

    u: Jet
    v: Jet
    eta: Jet

    @classmethod
    def from_uv(cls, grid: Grid, u, v) -> "PerturbationTriple":
        u = as_jet(grid, u)
        v = as_jet(grid, v)
        s0 = soliton_jet(grid)
        eta = 2.0 * jet_product(s0, u) + jet_product(u, u) + jet_product(v, v)
        return cls(u, v, eta)

    def field(self, grid: Grid) -> Jet:
        """The complex field psi = u0 + u + iv as a jet."""
        s0 = soliton_jet(grid)
        return Jet(s0.f + self.u.f + 1j * self.v.f,
                   s0.fx + self.u.fx + 1j * self.v.fx,
                   s0.fxx + self.u.fxx + 1j * self.v.fxx,
                   s0.fxxx + self.u.fxxx + 1j * self.v.fxxx,
                   s0.fxxxx + self.u.fxxxx + 1j * self.v.fxxxx)


def distance_dR(grid: Grid, psi1, psi2, R: float) -> float:
    """d_R = ||(psi1-psi2)_x||_{H^1} + || |psi1|^2-|psi2|^2 ||_{L^2}
           + ||psi1-psi2||_{L^2(-R,R)}."""
    j1, j2 = as_jet(grid, psi1), as_jet(grid, psi2)
    dx = j1.fx - j2.fx
    dxx = j1.fxx - j2.fxx
    d = j1.f - j2.f
    m1 = j1.f.real**2 + j1.f.imag**2
    m2 = j2.f.real**2 + j2.f.imag**2
    t1 = np.sqrt(grid.integrate(np.abs(dx) ** 2 + np.abs(dxx) ** 2).real)
    t2 = np.sqrt(grid.integrate((m1 - m2) ** 2))
    t3 = np.sqrt(grid.integrate_window(np.abs(d) ** 2, -R, R).real)
    return float(t1 + t2 + t3)


def rho(grid: Grid, triple: PerturbationTriple, R: float) -> float:
    """The localized norm controlling d_R:

    rho^2 = int (u_x^2 + u_xx^2 + v_x^2 + v_xx^2)
          + int_{|x|<=R} (u^2 + v^2/R^2)
          + int_{|x|>=R} (eta_x^2 + eta^2).
    """
    u, v, eta = triple.u, triple.v, triple.eta
    grad = grid.integrate(u.fx**2 + u.fxx**2 + v.fx**2 + v.fxx**2)
    inner = grid.integrate_window(u.f**2 + v.f**2 / R**2, -R, R)
    tail_density = eta.fx**2 + eta.f**2
    tail = grid.integrate(tail_density) - grid.integrate_window(tail_density, -R, R)
    return float(np.sqrt(grad + inner + max(tail, 0.0)))
