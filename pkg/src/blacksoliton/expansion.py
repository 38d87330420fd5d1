"""Exact expansion of Lam = S - 2E around the black soliton.

For psi = u0 + u + iv with eta = 2 u0 u + u^2 + v^2,

    Lam(psi) - Lam(u0) = int [ B1(u) + B2(v) + B3(eta)
                               + eta^3/2 + 3 eta (u_x^2 + v_x^2)
                               + 6 u0' (u^2 + v^2) u_x ] dx

with the quadratic densities

    B0(u)   = u_xx^2 + (5u0^2 - 2) u_x^2 + (9u0^2 - 5u0^4 - 2) u^2
    B1(u)   = u_xx^2 + (3u0^2 - 2) u_x^2 + (1 - u0^2) u^2
                     - 3 (1 - u0^2)(1 - 3u0^2) u^2
    B2(v)   = v_xx^2 + (3u0^2 - 2) v_x^2 + (1 - u0^2) v^2
    B3(eta) = eta_x^2/2 + (3u0^2 - 2) eta^2/2.

B0 and B2 integrate to the K+ and K- quadratic forms.  The pointwise
bridge between the two u-densities,

    B1(u) + B3(eta) = B0(u) + (2 u0 u0' u^2)_x + Ntilde(u, v),

trades the indefinite B1 + B3 for the coercive B0 plus a total
derivative and a quartic remainder; the cut-off chi_R localizes it.
Everything here is evaluated at quadrature precision from analytic
jets, so identity residuals sit at roundoff, not at stencil accuracy.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .functionals import PerturbationTriple, conserved, distance_dR, rho
from .grid import Grid, Jet, as_jet, jet_product
from .profiles import SQRT2, d2u0_jet, du0_jet, soliton_jet
from .randomfields import phase_ramp_jet, random_pair


class CutoffOutsideDomain(ValueError):
    """chi_R needs 3R/2 <= L to vanish inside the box."""


@dataclass(frozen=True)
class CutOff:
    """Even C^2 plateau function: 1 on [-R/2, R/2], 0 beyond 3R/2.

    Quintic smoothstep in |x|/R on the transition band; by its point
    symmetry chi_R(R) = 1/2 exactly.
    """

    grid: Grid
    R: float
    chi: np.ndarray
    chi_x: np.ndarray

    @classmethod
    def build(cls, grid: Grid, R: float) -> "CutOff":
        if R <= 0:
            raise ValueError("cut-off radius must be positive")
        if 1.5 * R > grid.L:
            raise CutoffOutsideDomain(f"need 3R/2 <= L, got R={R}, L={grid.L}")
        grid.node_index(R)      # R is required to sit on a node
        t = np.clip(np.abs(grid.x) / R - 0.5, 0.0, 1.0)
        s5 = t**3 * (10.0 - 15.0 * t + 6.0 * t * t)
        ds5 = 30.0 * t**2 * (t - 1.0) ** 2
        band = (np.abs(grid.x) / R > 0.5) & (np.abs(grid.x) / R < 1.5)
        chi_x = np.where(band, -np.sign(grid.x) * ds5 / R, 0.0)
        return cls(grid=grid, R=R, chi=1.0 - s5, chi_x=chi_x)


# ----------------------------------------------------------------------
# the four quadratic densities
# ----------------------------------------------------------------------


def b0_density(grid: Grid, u) -> np.ndarray:
    j = as_jet(grid, u)
    m = soliton_jet(grid).f ** 2
    return j.fxx**2 + (5.0 * m - 2.0) * j.fx**2 + (9.0 * m - 5.0 * m * m - 2.0) * j.f**2


def b1_density(grid: Grid, u) -> np.ndarray:
    j = as_jet(grid, u)
    m = soliton_jet(grid).f ** 2
    pot = (1.0 - m) - 3.0 * (1.0 - m) * (1.0 - 3.0 * m)
    return j.fxx**2 + (3.0 * m - 2.0) * j.fx**2 + pot * j.f**2


def b2_density(grid: Grid, v) -> np.ndarray:
    j = as_jet(grid, v)
    m = soliton_jet(grid).f ** 2
    return j.fxx**2 + (3.0 * m - 2.0) * j.fx**2 + (1.0 - m) * j.f**2


def b3_density(grid: Grid, eta) -> np.ndarray:
    j = as_jet(grid, eta)
    m = soliton_jet(grid).f ** 2
    return 0.5 * j.fx**2 + 0.5 * (3.0 * m - 2.0) * j.f**2


@dataclass(frozen=True)
class BDensities:
    """The four densities sampled for one perturbation (u, v, eta)."""

    b0: np.ndarray
    b1: np.ndarray
    b2: np.ndarray
    b3: np.ndarray

    @classmethod
    def sample(cls, grid: Grid, u, v, eta) -> "BDensities":
        return cls(b0=b0_density(grid, u), b1=b1_density(grid, u),
                   b2=b2_density(grid, v), b3=b3_density(grid, eta))


# ----------------------------------------------------------------------
# the expansion itself
# ----------------------------------------------------------------------


def lambda_gap(grid: Grid, psi) -> float:
    """Lam(psi) - Lam(u0), both through the same evaluation path."""
    u0c = soliton_jet(grid).astype(complex)
    return conserved(grid, psi).Lam - conserved(grid, u0c).Lam


def lambda_expansion_rhs(grid: Grid, u, v, include_cubic: bool = True) -> float:
    """Quadrature of the full expansion integrand with eta = 2u0 u + u^2 + v^2."""
    ju, jv = as_jet(grid, u), as_jet(grid, v)
    triple = PerturbationTriple.from_uv(grid, ju, jv)
    eta = triple.eta
    density = (b1_density(grid, ju) + b2_density(grid, jv)
               + b3_density(grid, eta))
    if include_cubic:
        du0 = soliton_jet(grid).fx
        density = density + (0.5 * eta.f**3
                             + 3.0 * eta.f * (ju.fx**2 + jv.fx**2)
                             + 6.0 * du0 * (ju.f**2 + jv.f**2) * ju.fx)
    return float(grid.integrate(density))


def q_total(grid: Grid, u, v, eta) -> float:
    """int(B1(u) + B2(v) + B3(eta)) with eta passed independently."""
    density = b1_density(grid, u) + b2_density(grid, v) + b3_density(grid, eta)
    return float(grid.integrate(density))


def _ntilde(grid: Grid, ju: Jet, jv: Jet) -> np.ndarray:
    """Quartic remainder of the B1 + B3 -> B0 rearrangement."""
    s0 = soliton_jet(grid)
    m = s0.f**2
    r = ju.f * ju.fx + jv.f * jv.fx            # (u^2 + v^2)_x / 2
    sq = ju.f**2 + jv.f**2
    return (4.0 * r * (s0.fx * ju.f + s0.f * ju.fx)
            + 2.0 * r * r
            + 2.0 * (3.0 * m - 2.0) * s0.f * ju.f * sq
            + 0.5 * (3.0 * m - 2.0) * sq * sq)


def bident_pointwise(grid: Grid, u, v) -> tuple[float, float]:
    """(max residual, scale) of B1(u) + B3(eta) - B0(u) - (2u0u0'u^2)_x - Ntilde."""
    ju, jv = as_jet(grid, u), as_jet(grid, v)
    eta = PerturbationTriple.from_uv(grid, ju, jv).eta
    s0 = soliton_jet(grid)
    flux_x = (2.0 * (s0.fx**2 + s0.f * s0.fxx) * ju.f**2
              + 4.0 * s0.f * s0.fx * ju.f * ju.fx)
    lhs = b1_density(grid, ju) + b3_density(grid, eta)
    rhs = b0_density(grid, ju) + flux_x + _ntilde(grid, ju, jv)
    scale = 1.0 + max(np.max(np.abs(lhs)), np.max(np.abs(rhs)))
    return float(np.max(np.abs(lhs - rhs))), float(scale)


def bident_residual(grid: Grid, u, v, R: float) -> float:
    """int (B1(u) + B3(eta)) chi_R - int B0(u) chi_R.

    Small of third order in the perturbation amplitude plus an e^{-R}
    quadratic tail carried by the total-derivative flux.
    """
    ju, jv = as_jet(grid, u), as_jet(grid, v)
    eta = PerturbationTriple.from_uv(grid, ju, jv).eta
    chi = CutOff.build(grid, R).chi
    lhs = grid.integrate((b1_density(grid, ju) + b3_density(grid, eta)) * chi)
    rhs = grid.integrate(b0_density(grid, ju) * chi)
    return float(lhs - rhs)


def bident_flux_term(grid: Grid, u, R: float) -> float:
    """int (2 u0 u0' u^2)_x chi_R = -int 2 u0 u0' u^2 chi_R' (the e^{-R} piece)."""
    ju = as_jet(grid, u)
    cut = CutOff.build(grid, R)
    s0 = soliton_jet(grid)
    return float(-grid.integrate(2.0 * s0.f * s0.fx * ju.f**2 * cut.chi_x))


# ----------------------------------------------------------------------
# coercivity probes
# ----------------------------------------------------------------------


@dataclass(frozen=True)
class ProbeRecord:
    gap: float
    dR: float
    dR2: float
    ratio: float | None       # gap/dR^2, None at the soliton itself


def coercivity_probe(grid: Grid, psi, R: float) -> ProbeRecord:
    s0 = soliton_jet(grid)
    u0c = s0.f.astype(complex)
    samples = psi.f if isinstance(psi, Jet) else np.asarray(psi)
    d = distance_dR(grid, samples, u0c, R)
    gap = lambda_gap(grid, psi)
    ratio = gap / d**2 if d > 0 else None
    return ProbeRecord(gap=gap, dR=d, dR2=d * d, ratio=ratio)


def orthogonal_projection(grid: Grid, u: Jet, v: Jet) -> tuple[Jet, Jet]:
    """Remove the kernel components: <u0', u> = <u0'', v> = 0 afterwards."""
    dj, d2j = du0_jet(grid), d2u0_jet(grid)
    cu = grid.integrate(dj.f * u.f) / grid.integrate(dj.f * dj.f)
    cv = grid.integrate(d2j.f * v.f) / grid.integrate(d2j.f * d2j.f)
    return u + (-cu) * dj, v + (-cv) * d2j


def draw_probe_fields(grid: Grid, rng: np.random.Generator,
                      kind: str = "bumps") -> tuple[Jet, Jet]:
    """One perturbation direction: localized bumps, a slow phase ramp,
    or the raw translation direction (negative control)."""
    if kind == "bumps":
        return random_pair(grid, rng, widths=(0.5, 3.0))
    zero = 0.0 * soliton_jet(grid)
    if kind == "ramp":
        scale = float(rng.uniform(10.0, grid.L / 2.0))
        return zero, phase_ramp_jet(grid, 1.0, scale)
    if kind == "translation":
        return du0_jet(grid), zero
    raise ValueError(f"unknown probe kind {kind!r}")


def rescale_to_dR(grid: Grid, u: Jet, v: Jet, target_dR: float,
                  R: float) -> tuple[Jet, Jet, PerturbationTriple]:
    """Scale (u, v) so the assembled field sits at the requested d_R.

    d_R is not exactly homogeneous in the amplitude (the |psi|^2 term is
    quadratic), so a couple of fixed-point passes replace the naive ratio.
    """
    s0 = soliton_jet(grid)
    u0c = s0.f.astype(complex)
    triple = PerturbationTriple.from_uv(grid, u, v)
    for _ in range(3):
        d = distance_dR(grid, triple.field(grid).f, u0c, R)
        if d == 0.0:
            break
        alpha = target_dR / d
        u, v = alpha * u, alpha * v
        triple = PerturbationTriple.from_uv(grid, u, v)
    return u, v, triple


def probe_sample(grid: Grid, rng: np.random.Generator, target_dR: float,
                 R: float, kind: str = "bumps",
                 enforce_orthogonality: bool = True
                 ) -> tuple[ProbeRecord, PerturbationTriple]:
    """Draw, project, rescale to the requested d_R, and evaluate one probe."""
    u, v = draw_probe_fields(grid, rng, kind)
    if enforce_orthogonality:
        u, v = orthogonal_projection(grid, u, v)
    _, _, triple = rescale_to_dR(grid, u, v, target_dR, R)
    return coercivity_probe(grid, triple.field(grid), R), triple


def probe_rho(grid: Grid, triple: PerturbationTriple, R: float) -> float:
    return rho(grid, triple, R)
