"""Seeded random test fields: sums of Gaussian bumps with analytic jets.

The ensembles behind every identity and coercivity check are built here,
so a single seed pins the whole suite.  Bumps carry closed-form
derivatives (Hermite-type recursion), which keeps identity residuals at
quadrature precision instead of stencil precision.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import Grid, Jet, jet_product
from .profiles import SQRT2, soliton_jet


@dataclass(frozen=True)
class BumpParams:
    centers: np.ndarray
    widths: np.ndarray
    amps: np.ndarray


def draw_bump_params(rng: np.random.Generator, grid: Grid,
                     n_range: tuple[int, int] = (3, 8),
                     widths: tuple[float, float] = (0.5, 5.0),
                     amps: tuple[float, float] = (-1.0, 1.0)) -> BumpParams:
    """Centers in [-L/2, L/2], widths and amplitudes in the given ranges.

    Widths are clipped to a tenth of the distance to the box end, so the
    Gaussian tails sit below roundoff at +-L: the boundary-sensitive
    identities (integration by parts, quadrature truncation) then never
    see the sampler.
    """
    n = int(rng.integers(n_range[0], n_range[1] + 1))
    centers = rng.uniform(-grid.L / 2.0, grid.L / 2.0, n)
    drawn = rng.uniform(widths[0], widths[1], n)
    return BumpParams(
        centers=centers,
        widths=np.minimum(drawn, (grid.L - np.abs(centers)) / 10.0),
        amps=rng.uniform(amps[0], amps[1], n),
    )


def bump_jet(grid: Grid, params: BumpParams) -> Jet:
    """Jet of sum_k a_k exp(-(x-c_k)^2 / (2 s_k^2))."""
    x = grid.x
    acc = [np.zeros(grid.N) for _ in range(5)]
    for c, s, a in zip(params.centers, params.widths, params.amps):
        u = x - c
        g = a * np.exp(-u * u / (2.0 * s * s))
        i2 = 1.0 / (s * s)
        acc[0] += g
        acc[1] += -u * i2 * g
        acc[2] += (u * u * i2 - 1.0) * i2 * g
        acc[3] += (3.0 * u - u**3 * i2) * i2 * i2 * g
        acc[4] += (3.0 - 6.0 * u * u * i2 + u**4 * i2 * i2) * i2 * i2 * g
    return Jet(*acc)


def random_bump_jet(grid: Grid, rng: np.random.Generator,
                    widths: tuple[float, float] = (0.5, 5.0)) -> Jet:
    return bump_jet(grid, draw_bump_params(rng, grid, widths=widths))


def random_pair(grid: Grid, rng: np.random.Generator,
                widths: tuple[float, float] = (0.5, 5.0)) -> tuple[Jet, Jet]:
    """Independent real and imaginary perturbation directions (u, v)."""
    return (random_bump_jet(grid, rng, widths), random_bump_jet(grid, rng, widths))


def phase_ramp_jet(grid: Grid, amp: float, ramp_scale: float) -> Jet:
    """v = amp * tanh(x/ramp_scale) * u0: a slow phase modulation.

    These directions stress the weak coercivity of the imaginary block:
    they barely increase the functional while keeping v(0) = 0.
    """
    z = grid.x / ramp_scale
    t = np.tanh(z)
    s2 = 1.0 / np.cosh(z) ** 2
    k = 1.0 / ramp_scale
    ramp = Jet(
        amp * t,
        amp * k * s2,
        -2.0 * amp * k**2 * s2 * t,
        2.0 * amp * k**3 * s2 * (3.0 * t * t - 1.0),
        8.0 * amp * k**4 * s2 * t * (2.0 - 3.0 * t * t),
    )
    return jet_product(ramp, soliton_jet(grid))


def spawn_rngs(seed: int, n: int) -> list[np.random.Generator]:
    """One independent generator per sample, reproducible from one seed."""
    return [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(n)]
