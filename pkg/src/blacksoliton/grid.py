"""Uniform symmetric grids on [-L, L] with fourth-order calculus.

Everything downstream (profiles, functionals, operators) works on plain
numpy arrays sampled on one of these grids.  The grid owns the three
numerical primitives the rest of the package is allowed to use:

* ``diff``       -- first / second derivative, 4th-order stencils,
* ``integrate``  -- composite Simpson over the full grid,
* ``integrate_window`` / ``cumulative`` -- the same accuracy on subwindows.

Grids are immutable; all functions are pure.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np


class GridTooSmall(ValueError):
    """Grid has too few nodes (or too short a box) for the requested operation."""


class NotOnGrid(ValueError):
    """A coordinate that must coincide with a grid node does not."""


# 4th-order first-derivative boundary rows (unit spacing, divide by 12h).
_D1_EDGE0 = np.array([-25.0, 48.0, -36.0, 16.0, -3.0])
_D1_EDGE1 = np.array([-3.0, -10.0, 18.0, -6.0, 1.0])
# 4th-order second-derivative boundary rows (divide by 12h^2).
_D2_EDGE0 = np.array([45.0, -154.0, 214.0, -156.0, 61.0, -10.0])
_D2_EDGE1 = np.array([10.0, -15.0, -4.0, 14.0, -6.0, 1.0])


@dataclass(frozen=True)
class Grid:
    """Uniform grid x_j = -L + j*h, j = 0..N-1, with h = 2L/(N-1).

    N must be odd so that x = 0 is a node and the panel count is even
    (composite Simpson needs that).
    """

    L: float
    N: int

    def __post_init__(self) -> None:
        if not (self.L > 0):
            raise GridTooSmall(f"box half-length must be positive, got L={self.L}")
        if self.N < 9:
            raise GridTooSmall(f"need at least 9 nodes, got N={self.N}")
        if self.N % 2 == 0:
            raise GridTooSmall(f"node count must be odd so x=0 is a node, got N={self.N}")

    @property
    def h(self) -> float:
        return 2.0 * self.L / (self.N - 1)

    @cached_property
    def x(self) -> np.ndarray:
        x = np.linspace(-self.L, self.L, self.N)
        x.flags.writeable = False
        return x

    @property
    def center(self) -> int:
        """Index of the node at x = 0."""
        return (self.N - 1) // 2

    def node_index(self, a: float) -> int:
        """Index of the node at coordinate a; NotOnGrid if a is off-node."""
        j = (a + self.L) / self.h
        k = int(round(j))
        if not (0 <= k < self.N) or abs(j - k) > 1e-9 * max(1.0, abs(j)):
            raise NotOnGrid(f"{a} is not a node of the grid (L={self.L}, h={self.h})")
        return k

    def check_field(self, f: np.ndarray) -> np.ndarray:
        f = np.asarray(f)
        if f.shape != (self.N,):
            raise ValueError(f"field shape {f.shape} does not match grid N={self.N}")
        if not np.all(np.isfinite(f)):
            raise ValueError("field contains non-finite entries")
        return f

    # ------------------------------------------------------------------
    # differentiation
    # ------------------------------------------------------------------

    def diff(self, f: np.ndarray, order: int = 1) -> np.ndarray:
        """4th-order finite-difference derivative of order 1 or 2.

        Centered 5-point stencils inside, one-sided stencils on the two
        nodes at each end, mirrored so parity is preserved to roundoff.
        """
        f = self.check_field(f)
        h = self.h
        out = np.empty_like(f, dtype=np.result_type(f, float))
        if order == 1:
            out[2:-2] = (f[:-4] - 8.0 * f[1:-3] + 8.0 * f[3:-1] - f[4:]) / (12.0 * h)
            out[0] = _D1_EDGE0 @ f[:5] / (12.0 * h)
            out[1] = _D1_EDGE1 @ f[:5] / (12.0 * h)
            # right edge: mirror image, odd operator flips sign
            out[-1] = -(_D1_EDGE0 @ f[-1:-6:-1]) / (12.0 * h)
            out[-2] = -(_D1_EDGE1 @ f[-1:-6:-1]) / (12.0 * h)
        elif order == 2:
            out[2:-2] = (-f[:-4] + 16.0 * f[1:-3] - 30.0 * f[2:-2]
                         + 16.0 * f[3:-1] - f[4:]) / (12.0 * h * h)
            out[0] = _D2_EDGE0 @ f[:6] / (12.0 * h * h)
            out[1] = _D2_EDGE1 @ f[:6] / (12.0 * h * h)
            out[-1] = _D2_EDGE0 @ f[-1:-7:-1] / (12.0 * h * h)
            out[-2] = _D2_EDGE1 @ f[-1:-7:-1] / (12.0 * h * h)
        else:
            raise ValueError(f"derivative order must be 1 or 2, got {order}")
        return out

    # ------------------------------------------------------------------
    # quadrature
    # ------------------------------------------------------------------

    @cached_property
    def _simpson_full(self) -> np.ndarray:
        w = self._simpson_weights(self.N)
        w.flags.writeable = False
        return w

    def _simpson_weights(self, n: int) -> np.ndarray:
        # n nodes, n-1 panels, n odd
        w = np.full(n, 2.0)
        w[1::2] = 4.0
        w[0] = w[-1] = 1.0
        return w * (self.h / 3.0)

    def integrate(self, f: np.ndarray) -> float | complex:
        """Composite Simpson over the whole grid."""
        f = self.check_field(f)
        val = self._simpson_full @ f
        return val if np.iscomplexobj(f) else float(val)

    def integrate_window(self, f: np.ndarray, a: float, b: float) -> float | complex:
        """Quadrature of f over [a, b]; a and b must be grid nodes.

        Even panel counts use Simpson; odd counts splice a 3/8 rule onto
        the first three panels so the whole window stays 4th order.
        """
        f = self.check_field(f)
        ia, ib = self.node_index(a), self.node_index(b)
        if ib < ia:
            raise NotOnGrid(f"window [{a}, {b}] is reversed")
        npan = ib - ia
        if npan == 0:
            return 0.0 if not np.iscomplexobj(f) else 0.0 + 0.0j
        seg = f[ia:ib + 1]
        if npan == 1:
            val = 0.5 * self.h * (seg[0] + seg[1])
        elif npan % 2 == 0:
            val = self._simpson_weights(npan + 1) @ seg
        else:
            w38 = np.array([1.0, 3.0, 3.0, 1.0]) * (3.0 * self.h / 8.0)
            val = w38 @ seg[:4]
            if npan > 3:
                val = val + self._simpson_weights(npan - 2) @ seg[3:]
        return val if np.iscomplexobj(f) else float(val)

    def cumulative(self, f: np.ndarray) -> np.ndarray:
        """Cumulative integral F(x_j) = int_{-L}^{x_j} f, 4th order.

        Interval integrals come from the cubic through the four nearest
        nodes; the two end intervals use the one-sided cubic.
        """
        f = self.check_field(f)
        h = self.h
        inc = np.empty(self.N - 1, dtype=np.result_type(f, float))
        inc[1:-1] = (h / 24.0) * (-f[:-3] + 13.0 * f[1:-2] + 13.0 * f[2:-1] - f[3:])
        inc[0] = (h / 24.0) * (9.0 * f[0] + 19.0 * f[1] - 5.0 * f[2] + f[3])
        inc[-1] = (h / 24.0) * (f[-4] - 5.0 * f[-3] + 19.0 * f[-2] + 9.0 * f[-1])
        out = np.empty(self.N, dtype=inc.dtype)
        out[0] = 0.0
        np.cumsum(inc, out=out[1:])
        return out

    def cumulative_from_center(self, f: np.ndarray) -> np.ndarray:
        """F(x_j) = int_0^{x_j} f (signed for x_j < 0)."""
        out = self.cumulative(f)
        return out - out[self.center]


# ----------------------------------------------------------------------
# jets: a field together with its derivatives
# ----------------------------------------------------------------------


@dataclass(frozen=True)
class Jet:
    """Samples of a function and its first four derivatives on a grid.

    Closed-form constructions (soliton profiles, Gaussian bumps) fill the
    entries analytically; ``from_samples`` falls back to finite
    differences.  Downstream code never differentiates a jet again, so
    whoever builds the jet decides the derivative accuracy once.
    """

    f: np.ndarray
    fx: np.ndarray
    fxx: np.ndarray
    fxxx: np.ndarray
    fxxxx: np.ndarray

    @classmethod
    def from_samples(cls, grid: Grid, f: np.ndarray) -> "Jet":
        f = grid.check_field(f)
        fx = grid.diff(f, 1)
        fxx = grid.diff(f, 2)
        fxxx = grid.diff(fxx, 1)
        fxxxx = grid.diff(fxx, 2)
        return cls(f, fx, fxx, fxxx, fxxxx)

    def __add__(self, other: "Jet") -> "Jet":
        return Jet(self.f + other.f, self.fx + other.fx, self.fxx + other.fxx,
                   self.fxxx + other.fxxx, self.fxxxx + other.fxxxx)

    def __rmul__(self, c) -> "Jet":
        return Jet(c * self.f, c * self.fx, c * self.fxx, c * self.fxxx, c * self.fxxxx)

    def astype(self, dtype) -> "Jet":
        return Jet(self.f.astype(dtype), self.fx.astype(dtype),
                   self.fxx.astype(dtype), self.fxxx.astype(dtype),
                   self.fxxxx.astype(dtype))


def as_jet(grid: Grid, f) -> Jet:
    """Pass jets through, lift plain arrays by finite differences."""
    if isinstance(f, Jet):
        return f
    return Jet.from_samples(grid, f)


def jet_product(a: Jet, b: Jet) -> Jet:
    """Jet of the pointwise product a*b (Leibniz up to 4th derivative)."""
    return Jet(
        a.f * b.f,
        a.fx * b.f + a.f * b.fx,
        a.fxx * b.f + 2.0 * a.fx * b.fx + a.f * b.fxx,
        a.fxxx * b.f + 3.0 * a.fxx * b.fx + 3.0 * a.fx * b.fxx + a.f * b.fxxx,
        a.fxxxx * b.f + 4.0 * a.fxxx * b.fx + 6.0 * a.fxx * b.fxx
        + 4.0 * a.fx * b.fxxx + a.f * b.fxxxx,
    )
