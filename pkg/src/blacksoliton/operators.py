"""Linearized operators at the black soliton and their quadratic forms.

Around psi = u0 + u + iv the second variation of Lam = S - 2E splits into
a real block K+ acting on u and an imaginary block K- acting on v, with

    L+ = -dxx + 3u0^2 - 1                 L- = -dxx + u0^2 - 1
    M+ = dxxxx - 5 dx u0^2 dx - 5u0^4 + 15u0^2 - 4
    M- = dxxxx - 3 dx u0^2 dx + u0^2 - 1
    K+- = M+- - 2 L+-

K+ u0' = 0 and K- u0 = 0 (translation and phase directions).  The two
factorizations

    <K+ u, u> = ||w_x||^2 + ||w||^2,   w = u_x + sqrt2 u0 u,
    <K- v, v> = ||q||^2 + ||p||^2,     q = v_xx + (1-u0^2) v,
                                       p = u0 v_x - u0' v,

are the workhorses: this module evaluates both sides, inverts the
substitutions (Duhamel reconstruction), assembles symmetric banded
matrices, and estimates coercivity constants by constrained Rayleigh
quotients.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from enum import Enum

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla
from scipy.linalg import eigh, svd

from .grid import Grid, GridTooSmall, Jet, as_jet
from .profiles import SQRT2, soliton_jet


class NoConvergence(RuntimeError):
    """Eigen-solve did not reach the requested residual."""


class InconsistentPQ(ValueError):
    """(p, q) violate the compatibility relation p_x = u0 q."""


class BoundaryPollution(UserWarning):
    """Field does not decay at the box ends; pointwise application is polluted there."""


class OperatorKind(Enum):
    LPLUS = "Lplus"
    LMINUS = "Lminus"
    MPLUS = "Mplus"
    MMINUS = "Mminus"
    KPLUS = "Kplus"
    KMINUS = "Kminus"


# operator = quart*f'''' + lap*f'' - div*(u0^2 f')' + V(u0)*f
# table: (quart, lap, div, V as function of u0^2)
_PARAMS = {
    OperatorKind.LPLUS: (0.0, -1.0, 0.0, lambda m: 3.0 * m - 1.0),
    OperatorKind.LMINUS: (0.0, -1.0, 0.0, lambda m: m - 1.0),
    OperatorKind.MPLUS: (1.0, 0.0, 5.0, lambda m: 15.0 * m - 5.0 * m * m - 4.0),
    OperatorKind.MMINUS: (1.0, 0.0, 3.0, lambda m: m - 1.0),
    OperatorKind.KPLUS: (1.0, 2.0, 5.0, lambda m: 9.0 * m - 5.0 * m * m - 2.0),
    OperatorKind.KMINUS: (1.0, 2.0, 3.0, lambda m: 1.0 - m),
}


def _potential(grid: Grid, kind: OperatorKind) -> np.ndarray:
    s0 = soliton_jet(grid)
    return _PARAMS[kind][3](s0.f * s0.f)


def apply(grid: Grid, kind: OperatorKind, f, boundary_tol: float = 1e-6) -> np.ndarray:
    """Pointwise application; divergence terms expanded with analytic u0 u0'."""
    j = as_jet(grid, f)
    if max(abs(j.f[0]), abs(j.f[-1])) > boundary_tol:
        warnings.warn("field does not decay at the box ends", BoundaryPollution,
                      stacklevel=2)
    quart, lap, div, _ = _PARAMS[kind]
    s0 = soliton_jet(grid)
    out = _potential(grid, kind) * j.f
    if lap:
        out = out + lap * j.fxx
    if quart:
        out = out + quart * j.fxxxx
    if div:
        # (u0^2 f')' = 2 u0 u0' f' + u0^2 f''
        out = out - div * (2.0 * s0.f * s0.fx * j.fx + s0.f * s0.f * j.fxx)
    return out


def qform(grid: Grid, kind: OperatorKind, f) -> float:
    """Quadratic form <kind f, f> as quadrature of its first-order density."""
    j = as_jet(grid, f)
    quart, lap, div, _ = _PARAMS[kind]
    s0 = soliton_jet(grid)
    grad_coef = div * s0.f * s0.f - lap
    density = grad_coef * j.fx**2 + _potential(grid, kind) * j.f**2
    if quart:
        density = density + j.fxx**2
    return float(grid.integrate(density))


# ----------------------------------------------------------------------
# factorization substitutions
# ----------------------------------------------------------------------


def w_substitution(grid: Grid, u) -> np.ndarray:
    """w = u_x + sqrt2 u0 u (vanishes exactly on the kernel direction u0')."""
    j = as_jet(grid, u)
    s0 = soliton_jet(grid)
    return j.fx + SQRT2 * s0.f * j.f


def kplus_factors(grid: Grid, u) -> tuple[np.ndarray, np.ndarray]:
    """(w, w_x) with w_x expanded through the chain rule."""
    j = as_jet(grid, u)
    s0 = soliton_jet(grid)
    w = j.fx + SQRT2 * s0.f * j.f
    wx = j.fxx + SQRT2 * (s0.fx * j.f + s0.f * j.fx)
    return w, wx


def kminus_factors(grid: Grid, v) -> tuple[np.ndarray, np.ndarray]:
    """(p, q) with p = u0 v_x - u0' v and q = v_xx + (1-u0^2) v = -L- v."""
    j = as_jet(grid, v)
    s0 = soliton_jet(grid)
    p = s0.f * j.fx - s0.fx * j.f
    q = j.fxx + (1.0 - s0.f * s0.f) * j.f
    return p, q


# ----------------------------------------------------------------------
# Duhamel reconstructions (inverses of the substitutions)
# ----------------------------------------------------------------------


def _log_cosh_scaled(x: np.ndarray) -> np.ndarray:
    """log cosh(x/sqrt2), stable for large |x|."""
    y = np.abs(x) / SQRT2
    return y + np.log1p(np.exp(-2.0 * y)) - np.log(2.0)


def _bridged_volterra(grid: Grid, w: np.ndarray, lc: np.ndarray) -> np.ndarray:
    """W(x) = int_0^x exp(2 lc(y) - 2 lc(x)) w(y) dy, marched from the center.

    Each interval integral uses the cubic through the four surrounding
    nodes of the locally-normalized integrand, so no exponential ever
    exceeds exp(2 h / sqrt2) and the accumulated value is re-damped at
    every step.
    """
    h, n, c = grid.h, grid.N, grid.center

    def interval_integral(k0: int, k1: int, ref: int) -> float:
        # integral over [x_k0, x_k1] (k1 = k0 +/- 1) of exp(2(lc - lc_ref)) w
        lo = min(k0, k1)
        if 1 <= lo and lo + 2 < n:
            idx = [lo - 1, lo, lo + 1, lo + 2]
            wts = (-1.0, 13.0, 13.0, -1.0)
        elif lo == 0:
            idx = [0, 1, 2, 3]
            wts = (9.0, 19.0, -5.0, 1.0)
        else:
            idx = [n - 4, n - 3, n - 2, n - 1]
            wts = (1.0, -5.0, 19.0, 9.0)
        g = [np.exp(2.0 * (lc[i] - lc[ref])) * w[i] for i in idx]
        val = (h / 24.0) * sum(ww * gg for ww, gg in zip(wts, g))
        return val if k1 > k0 else -val

    W = np.zeros(n)
    for j in range(c, n - 1):
        bridge = np.exp(-2.0 * (lc[j + 1] - lc[j]))
        W[j + 1] = bridge * W[j] + interval_integral(j, j + 1, j + 1)
    for j in range(c, 0, -1):
        bridge = np.exp(-2.0 * (lc[j - 1] - lc[j]))
        W[j - 1] = bridge * W[j] + interval_integral(j, j - 1, j - 1)
    return W


def reconstruct_u(grid: Grid, w: np.ndarray) -> tuple[np.ndarray, float]:
    """Solve u_x + sqrt2 u0 u = w with <u0', u> = 0.

    u = A u0' + W, W(x) = int_0^x K(x,y) w(y) dy with the kernel
    K(x,y) = cosh^2(y/sqrt2)/cosh^2(x/sqrt2); u0' spans the homogeneous
    solutions and A kills the projection on it.
    """
    w = grid.check_field(np.asarray(w, float))
    s0 = soliton_jet(grid)
    lc = _log_cosh_scaled(grid.x)
    W = _bridged_volterra(grid, w, lc)
    du0 = s0.fx
    A = -grid.integrate(du0 * W) / grid.integrate(du0 * du0)
    return A * du0 + W, float(A)


def duhamel_kernel_k1(grid: Grid) -> float:
    """K1 = sup_y int_{|y|}^{L} K(x,y) dx (closed form sqrt2, at y = 0)."""
    lc = _log_cosh_scaled(grid.x)
    sech2 = np.exp(-2.0 * lc)          # 1/cosh^2(x/sqrt2), exact in the tails
    best = 0.0
    for jy in range(grid.center, grid.N):
        y = grid.x[jy]
        val = np.exp(2.0 * lc[jy]) * grid.integrate_window(sech2, y, grid.L)
        best = max(best, val)
    return float(best)


def duhamel_kernel_kinf(grid: Grid) -> float:
    """Kinf = sup_x |int_0^x K(x,y) dy| (finite: the kernel is integrable in y)."""
    lc = _log_cosh_scaled(grid.x)
    W = _bridged_volterra(grid, np.ones(grid.N), lc)
    return float(np.max(np.abs(W)))


def reconstruct_v(grid: Grid, p: np.ndarray, q: np.ndarray,
                  consistency_tol: float = 1e-4) -> tuple[np.ndarray, float]:
    """Solve p = u0 v_x - u0' v, q = v_xx + (1-u0^2) v with <u0'', v> = 0.

    v = B u0 + Z with Z(x) = u0(x) int_0^x (p + sqrt2 q) dy - sqrt2 p(x).
    Inputs must satisfy p_x = u0 q; violating pairs are rejected.
    """
    p = grid.check_field(np.asarray(p, float))
    q = grid.check_field(np.asarray(q, float))
    px = grid.diff(p, 1)
    s0 = soliton_jet(grid)
    defect = np.max(np.abs(px - s0.f * q))
    scale = 1.0 + np.max(np.abs(px)) + np.max(np.abs(q))
    if defect > consistency_tol * scale:
        raise InconsistentPQ(
            f"p_x - u0 q has magnitude {defect:.2e} (tolerance {consistency_tol:.0e} * {scale:.2g})")
    Z = s0.f * grid.cumulative_from_center(p + SQRT2 * q) - SQRT2 * p
    B = grid.integrate(s0.fxx * Z) / (-grid.integrate(s0.fxx * s0.f))
    return B * s0.f + Z, float(B)


# ----------------------------------------------------------------------
# assembled matrices, spectra, coercivity
# ----------------------------------------------------------------------


@dataclass(frozen=True)
class OperatorMatrix:
    kind: OperatorKind
    grid: Grid
    mat: sp.csc_matrix      # interior nodes 2..N-3, homogeneous Dirichlet outside
    lo: int                 # first interior node index

    @property
    def n(self) -> int:
        return self.mat.shape[0]

    @property
    def symmetry_defect(self) -> float:
        d = self.mat - self.mat.T
        return float(np.max(np.abs(d.data))) if d.nnz else 0.0

    def restrict(self, f: np.ndarray) -> np.ndarray:
        return np.asarray(f)[self.lo:self.lo + self.n]

    def embed(self, y: np.ndarray) -> np.ndarray:
        out = np.zeros(self.grid.N)
        out[self.lo:self.lo + self.n] = y
        return out


def _central_d1(n: int, h: float) -> sp.csr_matrix:
    coef = np.array([1.0, -8.0, 8.0, -1.0]) / (12.0 * h)
    return sp.diags(coef, [-2, -1, 1, 2], shape=(n, n), format="csr")


def _central_d2(n: int, h: float) -> sp.csr_matrix:
    coef = np.array([-1.0, 16.0, -30.0, 16.0, -1.0]) / (12.0 * h * h)
    return sp.diags(coef, [-2, -1, 0, 1, 2], shape=(n, n), format="csr")


def assemble(grid: Grid, kind: OperatorKind) -> OperatorMatrix:
    """Symmetric banded Dirichlet truncation on the interior nodes."""
    if grid.N < 201:
        raise GridTooSmall("assembled operators need N >= 201")
    lo = 2
    n = grid.N - 4
    h = grid.h
    quart, lap, div, Vfun = _PARAMS[kind]
    s0 = soliton_jet(grid)
    m_int = (s0.f * s0.f)[lo:lo + n]
    A = sp.diags(Vfun(m_int), 0, format="csr")
    D2 = _central_d2(n, h)
    if lap:
        A = A + lap * D2
    if quart:
        A = A + D2 @ D2
    if div:
        D1 = _central_d1(n, h)
        A = A + div * (D1.T @ sp.diags(m_int, 0, format="csr") @ D1)
    A = (A + A.T) * 0.5
    return OperatorMatrix(kind=kind, grid=grid, mat=A.tocsc(), lo=lo)


@dataclass(frozen=True)
class SpectrumReport:
    kind: OperatorKind
    grid: Grid
    eigenvalues: np.ndarray
    residuals: np.ndarray
    boundary_mass: np.ndarray
    vectors: np.ndarray        # columns, embedded on the full grid
    spurious: np.ndarray       # bool: boundary-heavy pairs

    def lowest_clean(self) -> tuple[float, np.ndarray]:
        """Lowest eigenpair that is not boundary-localized."""
        for i in range(len(self.eigenvalues)):
            if not self.spurious[i]:
                return float(self.eigenvalues[i]), self.vectors[:, i]
        raise NoConvergence("all reported pairs are boundary-localized")


def spectrum(matop: OperatorMatrix, k: int = 10, sigma: float = -1.0,
             boundary_frac: float = 0.05, mass_tol: float = 0.01) -> SpectrumReport:
    """k smallest eigenpairs by shift-inverted Lanczos, with residuals.

    Eigenvectors carrying more than ``mass_tol`` of their mass in the
    outer ``boundary_frac`` of the box are flagged as boundary artifacts;
    they stay in the report but are skipped by ``lowest_clean``.
    """
    A = matop.mat
    if k > matop.n // 4:
        raise ValueError("asking for too many eigenpairs for this grid")
    v0 = np.full(matop.n, 1.0 / np.sqrt(matop.n))
    try:
        vals, vecs = spla.eigsh(A, k=k, sigma=sigma, which="LM", v0=v0)
    except spla.ArpackNoConvergence as exc:
        raise NoConvergence(f"Lanczos failed: {exc}") from exc
    order = np.argsort(vals)
    vals, vecs = vals[order], vecs[:, order]
    scale = float(abs(A).sum(axis=1).max())
    res = np.array([np.linalg.norm(A @ vecs[:, i] - vals[i] * vecs[:, i])
                    / np.linalg.norm(vecs[:, i]) for i in range(k)])
    x_int = matop.grid.x[matop.lo:matop.lo + matop.n]
    outer = np.abs(x_int) > (1.0 - boundary_frac) * matop.grid.L
    mass = np.array([float(np.sum(vecs[outer, i] ** 2) / np.sum(vecs[:, i] ** 2))
                     for i in range(k)])
    full = np.column_stack([matop.embed(vecs[:, i]) for i in range(k)])
    if np.any(res > 1e-8 * scale):
        raise NoConvergence(f"residuals up to {res.max():.2e} exceed 1e-8*||A||={1e-8*scale:.2e}")
    return SpectrumReport(kind=matop.kind, grid=matop.grid, eigenvalues=vals,
                          residuals=res, boundary_mass=mass, vectors=full,
                          spurious=mass > mass_tol)


def _norm_matrix(grid: Grid, lo: int, n: int, norm: str) -> sp.csc_matrix:
    h = grid.h
    D1 = _central_d1(n, h)
    D2 = _central_d2(n, h)
    G = (D1.T @ D1 + D2.T @ D2).tolil()
    if norm == "H2":
        G = G + sp.identity(n, format="lil")
    elif norm == "weak":
        # ||v_x||_{H1}^2 + v(0)^2: point mass 1/h at the center node
        c = grid.center - lo
        G[c, c] += 1.0 / h
    else:
        raise ValueError(f"unknown norm {norm!r}")
    return (0.5 * (G + G.T)).tocsc()


def coercivity_estimate(grid: Grid, kind: OperatorKind, constraint: np.ndarray,
                        norm: str, method: str = "iterate") -> float:
    """min of qform(kind, f)/norm(f)^2 over the constraint complement.

    ``constraint`` is the full-grid field whose L2-orthogonal complement
    is searched (u0' for the real block, u0'' for the imaginary one).
    The default path runs deflated inverse iteration on the pencil
    (A, G) with a fixed shift; "dense" solves the projected problem
    with LAPACK and is the validation path for small grids.
    """
    matop = assemble(grid, kind)
    A = matop.mat
    G = _norm_matrix(grid, matop.lo, matop.n, norm)
    c = matop.restrict(grid.check_field(constraint))
    if method == "dense":
        Ad, Gd = A.toarray(), G.toarray()
        basis = svd(c.reshape(1, -1))[2][1:].T      # orthonormal complement of c
        lam = eigh(basis.T @ Ad @ basis, basis.T @ Gd @ basis,
                   subset_by_index=[0, 0], eigvals_only=True)
        return float(lam[0])
    if method != "iterate":
        raise ValueError(f"unknown method {method!r}")
    # Inverse iteration for A x = lam G x subject to c.x = 0.  The KKT
    # multiplier of the constraint is eliminated each sweep by choosing
    # the K^{-1}c component so the update stays in the constraint plane.
    shift = 0.5
    lu = spla.splu((A + shift * G).tocsc())
    kc = lu.solve(c)
    x = np.ones(matop.n)
    x -= c * (c @ x) / (c @ c)
    x /= np.sqrt(x @ (G @ x))
    lam_old, stall = np.inf, 0
    for _ in range(400):
        z = lu.solve(G @ x)
        z += kc * (-(c @ z) / (c @ kc))
        x = z / np.sqrt(z @ (G @ z))
        lam = float(x @ (A @ x))
        if abs(lam - lam_old) <= 1e-12 * max(1.0, abs(lam)):
            stall += 1
            if stall >= 3:
                break
        else:
            stall = 0
        lam_old = lam
    gx = G @ x
    r = A @ x - lam * gx
    r -= c * (c @ r) / (c @ c)
    resid = np.linalg.norm(r) / np.linalg.norm(gx)
    if not np.isfinite(lam) or resid > 1e-5 * max(1.0, abs(lam)):
        raise NoConvergence(f"constrained minimization stalled (residual {resid:.2e})")
    return lam
