"""Helmholtz splitting of the mean velocity: v = -alpha grad(Phi) + gamma A.

Sources follow from the splitting: lap(Phi) = -(1/alpha) div v and
curl(A) = (1/gamma) curl v with div A = 0. Periodic grids are solved in
Fourier space with the symbols of the package's own difference stencils,
so the recomposition and div A = 0 hold to rounding. Decaying grids use a
matrix-free conjugate-gradient solve of the compact Laplacian with
zero-exterior ghost nodes, which presumes sources negligible at the box
edge.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from scipy.sparse.linalg import LinearOperator, cg

from .calculus import curl, divergence, deriv, gradient
from .constants import Constants
from .fields import ScalarField, VectorField
from .grid import Grid

log = logging.getLogger("vlasov_bridge.helmholtz")

CG_RTOL = 1e-10
CG_MAXITER = 10_000


def _wavenumbers(grid: Grid) -> list[np.ndarray]:
    """Angular wavenumber arrays, one per axis, broadcast to grid shape."""
    ks = []
    for ax in range(grid.dim):
        k = 2.0 * np.pi * np.fft.fftfreq(grid.n[ax], d=grid.spacing[ax])
        shape = [1] * grid.dim
        shape[ax] = grid.n[ax]
        ks.append(k.reshape(shape))
    return ks


def _central_symbols(grid: Grid) -> list[np.ndarray]:
    """s_j = sin(k h)/h, the central-difference symbol divided by i."""
    return [np.sin(k * h) / h for k, h in zip(_wavenumbers(grid), grid.spacing)]


def _compact_symbol(grid: Grid) -> np.ndarray:
    """Eigenvalues of minus the compact Laplacian stencil (positive)."""
    out = 0.0
    for k, h in zip(_wavenumbers(grid), grid.spacing):
        out = out + (4.0 / (h * h)) * np.sin(k * h / 2.0) ** 2
    return out


def _shift_zero(u: np.ndarray, axis: int, forward: bool) -> np.ndarray:
    """Shift by one node along axis, filling with zeros (Dirichlet ghosts)."""
    v = np.zeros_like(u)
    src = [slice(None)] * u.ndim
    dst = [slice(None)] * u.ndim
    if forward:
        dst[axis] = slice(0, -1)
        src[axis] = slice(1, None)
    else:
        dst[axis] = slice(1, None)
        src[axis] = slice(0, -1)
    v[tuple(dst)] = u[tuple(src)]
    return v


def _neg_lap_dirichlet(u: np.ndarray, grid: Grid) -> np.ndarray:
    out = np.zeros_like(u)
    for ax, h in enumerate(grid.spacing):
        out += (2.0 * u - _shift_zero(u, ax, True) - _shift_zero(u, ax, False)) / (h * h)
    return out


def _cg_poisson(source: np.ndarray, grid: Grid) -> np.ndarray:
    """Solve -lap(u) = source with zero-exterior ghosts."""
    shape = grid.shape
    op = LinearOperator(
        (grid.node_count, grid.node_count),
        matvec=lambda x: _neg_lap_dirichlet(x.reshape(shape), grid).ravel(),
        dtype=np.float64,
    )
    sol, info = cg(op, source.ravel(), rtol=CG_RTOL, atol=0.0, maxiter=CG_MAXITER)
    if info != 0:
        raise RuntimeError(f"poisson relaxation did not converge (info={info})")
    return sol.reshape(shape)


def _check_boundary_floor(arr: np.ndarray, grid: Grid, what: str, floor: float = 1e-10):
    mask = grid.boundary_mask()
    edge = float(np.max(np.abs(arr[mask])))
    interior = float(np.max(np.abs(arr[~mask])))
    if edge > floor * max(interior, 1e-300):
        raise ValueError(
            f"{what} is not negligible at the decaying boundary "
            f"(edge {edge:.3e} vs interior {interior:.3e})"
        )


def solve_poisson(source: ScalarField) -> ScalarField:
    """Solve lap(phi) = -source.

    Periodic: spectral inverse of the compact stencil symbol, zero-mean
    gauge, and the source must have (numerically) zero mean. Decaying:
    conjugate-gradient relaxation with zero ghosts, gauged to zero at the
    reference corner; the source must be negligible at the boundary.
    """
    grid = source.grid
    if grid.periodic:
        mean = float(source.data.mean())
        if abs(mean) > 1e-10 * max(source.max_norm(), 1e-300):
            raise ValueError("periodic poisson problem needs a zero-mean source")
        shat = np.fft.fftn(source.data)
        lam = _compact_symbol(grid)
        lam_safe = np.where(lam == 0.0, 1.0, lam)
        phihat = np.where(lam == 0.0, 0.0, shat / lam_safe)
        phi = np.real(np.fft.ifftn(phihat))
        return ScalarField(grid, phi)
    _check_boundary_floor(source.data, grid, "poisson source")
    phi = _cg_poisson(source.data, grid)
    corner = (0,) * grid.dim
    return ScalarField(grid, phi - phi[corner])


def solve_vector_potential(b_field: VectorField, tol_div: float = 5e-3) -> VectorField:
    """Find A with curl(A) = b_field and div A = 0 (Coulomb gauge).

    The input must be (numerically) solenoidal. Any mean component of b
    cannot come from a periodic potential, so it is represented by the
    explicit linear gauge A += 0.5 * b_mean x (r - r_center); the curl of
    that term is exact for non-wrapping stencils only, hence constant
    fields are best handled on decaying grids.
    """
    grid = b_field.grid
    if grid.dim != 3:
        raise ValueError("vector potential requires a 3d grid")
    div_b = divergence(b_field)
    scale = max(b_field.max_norm() / min(grid.spacing), 1e-300)
    if div_b.max_norm() > tol_div * scale:
        raise ValueError("b_field is not solenoidal")

    mean = b_field.data.reshape(3, -1).mean(axis=1)
    fluct = b_field.data - mean.reshape(3, 1, 1, 1)

    if grid.periodic:
        s = _central_symbols(grid)
        denom = s[0] ** 2 + s[1] ** 2 + s[2] ** 2
        denom_safe = np.where(denom == 0.0, 1.0, denom)
        what = [np.where(denom == 0.0, 0.0, np.fft.fftn(fluct[i]) / denom_safe) for i in range(3)]
        d = [1j * si for si in s]
        ahat = [
            d[1] * what[2] - d[2] * what[1],
            d[2] * what[0] - d[0] * what[2],
            d[0] * what[1] - d[1] * what[0],
        ]
        a = np.stack([np.real(np.fft.ifftn(c)) for c in ahat])
    else:
        # componentwise lap(A) = -curl(b); approximate far from the support of b
        rhs = curl(VectorField(grid, fluct))
        a = np.stack([_cg_poisson(rhs.data[i], grid) for i in range(3)])

    if float(np.max(np.abs(mean))) > 1e-13 * max(b_field.max_norm(), 1e-300):
        cx, cy, cz = grid.center()
        x, y, z = grid.meshes()
        rx, ry, rz = x - cx, y - cy, z - cz
        a = a + 0.5 * np.stack([
            mean[1] * rz - mean[2] * ry,
            mean[2] * rx - mean[0] * rz,
            mean[0] * ry - mean[1] * rx,
        ])
    return VectorField(grid, a)


@dataclass(frozen=True)
class Decomposition:
    phi_big: ScalarField
    a_vec: VectorField
    constants: Constants

    def recompose(self) -> VectorField:
        g = self.phi_big.grid
        data = -self.constants.alpha * gradient(self.phi_big).data + self.constants.gamma * self.a_vec.data
        return VectorField(g, data)


def decompose(v: VectorField, c: Constants) -> Decomposition:
    """Split v into -alpha grad(Phi) + gamma A with div A = 0.

    On periodic grids the split is discretely exact: Phi solves the
    central-difference div(grad) problem in Fourier space and the
    remainder (including the constant harmonic part of v) goes to A. On
    decaying grids the potentials come from the relaxation solver and the
    harmonic content of v is not recoverable from local data, so the
    recomposition is only as good as the decay of the sources.
    """
    grid = v.grid
    if grid.periodic:
        s = _central_symbols(grid)
        denom = sum(si ** 2 for si in s)
        denom_safe = np.where(denom == 0.0, 1.0, denom)
        vhat = [np.fft.fftn(v.data[i]) for i in range(grid.dim)]
        # lap Phi = -(1/alpha) div v with the wide (central o central) symbol
        num = sum((1j * s[i]) * vhat[i] for i in range(grid.dim))
        phihat = np.where(denom == 0.0, 0.0, num / (c.alpha * denom_safe))
        phi = ScalarField(grid, np.real(np.fft.ifftn(phihat)))
        a = VectorField(grid, (v.data + c.alpha * gradient(phi).data) / c.gamma)
        return Decomposition(phi, a, c)

    g_src = ScalarField(grid, divergence(v).data / c.alpha)
    phi = solve_poisson(g_src)
    if grid.dim == 3:
        b = VectorField(grid, curl(v).data / c.gamma)
        a = solve_vector_potential(b)
    else:
        # 1d solenoidal fields are constants; keep the residual mean
        resid = v.data + c.alpha * gradient(phi).data
        a = VectorField(grid, np.full_like(v.data, resid.mean()) / c.gamma)
    return Decomposition(phi, a, c)


def recomposition_gap(dec: Decomposition, v: VectorField) -> float:
    """Max-norm of v - (-alpha grad Phi + gamma A)."""
    return float(np.max(np.abs(v.data - dec.recompose().data)))


def divergence_gap(dec: Decomposition) -> float:
    return divergence(dec.a_vec).max_norm()
