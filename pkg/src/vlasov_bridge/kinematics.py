"""Material acceleration, Lorentz-force residual and center-of-mass moments."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .calculus import cross, deriv, divergence, gradient, laplacian_array
from .constants import Constants
from .fields import ScalarField, VectorField
from .grid import Grid


def material_derivative(v: VectorField, dv_dt: VectorField) -> VectorField:
    """dv/dt + (v, grad) v, componentwise."""
    g = v.grid
    out = np.empty_like(v.data)
    for i in range(g.dim):
        adv = v.data[0] * deriv(v.data[i], 0, g)
        for ax in range(1, g.dim):
            adv = adv + v.data[ax] * deriv(v.data[i], ax, g)
        out[i] = dv_dt.data[i] + adv
    return VectorField(g, out)


def lorentz_residual(dv_material: VectorField, e_field: VectorField,
                     b_field: VectorField, v: VectorField, c: Constants) -> VectorField:
    """Residual of dv/dt|material = -gamma (E + v x B)."""
    g = v.grid
    vxb = cross(v, b_field).data if g.dim == 3 else np.zeros_like(v.data)
    return VectorField(g, dv_material.data + c.gamma * (e_field.data + vxb))


def _erode(valid: np.ndarray) -> np.ndarray:
    """Shrink a mask by one node on every axis (edges drop out)."""
    out = valid.copy()
    for ax in range(valid.ndim):
        shifted = np.zeros_like(valid)
        sl_dst = [slice(None)] * valid.ndim
        sl_src = [slice(None)] * valid.ndim
        sl_dst[ax] = slice(0, -1)
        sl_src[ax] = slice(1, None)
        fwd = np.zeros_like(valid)
        fwd[tuple(sl_dst)] = valid[tuple(sl_src)]
        bwd = np.zeros_like(valid)
        bwd[tuple(sl_src)] = valid[tuple(sl_dst)]
        out &= fwd & bwd
    return out


def _pad3(vec: np.ndarray) -> tuple[float, float, float]:
    out = [0.0, 0.0, 0.0]
    for i, val in enumerate(vec):
        out[i] = float(val)
    return tuple(out)


@dataclass(frozen=True)
class ComReport:
    """Density-weighted moments and integral-identity gaps."""

    n_total: float
    com_accel: tuple[float, float, float]
    mean_grad_u: tuple[float, float, float]
    identity_gaps: dict[str, float]

    def as_dict(self) -> dict:
        return {
            "n_total": self.n_total,
            "com_accel": list(self.com_accel),
            "mean_grad_u": list(self.mean_grad_u),
            "identity_gaps": dict(self.identity_gaps),
        }


def moment_identity_gaps(f: ScalarField, v: VectorField,
                         c: Constants) -> tuple[dict[str, float], dict[str, float]]:
    """Integration-by-parts identity gaps behind the moment reduction.

    Returns (gaps, scales). Each gap is the absolute residual of one
    identity, maximised over components; the matching scale is the L1 norm
    of the larger integrand, the magnitude against which the cancellation
    happens. Keys:

      advective_moment          int v div(f v) + int f (v, grad) v  = 0
      amplitude_curvature_moment int f grad(lap w / w) + 2 int lap(w) grad(w) = 0,  w = sqrt(f)
      gradient_self_flux        int Y div Y = 0 for Y = -grad(w)
      quantum_pressure_mean     |(2 alpha^2/gamma) <grad(lap w/w)>|  (droppable term)
    """
    g = f.grid
    vol = g.cell_volume
    n_total = float(f.data.sum() * vol)

    gaps: dict[str, float] = {}
    scales: dict[str, float] = {}

    fv = VectorField(g, f.data * v.data)
    div_fv = divergence(fv).data
    adv = material_derivative(v, VectorField.zero(g)).data  # (v, grad) v
    gaps["advective_moment"] = max(
        abs(float((v.data[i] * div_fv + f.data * adv[i]).sum() * vol))
        for i in range(g.dim)
    )
    scales["advective_moment"] = max(
        max(float(np.abs(v.data[i] * div_fv).sum() * vol),
            float(np.abs(f.data * adv[i]).sum() * vol))
        for i in range(g.dim)
    )

    w = np.sqrt(f.data)
    lap_w = laplacian_array(w, g)
    ratio = np.divide(lap_w, w, out=np.zeros_like(w), where=w > 0.0)
    grad_ratio = np.stack([deriv(ratio, ax, g) for ax in range(g.dim)])
    grad_w = np.stack([deriv(w, ax, g) for ax in range(g.dim)])
    gaps["amplitude_curvature_moment"] = max(
        abs(float((f.data * grad_ratio[i] + 2.0 * lap_w * grad_w[i]).sum() * vol))
        for i in range(g.dim)
    )
    scales["amplitude_curvature_moment"] = max(
        max(float(np.abs(f.data * grad_ratio[i]).sum() * vol),
            2.0 * float(np.abs(lap_w * grad_w[i]).sum() * vol))
        for i in range(g.dim)
    )

    y_field = VectorField(g, -grad_w)
    div_y = divergence(y_field).data
    gaps["gradient_self_flux"] = max(
        abs(float((y_field.data[i] * div_y).sum() * vol)) for i in range(g.dim)
    )
    scales["gradient_self_flux"] = max(
        float(np.abs(y_field.data[i] * div_y).sum() * vol) for i in range(g.dim)
    )

    coeff = 2.0 * c.alpha ** 2 / c.gamma
    qp = coeff * np.array(
        [float((f.data * grad_ratio[i]).sum() * vol) for i in range(g.dim)]
    ) / n_total
    gaps["quantum_pressure_mean"] = float(np.max(np.abs(qp)))
    scales["quantum_pressure_mean"] = abs(coeff) * max(
        float(np.abs(f.data * grad_ratio[i]).sum() * vol) for i in range(g.dim)
    ) / n_total
    return gaps, scales


def com_diagnostics(frame, e_field: VectorField, b_field: VectorField,
                    u_pot: ScalarField, c: Constants,
                    boundary_floor: float = 1e-10) -> ComReport:
    """Center-of-mass acceleration -gamma(<E> + <v x B>) and related integrals.

    Requires a decaying grid whose density really is negligible on the
    boundary shell (checked against boundary_floor). <.> denotes the
    density-weighted mean (1/N) integral f (.) dV. identity_gaps holds the
    integration-by-parts identities behind the moment reduction:

      advective_moment          int v div(f v) + int f (v, grad) v  = 0
      amplitude_curvature_moment int f grad(lap w / w) + 2 int lap(w) grad(w) = 0,  w = sqrt(f)
      gradient_self_flux        int Y div Y = 0 for Y = -grad(w)
      quantum_pressure_mean     |(2 alpha^2/gamma) <grad(lap w/w)>|  (droppable term)
      potential_balance         relative gap of -(1/(2 alpha beta)) com_accel = -<grad U>
    """
    g: Grid = frame.grid
    if g.periodic:
        raise ValueError("center-of-mass diagnostics need a decaying grid")
    f = frame.f
    edge_mask = g.boundary_mask()
    edge = float(np.max(np.abs(f.data[edge_mask])))
    interior = float(np.max(np.abs(f.data[~edge_mask])))
    if edge > boundary_floor * max(interior, 1e-300):
        raise ValueError(
            f"boundary floor violated: edge density {edge:.3e} vs interior {interior:.3e}"
        )

    vol = g.cell_volume
    n_total = float(f.data.sum() * vol)

    mean_e = np.array([float((f.data * e_field.data[i]).sum() * vol) for i in range(g.dim)]) / n_total
    if g.dim == 3:
        vxb = cross(frame.v, b_field).data
        mean_vxb = np.array([float((f.data * vxb[i]).sum() * vol) for i in range(3)]) / n_total
    else:
        mean_vxb = np.zeros(1)
    com_accel = -c.gamma * (mean_e + mean_vxb)

    # <grad U> over the eroded valid mask; outside it f <= floor anyway
    valid = np.isfinite(u_pot.data)
    use = _erode(valid)
    u_fill = np.where(valid, u_pot.data, 0.0)
    weight = np.where(use, f.data, 0.0)
    grad_u = np.stack([deriv(u_fill, ax, g) for ax in range(g.dim)])
    mean_grad_u = np.array([float((weight * grad_u[i]).sum() * vol) for i in range(g.dim)]) / n_total

    gaps, _ = moment_identity_gaps(f, frame.v, c)

    lhs = -com_accel / (2.0 * c.alpha * c.beta)
    rhs = -mean_grad_u
    gaps["potential_balance"] = float(
        np.max(np.abs(lhs - rhs)) / max(np.max(np.abs(rhs)), 1e-300)
    )

    return ComReport(n_total, _pad3(com_accel), _pad3(mean_grad_u), gaps)
