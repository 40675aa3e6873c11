"""Electromagnetic analogue of the continuity flow.

chi plays the scalar potential, the vortex potential A the vector
potential, and the derived fields are

    E = -grad(chi) - dA/dt = -(1/gamma)(dv/dt + grad(|v|^2/2))
    B = (1/gamma) curl v,    D = eps_bar E,    B = mu_bar H.

A scenario is strongly agreed when the analogue Ampere and Gauss laws
hold with the density as source: dD/dt + f v = curl H and div D = f.
Otherwise it is weakly agreed (the homogeneous pair div B = 0 and
curl E = -dB/dt holds identically).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .calculus import curl, divergence, gradient, laplacian
from .constants import Constants
from .fields import ScalarField, VectorField, max_norm


def chi_field(frame, c: Constants) -> ScalarField:
    """chi = (|v|^2/2 - 2 alpha dphi/dt) / gamma."""
    v_sq = np.sum(frame.v.data ** 2, axis=0)
    data = (0.5 * v_sq - 2.0 * c.alpha * frame.dphi_dt.data) / c.gamma
    return ScalarField(frame.grid, data)


def chi_field_via_potential(frame, u_pot: ScalarField, c: Constants) -> ScalarField:
    """Definitional route through the reconstructed potential.

    chi = (2 alpha beta / gamma) [ (1/(2 alpha beta)) |gamma A|^2/2 + U
          + (alpha/beta) lap sqrt(f)/sqrt(f) ].

    Inherits the NaN mask of u_pot wherever the density floor bit.
    """
    g = frame.grid
    w = np.sqrt(frame.f.data)
    lap_w = np.asarray(laplacian(ScalarField(g, w)).data)
    curvature = np.divide(lap_w, w, out=np.full_like(w, np.nan), where=w > 0.0)
    a_sq = np.sum(frame.a_vec.data ** 2, axis=0)
    inner = (c.gamma ** 2) * a_sq / (4.0 * c.alpha * c.beta) \
        + u_pot.data + (c.alpha / c.beta) * curvature
    return ScalarField(g, (2.0 * c.alpha * c.beta / c.gamma) * inner)


def electric_field(frame, c: Constants) -> VectorField:
    """E = -(1/gamma)(dv/dt + grad(|v|^2/2)), the kinematic route."""
    v_sq = ScalarField(frame.grid, 0.5 * np.sum(frame.v.data ** 2, axis=0))
    data = -(frame.dv_dt.data + gradient(v_sq).data) / c.gamma
    return VectorField(frame.grid, data)


def electric_field_via_chi(frame, c: Constants, chi: ScalarField | None = None) -> VectorField:
    """E = -grad(chi) - dA/dt, the potential route."""
    if chi is None:
        chi = chi_field(frame, c)
    data = -gradient(chi).data
    if frame.da_dt is not None:
        data = data - frame.da_dt.data
    return VectorField(frame.grid, data)


def magnetic_field(v: VectorField, c: Constants) -> VectorField:
    """B = (1/gamma) curl v; identically zero on 1d grids."""
    if v.grid.dim == 1:
        return VectorField.zero(v.grid)
    return VectorField(v.grid, curl(v).data / c.gamma)


def faraday_residual(e_field: VectorField, db_dt: VectorField) -> VectorField:
    """curl E + dB/dt; zero by construction on 1d grids."""
    if e_field.grid.dim == 1:
        return VectorField.zero(e_field.grid)
    return VectorField(e_field.grid, curl(e_field).data + db_dt.data)


@dataclass(frozen=True)
class AgreementReport:
    verdict: str  # "Strong" or "Weak"
    ampere_residual: float
    gauss_residual: float
    scale: float
    tol: float

    def as_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "ampere": self.ampere_residual,
            "gauss": self.gauss_residual,
        }


def classify_agreement(frame, d_field: VectorField, h_field: VectorField,
                       dd_dt: VectorField, c: Constants,
                       tol_agree: float = 1e-6) -> AgreementReport:
    """Check the sourced analogue laws dD/dt + f v = curl H and div D = f.

    The caller supplies D and dD/dt (either eps_bar * E or a
    scenario-specific ansatz). Residual max-norms are compared against
    tol_agree relative to max(|f|, |curl H|).
    """
    g = frame.grid
    curl_h = curl(h_field).data if g.dim == 3 else np.zeros_like(d_field.data)
    ampere = dd_dt.data + frame.f.data * frame.v.data - curl_h
    gauss = divergence(d_field).data - frame.f.data
    scale = max(frame.f.max_norm(), float(np.max(np.abs(curl_h))), 1e-300)
    a_res = float(np.max(np.abs(ampere)))
    g_res = float(np.max(np.abs(gauss)))
    verdict = "Strong" if (a_res <= tol_agree * scale and g_res <= tol_agree * scale) else "Weak"
    return AgreementReport(verdict, a_res, g_res, scale, tol_agree)


@dataclass(frozen=True)
class EmFields:
    chi: ScalarField
    e_field: VectorField
    b_field: VectorField
    d_field: VectorField
    h_field: VectorField


def em_fields(frame, c: Constants, d_field: VectorField | None = None,
              h_field: VectorField | None = None) -> EmFields:
    """Bundle the analogue fields; defaults D = eps_bar E and H = B/mu_bar."""
    chi = chi_field(frame, c)
    e = electric_field(frame, c)
    b = magnetic_field(frame.v, c)
    if d_field is None:
        d_field = VectorField(frame.grid, c.eps_bar * e.data)
    if h_field is None:
        h_field = VectorField(frame.grid, b.data / c.mu_bar)
    return EmFields(chi, e, b, d_field, h_field)


def gauss_chi_gap(d_field: VectorField, chi: ScalarField, c: Constants) -> float:
    """Max-norm of div D + eps_bar lap(chi); zero when div D = -eps_bar lap chi."""
    val = divergence(d_field).data + c.eps_bar * laplacian(chi).data
    return max_norm(val)
