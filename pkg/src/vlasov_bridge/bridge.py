"""Forward and inverse maps between continuity data (f, v) and (psi, U).

The forward direction builds psi = sqrt(f) exp(i phi) with phi = Phi/2 from
the velocity splitting, reconstructs the wave-equation potential

    U = -(1/beta) [ dphi/dt + alpha (lap sqrt(f)/sqrt(f) - |grad phi|^2)
                    + gamma (A, grad phi) ]

and reports how well the pair satisfies the wave equation

    (i/beta) dpsi/dt = (alpha/beta) lap psi - (i gamma/beta)(A, grad psi) + U psi.

Nodes where f dips below a positivity floor are masked out of U and the
residual norms (the 1/sqrt(f) terms are singular there); negative f is an
error, masking everything is an error.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .calculus import (
    deriv,
    directional_derivative,
    divergence,
    gradient,
    laplacian,
    laplacian_array,
)
from .constants import Constants
from .fields import ComplexField, ScalarField, VectorField, max_norm
from .grid import Grid

FLOOR = 1e-12


def _positivity(f: ScalarField, floor: float) -> np.ndarray:
    if np.any(f.data < 0.0):
        raise ValueError("density must be nonnegative")
    valid = f.data >= floor
    if not valid.any():
        raise ValueError(f"density is below the floor {floor:g} everywhere")
    return valid


def assemble_psi(f: ScalarField, phi: ScalarField) -> ComplexField:
    """psi = sqrt(f) exp(i phi)."""
    if np.any(f.data < 0.0):
        raise ValueError("density must be nonnegative")
    return ComplexField(f.grid, np.sqrt(f.data) * np.exp(1j * phi.data))


def phase_from_psi(psi: ComplexField, floor: float = FLOOR) -> ScalarField:
    """Continuous phase, anchored to the principal argument at the corner.

    Neighbor-to-neighbor wrapped increments are accumulated axis by axis
    (the discrete line integral of Im(grad psi / psi)), so the result
    agrees with the principal argument modulo 2 pi at every node. Needs
    |psi| above the floor and neighbor phase jumps under pi.
    """
    if float(np.min(np.abs(psi.data))) < floor:
        raise ValueError(f"|psi| falls below the floor {floor:g}")
    ang = np.angle(psi.data)
    if psi.grid.dim == 1:
        return ScalarField(psi.grid, np.unwrap(ang))
    ang[:, 0, 0] = np.unwrap(ang[:, 0, 0])
    ang[:, :, 0] = np.unwrap(ang[:, :, 0], axis=1)
    ang = np.unwrap(ang, axis=2)
    return ScalarField(psi.grid, ang)


def velocity_from_psi(psi: ComplexField, a_vec: VectorField, c: Constants,
                      floor: float = FLOOR) -> VectorField:
    """v = -2 alpha grad(phase) + gamma A.

    Equivalent to i alpha (grad psi/psi - grad conj(psi)/conj(psi)) + gamma A
    up to truncation; the phase route keeps the branch explicit.
    """
    phase = phase_from_psi(psi, floor)
    return VectorField(psi.grid, -2.0 * c.alpha * gradient(phase).data + c.gamma * a_vec.data)


def inverse_bridge(psi: ComplexField, a_vec: VectorField, c: Constants,
                   floor: float = FLOOR) -> tuple[ScalarField, VectorField]:
    """Recover (f, v) from (psi, A): f = |psi|^2, v from the phase."""
    f = ScalarField(psi.grid, np.abs(psi.data) ** 2)
    return f, velocity_from_psi(psi, a_vec, c, floor)


def reconstruct_potential(f: ScalarField, phi: ScalarField, dphi_dt: ScalarField,
                          a_vec: VectorField, c: Constants,
                          floor: float = FLOOR) -> ScalarField:
    """Real potential U of the wave equation; NaN where f < floor."""
    valid = _positivity(f, floor)
    w = np.sqrt(f.data)
    lap_w = laplacian_array(w, f.grid)
    curvature = np.divide(lap_w, w, out=np.zeros_like(w), where=valid)
    grad_phi = gradient(phi)
    grad_phi_sq = np.sum(grad_phi.data ** 2, axis=0)
    advect = np.sum(a_vec.data * grad_phi.data, axis=0)
    u = -(dphi_dt.data + c.alpha * (curvature - grad_phi_sq) + c.gamma * advect) / c.beta
    u = np.where(valid, u, np.nan)
    return ScalarField(f.grid, u)


def continuity_residual(f: ScalarField, df_dt: ScalarField, v: VectorField) -> ScalarField:
    """df/dt + div(f v), pointwise."""
    fv = VectorField(f.grid, f.data * v.data)
    return ScalarField(f.grid, df_dt.data + divergence(fv).data)


def imag_potential_residual(f: ScalarField, df_dt: ScalarField, v: VectorField,
                            c: Constants, floor: float = FLOOR) -> ScalarField:
    """Imaginary part the potential would pick up: (df/dt + div(f v)) / (2 beta f).

    Vanishes exactly when the continuity equation holds. NaN below the floor.
    """
    valid = _positivity(f, floor)
    cont = continuity_residual(f, df_dt, v)
    out = np.divide(cont.data, 2.0 * c.beta * f.data,
                    out=np.full_like(f.data, np.nan), where=valid)
    return ScalarField(f.grid, np.where(valid, out, np.nan))


def schrodinger_residual(psi: ComplexField, dpsi_dt: ComplexField, u_pot: ScalarField,
                         a_vec: VectorField, c: Constants) -> ComplexField:
    """R = (i/beta) dpsi/dt - (alpha/beta) lap psi + (i gamma/beta)(A, grad psi) - U psi."""
    lap = laplacian(psi)
    adv = directional_derivative(a_vec, psi)
    r = (1j / c.beta) * dpsi_dt.data \
        - (c.alpha / c.beta) * lap.data \
        + (1j * c.gamma / c.beta) * adv.data \
        - u_pot.data * psi.data
    return ComplexField(psi.grid, r)


def apply_script_L(psi: ComplexField, dpsi_dt: ComplexField, a_vec: VectorField,
                   c: Constants) -> ComplexField:
    """Hermitian-form operator: -(i/beta) dpsi/dt + (alpha/beta) lap psi - (i gamma/beta)(A, grad psi).

    On wave-equation solutions this equals -U psi.
    """
    lap = laplacian(psi)
    adv = directional_derivative(a_vec, psi)
    out = -(1j / c.beta) * dpsi_dt.data \
        + (c.alpha / c.beta) * lap.data \
        - (1j * c.gamma / c.beta) * adv.data
    return ComplexField(psi.grid, out)


def apply_L(psi: ComplexField, dpsi_dt: ComplexField, a_vec: VectorField,
            c: Constants) -> ComplexField:
    """Anti-Hermitian-form operator: (1/beta) dpsi/dt + (i alpha/beta) lap psi + (gamma/beta)(A, grad psi).

    Identically i times apply_script_L.
    """
    lap = laplacian(psi)
    adv = directional_derivative(a_vec, psi)
    out = (1.0 / c.beta) * dpsi_dt.data \
        + (1j * c.alpha / c.beta) * lap.data \
        + (c.gamma / c.beta) * adv.data
    return ComplexField(psi.grid, out)


def pauli_shift(b0: float, c: Constants, mass: float = 1.0, charge: float = 1.0,
                c_light: float = 1.0) -> float:
    """Uniform-field energy shift -(charge * hbar_eff / (2 mass)) * b0.

    Requires the physical preset alpha = -1/(2 mass beta). Cross-checked
    against the cyclotron route: minus the rotational energy m v_s^2 / 2
    with v_s = charge * b0 * r / mass at r = hbar_eff/(mass * c_light),
    taking v_s formally equal to c_light. The two routes coincide exactly
    under that identification.
    """
    expected_alpha = -1.0 / (2.0 * mass * c.beta)
    if abs(c.alpha - expected_alpha) > 1e-12 * abs(expected_alpha):
        raise ValueError("constants are not the physical preset alpha = -1/(2 mass beta)")
    hbar = c.hbar_eff
    direct = -(charge * hbar / (2.0 * mass)) * b0
    r_orbit = hbar / (mass * c_light)
    v_s = c_light
    cyclotron = -(mass * v_s * (charge * b0 * r_orbit / mass)) / 2.0
    if abs(direct - cyclotron) > 1e-12 * max(abs(direct), 1e-300):
        raise RuntimeError("pauli shift routes disagree beyond rounding")
    return direct


@dataclass(frozen=True)
class BridgeResult:
    """Products of one forward pass at a fixed time."""

    psi: ComplexField
    u_pot: ScalarField
    phase: ScalarField
    im_u_residual: float
    schrodinger_residual: float
    valid: np.ndarray
    u2_pot: ScalarField  # U + (1/(2 alpha beta)) |gamma A|^2 / 2, squared-operator form


def forward_bridge(frame, c: Constants, floor: float = FLOOR) -> BridgeResult:
    """Run the forward map on a scenario frame.

    The frame supplies f, v, phi, their time derivatives and the vortex
    potential A; dpsi/dt follows by the chain rule, so no time stepping
    happens here.
    """
    f, phi = frame.f, frame.phi
    valid = _positivity(f, floor)
    psi = assemble_psi(f, phi)
    u = reconstruct_potential(f, phi, frame.dphi_dt, frame.a_vec, c, floor)

    im_u = imag_potential_residual(f, frame.df_dt, frame.v, c, floor)
    im_u_norm = max_norm(im_u.data)

    ratio = np.divide(frame.df_dt.data, 2.0 * f.data,
                      out=np.zeros_like(f.data), where=f.data > 0.0)
    dpsi = ComplexField(f.grid, psi.data * (ratio + 1j * frame.dphi_dt.data))
    resid = schrodinger_residual(psi, dpsi, u, frame.a_vec, c)
    resid_norm = float(np.max(np.abs(resid.data[valid])))

    a_sq = np.sum(frame.a_vec.data ** 2, axis=0)
    u2 = ScalarField(f.grid, u.data + (c.gamma ** 2) * a_sq / (4.0 * c.alpha * c.beta))
    return BridgeResult(psi, u, phi, im_u_norm, resid_norm, valid, u2)
