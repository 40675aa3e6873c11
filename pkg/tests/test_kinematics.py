"""Material derivatives, force balance, and density-moment identities."""

import numpy as np
import pytest

from vlasov_bridge.bridge import forward_bridge
from vlasov_bridge.constants import DEFAULT_CONSTANTS as C
from vlasov_bridge.em import electric_field, magnetic_field
from vlasov_bridge.fields import ScalarField, VectorField
from vlasov_bridge.grid import Boundary, Grid
from vlasov_bridge.kinematics import (
    com_diagnostics,
    lorentz_residual,
    material_derivative,
    moment_identity_gaps,
)
from vlasov_bridge.scenarios import example1, example2


def decaying_gaussian_fixture(n):
    g = Grid.box((-8.0,) * 3, (8.0,) * 3, (n,) * 3, Boundary.DECAYING)
    X, Y, Z = g.meshes()
    sig = (1.6, 2.0, 1.7)
    f = np.exp(-(X**2 / (2 * sig[0]**2) + Y**2 / (2 * sig[1]**2)
                 + Z**2 / (2 * sig[2]**2)))
    rng = np.random.default_rng(3)
    env = np.exp(-(X**2 + Y**2 + Z**2) / (2 * 2.5**2))
    coef = [rng.uniform(-1, 1, 4) for _ in range(3)]
    v = np.stack([env * (c0 + c1 * X + c2 * Y + c3 * Z)
                  for (c0, c1, c2, c3) in coef])
    return ScalarField(g, f), VectorField(g, v)


def test_material_derivative_polynomial_closed_form():
    g = Grid.box((-1.0,) * 3, (1.0,) * 3, (16,) * 3, Boundary.DECAYING)
    X, Y, Z = g.meshes()
    v = VectorField(g, np.stack([X, 2 * Y, np.zeros_like(Z)]))
    dv_dt = VectorField(g, np.stack([np.ones_like(X)] * 3))
    out = material_derivative(v, dv_dt)
    # (v . grad) v = (x, 4y, 0) for this linear field
    np.testing.assert_allclose(out.data[0], 1.0 + X, atol=1e-12)
    np.testing.assert_allclose(out.data[1], 1.0 + 4 * Y, atol=1e-12)
    np.testing.assert_allclose(out.data[2], 1.0, atol=1e-12)


@pytest.mark.parametrize("make,t", [(example1, 0.5), (example2, 0.4)])
def test_lorentz_residual_vanishes_on_examples(make, t):
    sc = make()
    fr = sc.frame(t)
    e = electric_field(fr, C)
    b = magnetic_field(fr.v, C)
    dv_mat = material_derivative(fr.v, fr.dv_dt)
    res = lorentz_residual(dv_mat, e, b, fr.v, C)
    scale = max(dv_mat.max_norm(), abs(C.gamma) * e.max_norm(), 1.0)
    assert res.max_norm() <= 1e-13 * scale


def test_moment_identities_on_symmetric_gaussian():
    f, v = decaying_gaussian_fixture(64)
    gaps, scales = moment_identity_gaps(f, v, C)
    assert set(gaps) == {"advective_moment", "amplitude_curvature_moment",
                         "gradient_self_flux", "quantum_pressure_mean"}
    for key, gap in gaps.items():
        assert gap <= 1e-4 * scales[key], key


def test_amplitude_curvature_moment_second_order():
    def skew(n):
        g = Grid.box((-8.0,) * 3, (8.0,) * 3, (n,) * 3, Boundary.DECAYING)
        X, Y, Z = g.meshes()
        f = (np.exp(-((X - 0.3)**2 + (Y + 0.2)**2 + (Z - 0.1)**2) / (2 * 1.1**2))
             + 0.5 * np.exp(-((X + 0.5)**2 + (Y - 0.4)**2 + (Z + 0.3)**2)
                            / (2 * 1.4**2)))
        rng = np.random.default_rng(3)
        env = np.exp(-(X**2 + Y**2 + Z**2) / (2 * 2.5**2))
        coef = [rng.uniform(-1, 1, 4) for _ in range(3)]
        v = np.stack([env * (c0 + c1 * X + c2 * Y + c3 * Z)
                      for (c0, c1, c2, c3) in coef])
        gaps, _ = moment_identity_gaps(ScalarField(g, f), VectorField(g, v), C)
        return gaps["amplitude_curvature_moment"]

    ratio = skew(32) / skew(64)
    assert 3.5 <= ratio <= 4.5


def test_com_diagnostics_example1_balance():
    sc = example1(a_slope=2.0)
    fr = sc.frame(0.5)
    e = electric_field(fr, C)
    b = magnetic_field(fr.v, C)
    res = forward_bridge(fr, C)
    rep = com_diagnostics(fr, e, b, res.u_pot, C)
    np.testing.assert_allclose(rep.com_accel, [2.0, 0.0, 0.0], atol=1e-10)
    np.testing.assert_allclose(rep.mean_grad_u, [-2.0, 0.0, 0.0], atol=1e-10)
    assert rep.identity_gaps["potential_balance"] <= 1e-3
    doc = rep.as_dict()
    assert set(doc) == {"n_total", "com_accel", "mean_grad_u", "identity_gaps"}


def test_com_diagnostics_rejects_boundary_mass():
    sc = example1()
    small = Grid.line(-2.0, 2.0, 64, Boundary.DECAYING)
    fr = sc.frame(0.0, small)  # f ~ e^-2 at the box edge
    e = electric_field(fr, C)
    b = magnetic_field(fr.v, C)
    res = forward_bridge(fr, C)
    with pytest.raises(ValueError, match="boundary floor"):
        com_diagnostics(fr, e, b, res.u_pot, C)
