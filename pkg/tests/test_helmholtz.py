"""Velocity splitting and the grid Poisson/vector-potential solvers."""

import numpy as np
import pytest

from vlasov_bridge.calculus import curl, divergence, gradient, laplacian
from vlasov_bridge.constants import DEFAULT_CONSTANTS as C
from vlasov_bridge.fields import ScalarField, VectorField
from vlasov_bridge.grid import Boundary, Grid
from vlasov_bridge.helmholtz import (
    decompose,
    divergence_gap,
    recomposition_gap,
    solve_poisson,
    solve_vector_potential,
)
from vlasov_bridge.scenarios import random_solenoidal_field, random_velocity_field

TWO_PI = 2.0 * np.pi


def periodic_box(n=24):
    return Grid.box((0.0, 0.0, 0.0), (TWO_PI,) * 3, (n,) * 3, Boundary.PERIODIC)


@pytest.mark.parametrize("seed", range(5))
def test_periodic_roundtrip_is_exact(seed):
    g = periodic_box()
    rng = np.random.default_rng(seed)
    v = random_velocity_field(g, rng)
    dec = decompose(v, C)
    assert recomposition_gap(dec, v) <= 1e-12 * v.max_norm()
    # div A scale: amplitude over one spacing
    assert divergence_gap(dec) <= 1e-12 * dec.a_vec.max_norm() / min(g.spacing)


def test_pure_gradient_field_has_no_vortex_part():
    g = periodic_box()
    X, Y, Z = g.meshes()
    phi0 = np.sin(X) * np.cos(Y) + np.sin(2 * Z)
    v = VectorField(g, -C.alpha * gradient(ScalarField(g, phi0)).data)
    dec = decompose(v, C)
    assert dec.a_vec.max_norm() <= 1e-13
    # recovered potential matches up to the zero-mode gauge
    gap = (dec.phi_big.data - phi0) - (dec.phi_big.data - phi0).mean()
    assert float(np.max(np.abs(gap))) <= 1e-12


def test_pure_solenoidal_field_has_no_gradient_part():
    g = periodic_box()
    rng = np.random.default_rng(11)
    a0 = random_solenoidal_field(g, rng)
    v = VectorField(g, C.gamma * a0.data)
    dec = decompose(v, C)
    assert gradient(dec.phi_big).max_norm() <= 1e-12
    assert float(np.max(np.abs(dec.a_vec.data - a0.data))) <= 1e-12


def test_constant_flow_lands_in_vortex_part():
    # the harmonic (mean) component has no potential on a torus
    g = periodic_box(8)
    v = VectorField(g, np.stack([np.full(g.shape, 0.7),
                                 np.full(g.shape, -0.2),
                                 np.zeros(g.shape)]))
    dec = decompose(v, C)
    assert gradient(dec.phi_big).max_norm() <= 1e-14
    np.testing.assert_allclose(C.gamma * dec.a_vec.data, v.data, atol=1e-14)


def test_decompose_1d_periodic():
    g = Grid.line(0.0, TWO_PI, 64, Boundary.PERIODIC)
    x = g.axis(0)
    phi0 = np.sin(3 * x)
    v = VectorField(g, (-C.alpha * gradient(ScalarField(g, phi0)).data
                        + C.gamma * 0.4))
    dec = decompose(v, C)
    assert recomposition_gap(dec, v) <= 1e-13
    np.testing.assert_allclose(dec.a_vec.data, 0.4, atol=1e-13)


def test_solve_poisson_periodic_inverts_compact_stencil():
    g = periodic_box(16)
    rng = np.random.default_rng(4)
    src = rng.standard_normal(g.shape)
    src -= src.mean()
    phi = solve_poisson(ScalarField(g, src))
    np.testing.assert_allclose(laplacian(phi).data, -src, atol=1e-11)


def test_solve_poisson_periodic_rejects_nonzero_mean():
    g = periodic_box(8)
    with pytest.raises(ValueError):
        solve_poisson(ScalarField(g, np.ones(g.shape)))


def test_solve_poisson_decaying_gaussian():
    g = Grid.box((-8.0,) * 3, (8.0,) * 3, (32,) * 3, Boundary.DECAYING)
    X, Y, Z = g.meshes()
    src = np.exp(-(X**2 + Y**2 + Z**2) / 2.0)
    phi = solve_poisson(ScalarField(g, src))
    assert phi.data[0, 0, 0] == 0.0  # corner gauge
    res = laplacian(phi).data + src
    interior = ~g.boundary_mask()
    assert float(np.max(np.abs(res[interior]))) <= 1e-7 * float(np.max(src))


def test_solve_poisson_decaying_rejects_boundary_mass():
    g = Grid.box((-2.0,) * 3, (2.0,) * 3, (8,) * 3, Boundary.DECAYING)
    with pytest.raises(ValueError):
        solve_poisson(ScalarField(g, np.ones(g.shape)))


@pytest.mark.parametrize("seed", range(3))
def test_vector_potential_periodic_zero_mean(seed):
    g = periodic_box(16)
    rng = np.random.default_rng(seed)
    b = curl(random_velocity_field(g, rng, mean_scale=0.0))  # solenoidal, zero mean
    a = solve_vector_potential(b)
    assert float(np.max(np.abs(curl(a).data - b.data))) <= 1e-12 * max(
        b.max_norm(), 1.0)
    assert divergence(a).max_norm() <= 1e-12 * a.max_norm() / min(g.spacing)


def test_vector_potential_constant_field_decaying():
    g = Grid.box((-2.0,) * 3, (2.0,) * 3, (12,) * 3, Boundary.DECAYING)
    b = VectorField(g, np.stack([np.zeros(g.shape), np.zeros(g.shape),
                                 np.full(g.shape, 1.5)]))
    a = solve_vector_potential(b)
    # one-sided stencils differentiate the linear gauge term exactly
    np.testing.assert_allclose(curl(a).data, b.data, atol=1e-13)


def test_vector_potential_rejects_nonsolenoidal():
    g = periodic_box(8)
    X, Y, Z = g.meshes()
    b = VectorField(g, np.stack([np.sin(X), np.sin(Y), np.sin(Z)]))
    with pytest.raises(ValueError):
        solve_vector_potential(b)
