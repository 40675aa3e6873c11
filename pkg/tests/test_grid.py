"""Grid construction, specs, and node bookkeeping."""

import numpy as np
import pytest

from vlasov_bridge.grid import Boundary, Grid


def test_line_is_cell_centered():
    g = Grid.line(-1.0, 1.0, 5, Boundary.DECAYING)
    assert g.dim == 1
    assert g.shape == (5,)
    assert g.node_count == 5
    assert g.spacing == (0.4,)
    np.testing.assert_allclose(g.axis(0), [-0.8, -0.4, 0.0, 0.4, 0.8])


def test_periodic_line_spans_one_period():
    g = Grid.line(0.0, 2.0 * np.pi, 8, Boundary.PERIODIC)
    x = g.axis(0)
    h = g.spacing[0]
    assert h == pytest.approx(2.0 * np.pi / 8)
    assert x[0] == pytest.approx(h / 2)
    # wrapping the last node by one spacing lands on the first node's image
    assert x[-1] + h == pytest.approx(2.0 * np.pi + x[0])


def test_box_shapes_and_volume():
    g = Grid.box((0.0, 0.0, 0.0), (1.0, 2.0, 3.0), (4, 5, 6), Boundary.DECAYING)
    assert g.dim == 3
    assert g.shape == (4, 5, 6)
    assert g.node_count == 4 * 5 * 6
    vol = np.prod(g.spacing)
    assert g.cell_volume == pytest.approx(vol)
    X, Y, Z = g.meshes()
    assert X.shape == (4, 5, 6)
    assert X[1, 0, 0] - X[0, 0, 0] == pytest.approx(g.spacing[0])
    assert Y[0, 1, 0] - Y[0, 0, 0] == pytest.approx(g.spacing[1])


def test_spec_roundtrip():
    g = Grid.box((-2.0, -2.0, -2.0), (2.0, 2.0, 2.0), (8, 8, 8), Boundary.DECAYING)
    g2 = Grid.from_spec(g.spec())
    assert g2.lo == g.lo
    assert g2.hi == g.hi
    assert g2.n == g.n
    assert g2.boundary is g.boundary


def test_from_spec_scalar_is_1d():
    g = Grid.from_spec({"lo": 0.0, "hi": 1.0, "n": 16})
    assert g.dim == 1
    assert g.boundary is Boundary.PERIODIC


def test_from_spec_list_promotes_to_3d():
    g = Grid.from_spec({"lo": [0.0, 0.0, 0.0], "hi": 1.0, "n": 16,
                        "boundary": "decaying"})
    assert g.dim == 3
    assert g.n == (16, 16, 16)
    assert g.boundary is Boundary.DECAYING


def test_from_spec_dim_broadcast():
    g = Grid.from_spec({"lo": -1.0, "hi": 1.0, "n": 8, "dim": 3})
    assert g.dim == 3
    assert g.lo == (-1.0, -1.0, -1.0)


@pytest.mark.parametrize("spec", [
    {"lo": 0.0, "hi": 1.0},
    {"lo": 0.0, "hi": 1.0, "n": 8, "dim": 2},
    {"lo": [0.0, 0.0], "hi": [1.0, 1.0], "n": 8},
])
def test_from_spec_rejects_bad_specs(spec):
    with pytest.raises(ValueError):
        Grid.from_spec(spec)


def test_boundary_mask_marks_edges():
    g = Grid.line(0.0, 1.0, 6, Boundary.DECAYING)
    mask = g.boundary_mask()
    assert mask.tolist() == [True, False, False, False, False, True]


def test_center_is_box_midpoint():
    g = Grid.box((-4.0, -2.0, 0.0), (4.0, 2.0, 2.0), (8, 8, 8), Boundary.DECAYING)
    np.testing.assert_allclose(g.center(), [0.0, 0.0, 1.0])
