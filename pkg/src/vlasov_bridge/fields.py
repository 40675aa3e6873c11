"""Immutable field containers and the CSV dump format."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .grid import Grid


def _freeze(obj, name: str, arr: np.ndarray, dtype, shape: tuple[int, ...]):
    a = np.array(arr, dtype=dtype)
    if a.shape != shape:
        raise ValueError(f"{name} data has shape {a.shape}, expected {shape}")
    a.setflags(write=False)
    object.__setattr__(obj, "data", a)


@dataclass(frozen=True)
class ScalarField:
    grid: Grid
    data: np.ndarray

    def __post_init__(self):
        _freeze(self, "scalar", self.data, np.float64, self.grid.shape)

    @staticmethod
    def sample(grid: Grid, fn: Callable) -> "ScalarField":
        return ScalarField(grid, np.broadcast_to(fn(*grid.meshes()), grid.shape))

    @staticmethod
    def full(grid: Grid, value: float) -> "ScalarField":
        return ScalarField(grid, np.full(grid.shape, value))

    def max_norm(self) -> float:
        return float(np.max(np.abs(self.data)))


@dataclass(frozen=True)
class ComplexField:
    grid: Grid
    data: np.ndarray

    def __post_init__(self):
        _freeze(self, "complex", self.data, np.complex128, self.grid.shape)

    @staticmethod
    def sample(grid: Grid, fn: Callable) -> "ComplexField":
        return ComplexField(grid, np.broadcast_to(fn(*grid.meshes()), grid.shape))

    def max_norm(self) -> float:
        return float(np.max(np.abs(self.data)))


@dataclass(frozen=True)
class VectorField:
    """dim-component field; data shape is (dim, *grid.shape)."""

    grid: Grid
    data: np.ndarray

    def __post_init__(self):
        _freeze(self, "vector", self.data, np.float64, (self.grid.dim,) + self.grid.shape)

    @staticmethod
    def sample(grid: Grid, *fns: Callable) -> "VectorField":
        if len(fns) != grid.dim:
            raise ValueError("need one component function per axis")
        mesh = grid.meshes()
        return VectorField(grid, np.stack([np.broadcast_to(fn(*mesh), grid.shape) for fn in fns]))

    @staticmethod
    def zero(grid: Grid) -> "VectorField":
        return VectorField(grid, np.zeros((grid.dim,) + grid.shape))

    def component(self, i: int) -> np.ndarray:
        return self.data[i]

    def max_norm(self) -> float:
        return float(np.max(np.abs(self.data)))


def max_norm(arr: np.ndarray) -> float:
    """Max absolute value over the finite entries of an array."""
    finite = np.isfinite(arr)
    if not finite.any():
        return float("nan")
    return float(np.max(np.abs(arr[finite])))


# --- CSV dumps ------------------------------------------------------------
#
# Row-major over grid nodes, one node per row, coordinates first, values in
# 17-significant-digit decimals so re-running a config reproduces files byte
# for byte.

_COORD_HEADERS = {1: ["x"], 3: ["x", "y", "z"]}
_VECTOR_HEADERS = {1: ["vx"], 3: ["vx", "vy", "vz"]}


def _fmt(v: float) -> str:
    return f"{v:.17g}"


def field_csv(field) -> str:
    grid = field.grid
    coords = [m.ravel(order="C") for m in grid.meshes()]
    header = list(_COORD_HEADERS[grid.dim])
    if isinstance(field, ScalarField):
        cols = [field.data.ravel(order="C")]
        header += ["re"]
    elif isinstance(field, ComplexField):
        flat = field.data.ravel(order="C")
        cols = [flat.real, flat.imag]
        header += ["re", "im"]
    elif isinstance(field, VectorField):
        cols = [field.data[i].ravel(order="C") for i in range(grid.dim)]
        header += _VECTOR_HEADERS[grid.dim]
    else:
        raise TypeError(f"cannot dump {type(field).__name__}")
    lines = [",".join(header)]
    for row in zip(*coords, *cols):
        lines.append(",".join(_fmt(v) for v in row))
    return "\n".join(lines) + "\n"
