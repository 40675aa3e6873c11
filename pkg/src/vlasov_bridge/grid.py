"""Uniform cell-centered grids in one or three dimensions."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from math import prod

import numpy as np


class Boundary(Enum):
    """Boundary treatment for every axis of a grid.

    PERIODIC wraps stencils around the box. DECAYING promises that field
    magnitudes near the box edge are negligible; stencils switch to
    one-sided second-order forms there and integral diagnostics check the
    promise explicitly.
    """

    PERIODIC = "periodic"
    DECAYING = "decaying"


@dataclass(frozen=True)
class Grid:
    """Uniform tensor-product grid with nodes at cell centers.

    Node i on an axis sits at lo + (i + 1/2) h with h = (hi - lo)/n, so a
    plain node sum times the cell volume is the midpoint quadrature rule.
    """

    lo: tuple[float, ...]
    hi: tuple[float, ...]
    n: tuple[int, ...]
    boundary: Boundary = Boundary.PERIODIC

    def __post_init__(self):
        if len(self.n) not in (1, 3):
            raise ValueError("grid dimension must be 1 or 3")
        if not (len(self.lo) == len(self.hi) == len(self.n)):
            raise ValueError("lo, hi and n must have matching lengths")
        for lo, hi, n in zip(self.lo, self.hi, self.n):
            if not hi > lo:
                raise ValueError("hi must exceed lo on every axis")
            # one-sided second-order stencils need 4 nodes
            if n < 4:
                raise ValueError("need at least 4 nodes per axis")

    @staticmethod
    def line(lo: float, hi: float, n: int, boundary: Boundary = Boundary.PERIODIC) -> "Grid":
        return Grid((float(lo),), (float(hi),), (int(n),), boundary)

    @staticmethod
    def box(lo, hi, n, boundary: Boundary = Boundary.PERIODIC) -> "Grid":
        """3d grid; lo/hi/n may be scalars (cube) or length-3 sequences."""
        lo3 = tuple(float(v) for v in (lo if np.iterable(lo) else (lo,) * 3))
        hi3 = tuple(float(v) for v in (hi if np.iterable(hi) else (hi,) * 3))
        n3 = tuple(int(v) for v in (n if np.iterable(n) else (n,) * 3))
        return Grid(lo3, hi3, n3, boundary)

    @staticmethod
    def from_spec(spec) -> "Grid":
        """Build from a JSON-style mapping {lo, hi, n, boundary, dim}.

        All-scalar lo/hi/n give a 1D grid; any per-axis list makes it 3D,
        with remaining scalars broadcast across axes. An explicit dim key
        broadcasts scalars to that dimension.
        """
        try:
            lo, hi, n = spec["lo"], spec["hi"], spec["n"]
        except (KeyError, TypeError) as exc:
            raise ValueError("grid spec needs lo, hi and n") from exc
        boundary = Boundary(spec.get("boundary", "periodic"))
        length = int(spec.get("dim", 1))
        if any(np.iterable(v) for v in (lo, hi, n)):
            length = max(length,
                         *(len(v) if np.iterable(v) else 1 for v in (lo, hi, n)))
        if length not in (1, 3):
            raise ValueError("grid spec dim must be 1 or 3")
        if length > 1:
            expand = lambda v: tuple(v) if np.iterable(v) else (v,) * length
            lo, hi, n = expand(lo), expand(hi), expand(n)
            return Grid.box(lo, hi, n, boundary)
        unwrap = lambda v: v[0] if np.iterable(v) else v
        return Grid.line(unwrap(lo), unwrap(hi), unwrap(n), boundary)

    def spec(self) -> dict:
        """Inverse of from_spec: a JSON-ready description of this grid."""
        return {
            "lo": list(self.lo),
            "hi": list(self.hi),
            "n": list(self.n),
            "boundary": self.boundary.value,
        }

    @property
    def dim(self) -> int:
        return len(self.n)

    @property
    def shape(self) -> tuple[int, ...]:
        return self.n

    @property
    def spacing(self) -> tuple[float, ...]:
        return tuple((hi - lo) / n for lo, hi, n in zip(self.lo, self.hi, self.n))

    @property
    def cell_volume(self) -> float:
        return prod(self.spacing)

    @property
    def node_count(self) -> int:
        return prod(self.n)

    @property
    def periodic(self) -> bool:
        return self.boundary is Boundary.PERIODIC

    def axis(self, i: int) -> np.ndarray:
        """Cell-center coordinates along axis i."""
        h = self.spacing[i]
        return self.lo[i] + (np.arange(self.n[i]) + 0.5) * h

    def meshes(self) -> tuple[np.ndarray, ...]:
        """Coordinate arrays of full grid shape, one per axis."""
        return tuple(np.meshgrid(*(self.axis(i) for i in range(self.dim)), indexing="ij"))

    def center(self) -> tuple[float, ...]:
        return tuple((lo + hi) / 2.0 for lo, hi in zip(self.lo, self.hi))

    def boundary_mask(self) -> np.ndarray:
        """True on the outermost node shell of every axis."""
        mask = np.zeros(self.shape, dtype=bool)
        for ax in range(self.dim):
            sl = [slice(None)] * self.dim
            sl[ax] = 0
            mask[tuple(sl)] = True
            sl[ax] = -1
            mask[tuple(sl)] = True
        return mask
