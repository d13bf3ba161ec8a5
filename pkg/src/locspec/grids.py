"""Uniform phase-space sampling lattices and complex fields sampled on them.

A :class:`PhaseGrid` covers the 2d phase-space axes (the d position axes
first, then the d frequency axes) with the same symmetric extent [-L, L)
and the same power-of-two point count N per axis, step h = 2L/N.

Export formats:

* CSV rows "x..., omega..., re, im" with a header line;
* a binary dump with a 32-byte header -- magic ``LOCSPEC1`` (8 bytes),
  uint32 number of axes, uint32 points per axis, float64 extent,
  8 reserved zero bytes, all little-endian -- followed by the row-major
  complex128 samples (interleaved float64 re, im).
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

__all__ = ["PhaseGrid", "GridFunction", "delta_symbol", "sample_plane"]

_MAGIC = b"LOCSPEC1"


@dataclass(frozen=True, eq=False)
class PhaseGrid:
    """d complex coordinates sampled on [-L, L)^{2d} with N points per axis."""
    d: int
    extent: float
    points: int

    def __post_init__(self):
        if self.d < 1:
            raise ValueError(f"dimension must be >= 1, got {self.d}")
        n = self.points
        if n < 16 or (n & (n - 1)) != 0:
            raise ValueError(f"points per axis must be a power of two >= 16, got {n}")
        if self.extent <= 0:
            raise ValueError(f"extent must be positive, got {self.extent}")

    @property
    def step(self) -> float:
        return 2.0 * self.extent / self.points

    def axis(self) -> np.ndarray:
        """Per-axis sample values -L, -L+h, ..., L-h."""
        return -self.extent + self.step * np.arange(self.points)

    @property
    def shape(self) -> tuple:
        return (self.points,) * (2 * self.d)

    @property
    def cell(self) -> float:
        """Phase-space volume of one cell, h^{2d}."""
        return self.step ** (2 * self.d)

    def complex_points(self) -> np.ndarray:
        """Array of shape grid.shape + (d,) holding z_j = x_j + i omega_j."""
        ax = self.axis()
        mesh = np.meshgrid(*([ax] * (2 * self.d)), indexing="ij", sparse=True)
        out = np.zeros(self.shape + (self.d,), dtype=complex)
        for j in range(self.d):
            out[..., j] = mesh[j] + 1j * mesh[self.d + j]
        return out


def default_grid(d: int) -> PhaseGrid:
    """Grid defaults: L=6, N=256 for d=1; L=5, N=64 for d=2."""
    if d == 1:
        return PhaseGrid(d=1, extent=6.0, points=256)
    if d == 2:
        return PhaseGrid(d=2, extent=5.0, points=64)
    raise ValueError("grids are provided for d <= 2 only")


@dataclass(frozen=True, eq=False)
class GridFunction:
    """Complex samples over a :class:`PhaseGrid` (shape (N,)*2d)."""
    grid: PhaseGrid
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=complex)
        if v.shape != self.grid.shape:
            raise ValueError(
                f"sample shape {v.shape} does not match grid shape {self.grid.shape}")
        object.__setattr__(self, "values", v)

    def norm2(self) -> float:
        """Grid L2 norm, sqrt(sum |f|^2 h^{2d})."""
        return float(np.sqrt((np.abs(self.values) ** 2).sum() * self.grid.cell))

    def integral(self) -> complex:
        return complex(self.values.sum() * self.grid.cell)

    def boundary_mass(self, rings: int = 1) -> float:
        """Fraction of sum |f| carried by the outermost `rings` index layers."""
        total = float(np.abs(self.values).sum())
        if total == 0.0:
            return 0.0
        inner = self.values
        sl = (slice(rings, -rings),) * inner.ndim
        interior = float(np.abs(inner[sl]).sum())
        return (total - interior) / total

    def to_csv(self, path, comment: str | None = None) -> None:
        d = self.grid.d
        cols = [f"x{j+1}" for j in range(d)] + [f"omega{j+1}" for j in range(d)] \
            + ["re", "im"]
        ax = self.grid.axis()
        idx = np.indices(self.grid.shape).reshape(2 * d, -1)
        flat = self.values.ravel()
        with open(path, "w") as fh:
            if comment:
                fh.write(f"# {comment}\n")
            fh.write(",".join(cols) + "\n")
            for pos in range(flat.size):
                coords = [f"{ax[idx[a, pos]]:.17g}" for a in range(2 * d)]
                fh.write(",".join(coords
                                  + [f"{flat[pos].real:.17g}", f"{flat[pos].imag:.17g}"])
                         + "\n")

    def to_binary(self, path) -> None:
        header = struct.pack("<8sIId8x", _MAGIC, 2 * self.grid.d,
                             self.grid.points, self.grid.extent)
        assert len(header) == 32
        with open(path, "wb") as fh:
            fh.write(header)
            fh.write(np.ascontiguousarray(self.values, dtype=np.complex128).tobytes())

    @staticmethod
    def from_binary(path) -> "GridFunction":
        with open(path, "rb") as fh:
            header = fh.read(32)
            magic, naxes, points, extent = struct.unpack("<8sIId8x", header)
            if magic != _MAGIC:
                raise ValueError(f"bad magic {magic!r}; not a grid dump")
            data = np.frombuffer(fh.read(), dtype=np.complex128)
        d = naxes // 2
        grid = PhaseGrid(d=d, extent=extent, points=points)
        return GridFunction(grid=grid, values=data.reshape(grid.shape).copy())


def delta_symbol(grid: PhaseGrid) -> GridFunction:
    """Discrete unit of grid convolution: 1/h^{2d} at the origin sample."""
    values = np.zeros(grid.shape, dtype=complex)
    origin = (grid.points // 2,) * (2 * grid.d)
    values[origin] = 1.0 / grid.cell
    return GridFunction(grid=grid, values=values)


def sample_plane(fn, grid: PhaseGrid) -> GridFunction:
    """Sample a callable fn(z) (z complex, shape (..., d)) over the grid."""
    z = grid.complex_points()
    if grid.d == 1:
        vals = fn(z[..., 0])
    else:
        vals = fn(z)
    return GridFunction(grid=grid, values=np.asarray(vals, dtype=complex))
