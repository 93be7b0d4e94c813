"""Uniform cell-centered grids on boxes in 1D and 2D.

Homogeneous Neumann boundaries are realised with mirror ghost cells: the ghost
value equals the adjacent interior value, which makes the discrete Laplacian
symmetric, negative semi-definite and exactly conservative.
"""

import math
import struct
from dataclasses import dataclass
from typing import List, Sequence, Tuple, Union

import numpy as np

from gm3cert.errors import ConfigError

SNAPSHOT_MAGIC = b"GM3S"
SNAPSHOT_VERSION = 1


@dataclass(frozen=True)
class Grid:
    """A box [0, length_0] x ... discretized into n cells per axis.

    Attributes:
        dim (int): 1 or 2.
        n (Tuple[int, ...]): Number of cells per axis, at least 3.
        length (Tuple[float, ...]): Extent of the domain per axis.
    """

    dim: int
    n: Tuple[int, ...]
    length: Tuple[float, ...]

    def __post_init__(self) -> None:
        if self.dim not in (1, 2):
            raise ConfigError(f"Only 1D and 2D grids are supported, dim={self.dim}.")
        if len(self.n) != self.dim or len(self.length) != self.dim:
            raise ConfigError(
                f"A {self.dim}D grid needs {self.dim} cell counts and lengths, "
                f"got n={self.n} and length={self.length}."
            )
        if any(n_axis < 3 for n_axis in self.n):
            raise ConfigError(f"At least 3 cells per axis are required, got {self.n}.")
        if not all(math.isfinite(x) and x > 0 for x in self.length):
            raise ConfigError(f"Grid lengths must be positive, got {self.length}.")

    @classmethod
    def uniform(cls, dim: int, n: int, length: float = 1.0) -> "Grid":
        """Grid with the same cell count and length on every axis."""
        return cls(dim=dim, n=(int(n),) * dim, length=(float(length),) * dim)

    @property
    def shape(self) -> Tuple[int, ...]:
        return tuple(self.n)

    @property
    def spacings(self) -> Tuple[float, ...]:
        return tuple(L / n for L, n in zip(self.length, self.n))

    @property
    def spacing(self) -> float:
        """The smallest cell width, which is what stability bounds care about."""
        return min(self.spacings)

    @property
    def cell_volume(self) -> float:
        return math.prod(self.spacings)

    @property
    def measure(self) -> float:
        """|Ω|, the product of the lengths."""
        return math.prod(self.length)

    def centers(self, axis: int = 0) -> np.ndarray:
        """Cell-center coordinates (i + 1/2) h along one axis."""
        h = self.spacings[axis]
        return (np.arange(self.n[axis]) + 0.5) * h

    def mesh(self) -> List[np.ndarray]:
        """Cell-center coordinates broadcast to the full grid shape."""
        axes = [self.centers(k) for k in range(self.dim)]
        return list(np.meshgrid(*axes, indexing="ij"))


@dataclass(frozen=True)
class Field:
    """Cell values on a grid, row-major in 2D."""

    values: np.ndarray
    grid: Grid

    def __post_init__(self) -> None:
        if self.values.shape != self.grid.shape:
            raise ConfigError(
                f"Field shape {self.values.shape} doesn't match grid shape "
                f"{self.grid.shape}."
            )


def pairwise_sum(values: Union[np.ndarray, Sequence[float]]) -> float:
    """Sums values along a fixed binary tree.

    The array is flattened in row-major order and neighbouring pairs are added
    level by level, padding odd levels with an exact zero. The result only
    depends on the values, never on how they were produced or on thread count.
    """
    level = np.asarray(values, dtype=float).ravel()
    if level.size == 0:
        return 0.0
    while level.size > 1:
        if level.size % 2:
            level = np.append(level, 0.0)
        level = level[0::2] + level[1::2]
    return float(level[0])


def _mirror_pad(values: np.ndarray) -> np.ndarray:
    return np.pad(values, 1, mode="edge")


def laplacian_values(values: np.ndarray, grid: Grid) -> np.ndarray:
    """Second-order Neumann Laplacian of raw cell values."""
    padded = _mirror_pad(values)
    result = np.zeros_like(values, dtype=float)
    for axis, h in enumerate(grid.spacings):
        lo = [slice(1, -1)] * grid.dim
        hi = [slice(1, -1)] * grid.dim
        lo[axis] = slice(0, -2)
        hi[axis] = slice(2, None)
        result += (padded[tuple(lo)] - 2.0 * values + padded[tuple(hi)]) / (h * h)
    return result


def laplacian(field: Field) -> Field:
    """Discrete Laplacian with zero-flux mirror ghost cells.

    Args:
        field (Field): Finite cell values.

    Returns:
        Field: Central second differences per axis. At a boundary the ghost value
            equals the adjacent interior value, so the boundary stencil reduces to
            (u_neighbor - u_cell) / h^2 for that side.
    """
    return Field(laplacian_values(field.values, field.grid), field.grid)


def gradient_values(values: np.ndarray, grid: Grid) -> List[np.ndarray]:
    """Central-difference gradient per axis with mirror ghost cells."""
    padded = _mirror_pad(values)
    gradient = []
    for axis, h in enumerate(grid.spacings):
        lo = [slice(1, -1)] * grid.dim
        hi = [slice(1, -1)] * grid.dim
        lo[axis] = slice(0, -2)
        hi[axis] = slice(2, None)
        gradient.append((padded[tuple(hi)] - padded[tuple(lo)]) / (2.0 * h))
    return gradient


def integrate_values(values: np.ndarray, grid: Grid) -> float:
    """Midpoint quadrature of raw cell values over the whole domain."""
    return pairwise_sum(values) * grid.cell_volume


def integrate_field(field: Field) -> float:
    """Integrates a field over Ω with the midpoint rule.

    Uses `pairwise_sum`, so the result is bitwise reproducible.
    """
    return integrate_values(field.values, field.grid)


def field_norm(field: Field, order: float = 2.0) -> float:
    """Averaged L^p norm, or the max norm for ``order=math.inf``.

    For finite p the norm is ``((1/|Ω|) ∫ |u|^p dx)^(1/p)``, i.e. it carries the
    1/|Ω| normalization, so the norm of a constant is that constant.

    Args:
        field (Field): Cell values.
        order (float, optional): p >= 1 or ``math.inf``. Defaults to 2.

    Raises:
        ValueError: If order < 1.

    Returns:
        float: The norm.
    """
    if not order >= 1:
        raise ValueError(f"Norm order must be >= 1 or inf, got {order!r}.")
    magnitude = np.abs(field.values)
    if math.isinf(order):
        return float(np.max(magnitude))
    mean = integrate_field(Field(magnitude**order, field.grid)) / field.grid.measure
    return float(mean ** (1.0 / order))


def encode_snapshot(grid: Grid, t: float, components: Sequence[np.ndarray]) -> bytes:
    """Encodes grid, time and component values as a little-endian binary snapshot.

    Layout: magic ``GM3S``, u32 version, u32 dim, u32 cells per axis, f64 length
    per axis, f64 time, u32 component count, then each component's values as f64
    in row-major order.
    """
    header = bytearray(SNAPSHOT_MAGIC)
    header += struct.pack("<II", SNAPSHOT_VERSION, grid.dim)
    header += struct.pack(f"<{grid.dim}I", *grid.n)
    header += struct.pack(f"<{grid.dim}d", *grid.length)
    header += struct.pack("<dI", float(t), len(components))
    body = b"".join(
        np.ascontiguousarray(values, dtype="<f8").tobytes() for values in components
    )
    return bytes(header) + body


def decode_snapshot(data: bytes) -> Tuple[Grid, float, List[np.ndarray]]:
    """Decodes a binary snapshot written by `encode_snapshot`.

    Raises:
        ValueError: If the magic, version or size don't match.
    """
    if data[:4] != SNAPSHOT_MAGIC:
        raise ValueError("Not a gm3cert snapshot: the magic bytes 'GM3S' are missing.")
    offset = 4
    version, dim = struct.unpack_from("<II", data, offset)
    offset += 8
    if version != SNAPSHOT_VERSION:
        raise ValueError(f"Unsupported snapshot version {version}.")
    n = struct.unpack_from(f"<{dim}I", data, offset)
    offset += 4 * dim
    length = struct.unpack_from(f"<{dim}d", data, offset)
    offset += 8 * dim
    t, count = struct.unpack_from("<dI", data, offset)
    offset += 12

    grid = Grid(dim=dim, n=tuple(n), length=tuple(length))
    cells = math.prod(grid.n)
    if len(data) != offset + 8 * cells * count:
        raise ValueError(
            f"Snapshot size {len(data)} doesn't match its header "
            f"({count} components on a {grid.shape} grid)."
        )
    components = []
    for k in range(count):
        start = offset + 8 * cells * k
        values = np.frombuffer(data, dtype="<f8", count=cells, offset=start)
        components.append(values.astype(float).reshape(grid.shape))
    return grid, t, components
