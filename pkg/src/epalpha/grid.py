"""Periodic torus grids and the field containers shared by every module."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class TorusGrid:
    """Uniform periodic grid on [0, length)^d with n points per axis.

    Wavenumbers per axis are k = (2*pi/length)*j for integer j in
    [-n/2, n/2).  Every operator in this package is diagonal in these
    wavenumbers; the transform convention is fixed once here (forward
    unnormalized, inverse divides by n^d) and all norms carry the
    quadrature weight (length/n)^d.
    """

    d: int
    n: int
    length: float = 2.0 * np.pi

    def __post_init__(self):
        if self.d < 1:
            raise ValueError("grid dimension d must be >= 1")
        if self.n < 8 or self.n % 2 != 0:
            raise ValueError("points per axis n must be even and >= 8")
        if not self.length > 0:
            raise ValueError("box length must be positive")
        j = np.rint(np.fft.fftfreq(self.n) * self.n).astype(np.int64)
        k1 = (2.0 * np.pi / self.length) * j
        mesh = np.meshgrid(*([k1] * self.d), indexing="ij")
        k2 = np.zeros(self.shape)
        for km in mesh:
            k2 += km * km
        # 2/3 rule on integer indices: zero every mode with any 3|j| > n.
        keep = 3 * np.abs(j) <= self.n
        mask = np.ones(self.shape, dtype=bool)
        for axis in range(self.d):
            sh = [1] * self.d
            sh[axis] = self.n
            mask &= keep.reshape(sh)
        object.__setattr__(self, "mode_index", j)
        object.__setattr__(self, "k_axes", tuple(mesh))
        object.__setattr__(self, "k2", k2)
        object.__setattr__(self, "kmag", np.sqrt(k2))
        object.__setattr__(self, "dealias_mask", mask)

    @property
    def shape(self):
        return (self.n,) * self.d

    @property
    def dx(self):
        return self.length / self.n

    @property
    def cell_volume(self):
        return (self.length / self.n) ** self.d

    @property
    def npoints(self):
        return self.n ** self.d

    def coords(self):
        """Physical coordinate meshes, each of shape (n, ..., n)."""
        x1 = np.arange(self.n) * self.dx
        return np.meshgrid(*([x1] * self.d), indexing="ij")


def same_grid(a: TorusGrid, b: TorusGrid):
    if a != b:
        raise ValueError(f"grid mismatch: {a} vs {b}")


@dataclass(frozen=True, eq=False)
class VelocityField:
    """d real components sampled on the grid; data has shape (d, n, ..., n).

    Row-major storage with the last axis fastest.  Instances are treated
    as immutable values; all operations return new fields.
    """

    grid: TorusGrid
    data: np.ndarray

    def __post_init__(self):
        data = np.ascontiguousarray(self.data, dtype=np.float64)
        expected = (self.grid.d,) + self.grid.shape
        if data.shape != expected:
            raise ValueError(
                f"component array has shape {data.shape}, expected {expected}"
            )
        object.__setattr__(self, "data", data)

    @classmethod
    def zeros(cls, grid: TorusGrid) -> "VelocityField":
        return cls(grid, np.zeros((grid.d,) + grid.shape))

    @classmethod
    def from_components(cls, grid: TorusGrid, *components) -> "VelocityField":
        return cls(grid, np.stack([np.asarray(c, dtype=np.float64) for c in components]))

    def component(self, i: int) -> np.ndarray:
        return self.data[i]

    def is_finite(self) -> bool:
        return bool(np.isfinite(self.data).all())

    def __add__(self, other: "VelocityField") -> "VelocityField":
        same_grid(self.grid, other.grid)
        return VelocityField(self.grid, self.data + other.data)

    def __sub__(self, other: "VelocityField") -> "VelocityField":
        same_grid(self.grid, other.grid)
        return VelocityField(self.grid, self.data - other.data)

    def __mul__(self, scalar: float) -> "VelocityField":
        return VelocityField(self.grid, self.data * float(scalar))

    __rmul__ = __mul__

    def __neg__(self) -> "VelocityField":
        return VelocityField(self.grid, -self.data)


@dataclass(frozen=True, eq=False)
class SpectralField:
    """Fourier coefficients of one real field component.

    One complex coefficient per grid mode, conjugate-symmetric so the
    inverse transform is real.
    """

    grid: TorusGrid
    coefficients: np.ndarray

    def __post_init__(self):
        coeffs = np.ascontiguousarray(self.coefficients, dtype=np.complex128)
        if coeffs.shape != self.grid.shape:
            raise ValueError(
                f"coefficient array has shape {coeffs.shape}, expected {self.grid.shape}"
            )
        object.__setattr__(self, "coefficients", coeffs)

    def hermitian_defect(self) -> float:
        """Max |c(-k) - conj(c(k))| relative to the largest coefficient."""
        rev = self.coefficients
        for axis in range(self.grid.d):
            rev = np.roll(np.flip(rev, axis=axis), 1, axis=axis)
        scale = np.abs(self.coefficients).max()
        if scale == 0.0:
            return 0.0
        return float(np.abs(rev - np.conj(self.coefficients)).max() / scale)
