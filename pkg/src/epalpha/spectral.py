"""FFTs, Fourier multipliers, spectral differentiation, norms, dealiasing.

Transform normalization: forward unnormalized, inverse divides by n^d
(numpy's default).  With the quadrature weight (L/n)^d this gives the
Parseval identity

    sum_x |u(x)|^2 (L/n)^d  =  (L^d / n^{2d}) sum_k |u_hat(k)|^2,

which is what `sobolev_norm` implements at s = 0.
"""

from __future__ import annotations

import numpy as np

from .grid import SpectralField, TorusGrid, VelocityField, same_grid


def fft(grid: TorusGrid, samples: np.ndarray) -> np.ndarray:
    if samples.shape[-grid.d:] != grid.shape:
        raise ValueError(f"sample array shape {samples.shape} does not match grid {grid.shape}")
    return np.fft.fftn(samples, axes=tuple(range(-grid.d, 0)))


def ifft(grid: TorusGrid, coeffs: np.ndarray) -> np.ndarray:
    return np.fft.ifftn(coeffs, axes=tuple(range(-grid.d, 0))).real


def transform_forward(grid: TorusGrid, samples: np.ndarray) -> SpectralField:
    """Forward transform of one real component into a SpectralField."""
    if samples.shape != grid.shape:
        raise ValueError(f"sample array shape {samples.shape} does not match grid {grid.shape}")
    return SpectralField(grid, np.fft.fftn(samples))


def transform_inverse(field: SpectralField) -> np.ndarray:
    """Inverse transform back to real samples."""
    return np.fft.ifftn(field.coefficients).real


def _symbol_array(grid: TorusGrid, symbol) -> np.ndarray:
    sym = symbol(grid.kmag) if callable(symbol) else symbol
    sym = np.asarray(sym, dtype=np.float64)
    if sym.shape not in ((), grid.shape):
        sym = np.broadcast_to(sym, grid.shape)
    if not np.isfinite(sym).all():
        raise ValueError("multiplier symbol is not finite on the grid's modes")
    return sym


def apply_multiplier(u: VelocityField, symbol) -> VelocityField:
    """Scale every Fourier mode of every component by symbol(|k|).

    `symbol` is either a callable of the wavenumber magnitude or a
    precomputed array over the grid's modes.
    """
    sym = _symbol_array(u.grid, symbol)
    return VelocityField(u.grid, ifft(u.grid, fft(u.grid, u.data) * sym))


def lambda_symbol(grid: TorusGrid, s: float) -> np.ndarray:
    return (1.0 + grid.k2) ** (s / 2.0)


def helmholtz_symbol(grid: TorusGrid, alpha: float) -> np.ndarray:
    if alpha < 0:
        raise ValueError("alpha must be nonnegative")
    return 1.0 / (1.0 + alpha * alpha * grid.k2)


def lambda_s(u: VelocityField, s: float) -> VelocityField:
    """Bessel potential (1 - Laplacian)^{s/2}."""
    return apply_multiplier(u, lambda_symbol(u.grid, s))


def helmholtz_inverse(u: VelocityField, alpha: float) -> VelocityField:
    """Smoothing inverse (1 - alpha^2 Laplacian)^{-1}; identity at alpha=0."""
    return apply_multiplier(u, helmholtz_symbol(u.grid, alpha))


def lambda_s_alpha(u: VelocityField, s: float, alpha: float) -> VelocityField:
    """(1 - Laplacian)^{s/2} (1 - alpha^2 Laplacian)^{-1}, one multiplier."""
    return apply_multiplier(u, lambda_symbol(u.grid, s) * helmholtz_symbol(u.grid, alpha))


def deriv(grid: TorusGrid, samples: np.ndarray, axis: int) -> np.ndarray:
    """Spectral partial derivative of a scalar sample array along one axis."""
    return ifft(grid, fft(grid, samples) * (1j * grid.k_axes[axis]))


def jacobian(u: VelocityField) -> np.ndarray:
    """Jacobian entries (i, j) = d_j u^i, shape (d, d, n, ..., n)."""
    g = u.grid
    hat = fft(g, u.data)
    out = np.empty((g.d, g.d) + g.shape)
    for i in range(g.d):
        for j in range(g.d):
            out[i, j] = ifft(g, hat[i] * (1j * g.k_axes[j]))
    return out


def divergence(u: VelocityField) -> np.ndarray:
    """Scalar field sum_j d_j u^j."""
    g = u.grid
    hat = fft(g, u.data)
    acc = np.zeros(g.shape, dtype=np.complex128)
    for j in range(g.d):
        acc += hat[j] * (1j * g.k_axes[j])
    return ifft(g, acc)


def gradient(grid: TorusGrid, p: np.ndarray) -> VelocityField:
    """Gradient of a scalar field as a VelocityField."""
    hat = fft(grid, p)
    comps = [ifft(grid, hat * (1j * grid.k_axes[j])) for j in range(grid.d)]
    return VelocityField.from_components(grid, *comps)


def sobolev_norm_array(grid: TorusGrid, components: np.ndarray, s: float) -> float:
    """H^s norm of a stack of scalar components, shape (m, n, ..., n)."""
    hat = fft(grid, components)
    weights = (1.0 + grid.k2) ** s
    total = float(np.sum(weights * (hat.real ** 2 + hat.imag ** 2)))
    return float(np.sqrt(total * grid.cell_volume / grid.npoints))


def sobolev_norm(u: VelocityField, s: float) -> float:
    """H^s norm over all components; at s=0 equals the grid L^2 quadrature."""
    return sobolev_norm_array(u.grid, u.data, s)


def l2_norm(u: VelocityField) -> float:
    return sobolev_norm(u, 0.0)


def grid_inner(u: VelocityField, v: VelocityField) -> float:
    """L^2 grid inner product sum over points and components times (L/n)^d."""
    same_grid(u.grid, v.grid)
    return float(np.sum(u.data * v.data) * u.grid.cell_volume)


def linf_norm(u: VelocityField) -> float:
    """Max over grid points of the Euclidean magnitude of u."""
    return float(np.sqrt(np.sum(u.data ** 2, axis=0)).max())


def linf_norm_array(grid: TorusGrid, components: np.ndarray) -> float:
    """Max pointwise Euclidean magnitude of a stack of scalar components.

    Leading axes enumerate components (e.g. the d*d entries of a Jacobian);
    the trailing axes are the grid.
    """
    flat = components.reshape((-1,) + grid.shape)
    return float(np.sqrt(np.sum(flat ** 2, axis=0)).max())


def dealias(field: SpectralField) -> SpectralField:
    """Zero every mode with any axis index |j| > n/3 (2/3 rule)."""
    return SpectralField(field.grid, np.where(field.grid.dealias_mask, field.coefficients, 0.0))


def dealias_field(u: VelocityField) -> VelocityField:
    """2/3-rule projection of a velocity field."""
    g = u.grid
    return VelocityField(g, ifft(g, fft(g, u.data) * g.dealias_mask))


def zero_pad(grid: TorusGrid, samples: np.ndarray, factor: int = 2):
    """Resample a scalar field onto a grid refined by `factor` via zero padding.

    Exact for band-limited data; used by product-estimate verifiers so that
    quadratic products are evaluated alias-free.
    """
    fine = TorusGrid(grid.d, grid.n * factor, grid.length)
    hat = np.fft.fftn(samples)
    out = np.zeros(fine.shape, dtype=np.complex128)
    half = grid.n // 2
    sel = np.r_[0:half, fine.n - half:fine.n]
    idx = np.ix_(*([sel] * grid.d))
    src = np.ix_(*([np.r_[0:half, grid.n - half:grid.n]] * grid.d))
    out[idx] = hat[src]
    return fine, np.fft.ifftn(out).real * (factor ** grid.d)
