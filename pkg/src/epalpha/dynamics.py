"""Bilinear EP forms M and N, the two right-hand sides, energies, pairings.

The evolution systems, written in velocity form:

    EP_alpha:  du/dt + u.grad(u) = -(1 - a^2 Lap)^{-1} (a^2 div M(u,u) + N(u,u))
    EP_0:      du/dt + u.grad(u) = -N(u,u)

with the symmetric bilinear forms (Jacobian convention A = (d_j u^i))

    M(u,v) = 1/2 (A B + A B^T - A^T B - A div v + (A:B) I
              +   B A + B A^T - B^T A - B div u)
    N(u,v) = 1/2 (u div v + B^T u + v div u + A^T v).

All quadratic products are formed pointwise in physical space and
projected by the 2/3 rule, so band-limited states stay alias-free and the
semidiscrete energies are conserved exactly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import TorusGrid, VelocityField, same_grid
from .spectral import (
    apply_multiplier,
    deriv,
    fft,
    grid_inner,
    helmholtz_symbol,
    ifft,
    jacobian,
    lambda_s,
    lambda_s_alpha,
    lambda_symbol,
    sobolev_norm,
)


@dataclass(frozen=True, eq=False)
class MatrixField:
    """d x d real sample arrays on a common grid, entry (i, j) per point."""

    grid: TorusGrid
    entries: np.ndarray

    def __post_init__(self):
        entries = np.ascontiguousarray(self.entries, dtype=np.float64)
        expected = (self.grid.d, self.grid.d) + self.grid.shape
        if entries.shape != expected:
            raise ValueError(f"entries have shape {entries.shape}, expected {expected}")
        object.__setattr__(self, "entries", entries)


@dataclass(frozen=True, eq=False)
class EPState:
    """Velocity field plus the clock and dispersion parameter it evolves under."""

    u: VelocityField
    t: float
    alpha: float

    def __post_init__(self):
        if self.alpha < 0:
            raise ValueError("alpha must be nonnegative")


def _jac_div(u: VelocityField):
    A = jacobian(u)
    div = np.trace(A, axis1=0, axis2=1)
    return A, div


def _matmul(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    # pointwise d x d matrix product over the trailing grid axes
    return np.einsum("il...,lj...->ij...", A, B)


def _transpose(A: np.ndarray) -> np.ndarray:
    return np.swapaxes(A, 0, 1)


def _m_half(A, B, div_v):
    return _matmul(A, B) + _matmul(A, _transpose(B)) - _matmul(_transpose(A), B) - A * div_v


def bilinear_M(u: VelocityField, v: VelocityField) -> MatrixField:
    """Symmetric matrix-valued form M(u, v); M(u, u) is the EP_alpha source.

    Exactly symmetric in (u, v): the two half expressions are computed
    from each argument and added, and the Frobenius term (A:B) is
    invariant under the swap, so swapping arguments permutes commutative
    float additions only.
    """
    same_grid(u.grid, v.grid)
    g = u.grid
    A, div_u = _jac_div(u)
    B, div_v = _jac_div(v)
    colon = np.sum(A * B, axis=(0, 1))
    eye = np.zeros((g.d, g.d) + g.shape)
    for i in range(g.d):
        eye[i, i] = colon
    raw = 0.5 * (_m_half(A, B, div_v) + _m_half(B, A, div_u) + eye)
    out = ifft(g, fft(g, raw.reshape((-1,) + g.shape)) * g.dealias_mask)
    return MatrixField(g, out.reshape((g.d, g.d) + g.shape))


def _n_half(w, Bjac, div_v):
    # w div v + (grad v)^T w, pointwise
    return w.data * div_v + np.einsum("ji...,j...->i...", Bjac, w.data)


def bilinear_N(u: VelocityField, v: VelocityField) -> VelocityField:
    """Symmetric vector-valued form N(u, v); N(u, u) = u div u + (grad u)^T u."""
    same_grid(u.grid, v.grid)
    g = u.grid
    A, div_u = _jac_div(u)
    B, div_v = _jac_div(v)
    raw = 0.5 * (_n_half(u, B, div_v) + _n_half(v, A, div_u))
    return VelocityField(g, ifft(g, fft(g, raw) * g.dealias_mask))


def advect(v: VelocityField, u: VelocityField) -> VelocityField:
    """Dealiased advection (v . grad) u."""
    same_grid(v.grid, u.grid)
    g = u.grid
    A = jacobian(u)
    raw = np.einsum("j...,ij...->i...", v.data, A)
    return VelocityField(g, ifft(g, fft(g, raw) * g.dealias_mask))


def matrix_divergence(m: MatrixField) -> VelocityField:
    """Row-wise spectral divergence (div M)_i = sum_j d_j M_ij."""
    g = m.grid
    comps = []
    for i in range(g.d):
        acc = np.zeros(g.shape)
        for j in range(g.d):
            acc = acc + deriv(g, m.entries[i, j], j)
        comps.append(acc)
    return VelocityField.from_components(g, *comps)


def rhs_ep0(u: VelocityField) -> VelocityField:
    """Right-hand side of the zero-dispersion system: -u.grad(u) - N(u, u)."""
    g = u.grid
    A, div_u = _jac_div(u)
    adv = np.einsum("j...,ij...->i...", u.data, A)
    nuu = u.data * div_u + np.einsum("ji...,j...->i...", A, u.data)
    return VelocityField(g, ifft(g, fft(g, -(adv + nuu)) * g.dealias_mask))


def rhs_ep_alpha(state: EPState) -> VelocityField:
    """Right-hand side of EP_alpha in nonlocal form.

    At alpha = 0 this takes the identical code path as `rhs_ep0`, so the
    two agree bit for bit.
    """
    u, alpha = state.u, state.alpha
    if alpha == 0.0:
        return rhs_ep0(u)
    g = u.grid
    a2 = alpha * alpha
    A, div_u = _jac_div(u)
    adv = np.einsum("j...,ij...->i...", u.data, A)
    nuu = u.data * div_u + np.einsum("ji...,j...->i...", A, u.data)
    colon = np.sum(A * A, axis=(0, 1))
    m_entries = (
        _matmul(A, A)
        + _matmul(A, _transpose(A))
        - _matmul(_transpose(A), A)
        - A * div_u
    )
    for i in range(g.d):
        m_entries[i, i] += 0.5 * colon
    m_hat = fft(g, m_entries.reshape((-1,) + g.shape)).reshape((g.d, g.d) + g.shape)
    div_m_hat = np.zeros((g.d,) + g.shape, dtype=np.complex128)
    for i in range(g.d):
        for j in range(g.d):
            div_m_hat[i] += (1j * g.k_axes[j]) * m_hat[i, j]
    helm = helmholtz_symbol(g, alpha)
    rhs_hat = -(fft(g, adv) + (a2 * div_m_hat + fft(g, nuu)) * helm)
    return VelocityField(g, ifft(g, rhs_hat * g.dealias_mask))


def momentum(u: VelocityField, alpha: float) -> VelocityField:
    """m = (1 - alpha^2 Lap) u, the inverse of the Helmholtz smoothing."""
    if alpha < 0:
        raise ValueError("alpha must be nonnegative")
    return apply_multiplier(u, 1.0 + alpha * alpha * u.grid.k2)


def energy_l2(u: VelocityField) -> float:
    """Conserved entropy of EP_0: the squared grid L^2 norm."""
    return sobolev_norm(u, 0.0) ** 2


def energy_kinetic(u: VelocityField, alpha: float) -> float:
    """EP_alpha kinetic energy ||u||_{L^2}^2 + alpha^2 ||grad u||_{L^2}^2."""
    g = u.grid
    hat = fft(g, u.data)
    power = np.sum(hat.real ** 2 + hat.imag ** 2, axis=0)
    quad = g.cell_volume / g.npoints
    return float(np.sum((1.0 + alpha * alpha * g.k2) * power) * quad)


def camassa_holm_rhs(u: VelocityField, alpha: float) -> VelocityField:
    """d = 1 nonlocal Camassa-Holm form of the EP_alpha right-hand side.

    -u u_x - d_x (1 - alpha^2 d_xx)^{-1} (u^2 + (alpha^2/2) u_x^2),
    an independent route used to cross-check the general-d assembly.
    """
    g = u.grid
    if g.d != 1:
        raise ValueError("Camassa-Holm form requires d = 1")
    w = u.component(0)
    w_hat = np.fft.fftn(w)
    wx = np.fft.ifftn(w_hat * (1j * g.k_axes[0])).real
    source = w * w + 0.5 * alpha * alpha * wx * wx
    src_hat = np.fft.fftn(source) * g.dealias_mask
    helm = 1.0 / (1.0 + alpha * alpha * g.k2)
    nonlocal_term = np.fft.ifftn(src_hat * helm * (1j * g.k_axes[0])).real
    uux_hat = np.fft.fftn(w * wx) * g.dealias_mask
    uux = np.fft.ifftn(uux_hat).real
    return VelocityField.from_components(g, -(uux + nonlocal_term))


def commutator_pairing(v: VelocityField, u: VelocityField, s: float, alpha: float) -> float:
    """L^2 size of the modified commutator [Lambda^s_alpha, v.grad] u."""
    same_grid(v.grid, u.grid)
    a = lambda_s_alpha(advect(v, u), s, alpha)
    b = advect(v, lambda_s_alpha(u, s, alpha))
    return sobolev_norm(a - b, 0.0)


def convexity_pairing(v: VelocityField, u: VelocityField, s: float, alpha: float) -> float:
    """Grid inner product < Lambda^s_alpha N(v, u), Lambda^s u >."""
    same_grid(v.grid, u.grid)
    return grid_inner(lambda_s_alpha(bilinear_N(v, u), s, alpha), lambda_s(u, s))


def gradient_field(u: VelocityField) -> np.ndarray:
    """Jacobian entries flattened to a (d*d, grid) stack for norm helpers."""
    return jacobian(u).reshape((-1,) + u.grid.shape)


__all__ = [
    "MatrixField",
    "EPState",
    "bilinear_M",
    "bilinear_N",
    "advect",
    "matrix_divergence",
    "rhs_ep0",
    "rhs_ep_alpha",
    "momentum",
    "energy_l2",
    "energy_kinetic",
    "camassa_holm_rhs",
    "commutator_pairing",
    "convexity_pairing",
    "gradient_field",
]
