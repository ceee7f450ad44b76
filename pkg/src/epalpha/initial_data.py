"""Seeded initial-velocity families used by experiments and the CLI.

Three fixed families:

  bandlimited     modes 0 < |k| <= k_max, seeded complex Gaussian
                  coefficients, Hermitian-symmetrized.  Coefficients are
                  drawn per integer mode in a fixed order, so the same
                  seed realizes the same continuum field at every
                  resolution that contains the band.
  algebraic-tail  coefficient magnitudes shaped like (1 + |k|)^{-sigma}
                  across the whole dealiased band.
  shear           deterministic (A sin y, 0)-type single-mode field.

Fields are normalized to a target H^s norm when `norm_hs` is given.
"""

from __future__ import annotations

import itertools

import numpy as np

from .grid import TorusGrid, VelocityField
from .spectral import fft, ifft, sobolev_norm

FAMILIES = ("bandlimited", "algebraic-tail", "shear")


def _normalize(u: VelocityField, s: float, norm_hs) -> VelocityField:
    if norm_hs is None:
        return u
    cur = sobolev_norm(u, s)
    scale = float(norm_hs) / cur if cur > 0 else 0.0
    return VelocityField(u.grid, u.data * scale)


def _half_space_modes(radius: float, d: int):
    """Integer modes with 0 < |j| <= radius whose first nonzero entry is > 0."""
    jmax = int(np.floor(radius))
    reps = []
    for j in itertools.product(range(-jmax, jmax + 1), repeat=d):
        if all(v == 0 for v in j):
            continue
        if sum(v * v for v in j) > radius * radius + 1e-12:
            continue
        nz = next(v for v in j if v != 0)
        if nz > 0:
            reps.append(j)
    reps.sort()
    return reps


def bandlimited(grid: TorusGrid, seed: int, k_max: float, s: float, norm_hs=1.0) -> VelocityField:
    """Random band-limited field with modes 0 < |k| <= k_max."""
    radius = k_max * grid.length / (2.0 * np.pi)
    if radius > grid.n // 3:
        raise ValueError(f"k_max={k_max} exceeds the dealiased band of an n={grid.n} grid")
    reps = _half_space_modes(radius, grid.d)
    rng = np.random.default_rng(seed)
    hat = np.zeros((grid.d,) + grid.shape, dtype=np.complex128)
    for c in range(grid.d):
        for j in reps:
            re, im = rng.standard_normal(2)
            coeff = (re + 1j * im) * grid.npoints
            pos = tuple(v % grid.n for v in j)
            neg = tuple(-v % grid.n for v in j)
            hat[(c,) + pos] = coeff
            hat[(c,) + neg] = np.conj(coeff)
    u = VelocityField(grid, ifft(grid, hat))
    return _normalize(u, s, norm_hs)


def algebraic_tail(grid: TorusGrid, seed: int, tail_exponent: float, s: float, norm_hs=1.0) -> VelocityField:
    """Random field with |u_hat(k)| ~ (1 + |k|)^{-tail_exponent} over the band."""
    rng = np.random.default_rng(seed)
    white = rng.standard_normal((grid.d,) + grid.shape)
    hat = fft(grid, white)
    envelope = np.where(
        (grid.kmag > 0) & grid.dealias_mask,
        (1.0 + grid.kmag) ** (-float(tail_exponent)),
        0.0,
    )
    u = VelocityField(grid, ifft(grid, hat * envelope))
    return _normalize(u, s, norm_hs)


def shear(grid: TorusGrid, amplitude: float, s: float, norm_hs=None) -> VelocityField:
    """Deterministic shear layer: first component A sin of the last coordinate."""
    x = grid.coords()
    data = np.zeros((grid.d,) + grid.shape)
    phase = 2.0 * np.pi / grid.length
    if grid.d == 1:
        data[0] = amplitude * np.sin(phase * x[0])
    else:
        data[0] = amplitude * np.sin(phase * x[-1])
    u = VelocityField(grid, data)
    return _normalize(u, s, norm_hs)


def generate(
    grid: TorusGrid,
    family: str,
    *,
    s: float,
    seed: int = 0,
    k_max: float = 4.0,
    tail_exponent=None,
    amplitude: float = 1.0,
    norm_hs=1.0,
) -> VelocityField:
    """Build initial data by family name with the family's parameters."""
    if family == "bandlimited":
        return bandlimited(grid, seed, k_max, s, norm_hs)
    if family == "algebraic-tail":
        sigma = tail_exponent if tail_exponent is not None else s + 2.0
        return algebraic_tail(grid, seed, sigma, s, norm_hs)
    if family == "shear":
        return shear(grid, amplitude, s, norm_hs)
    raise ValueError(f"unknown initial-data family {family!r}; choose from {FAMILIES}")
