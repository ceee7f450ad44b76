"""Spectral substrate: transforms, multipliers, derivatives, norms, dealiasing."""

import numpy as np
import pytest

from epalpha.grid import SpectralField, TorusGrid, VelocityField
from epalpha.spectral import (
    apply_multiplier,
    dealias,
    dealias_field,
    divergence,
    gradient,
    helmholtz_inverse,
    jacobian,
    lambda_s,
    lambda_s_alpha,
    linf_norm,
    sobolev_norm,
    transform_forward,
    transform_inverse,
    zero_pad,
)

from conftest import random_field


class TestGrid:
    def test_invariants_rejected(self):
        with pytest.raises(ValueError):
            TorusGrid(0, 16)
        with pytest.raises(ValueError):
            TorusGrid(1, 6)
        with pytest.raises(ValueError):
            TorusGrid(1, 15)
        with pytest.raises(ValueError):
            TorusGrid(1, 16, -1.0)

    def test_wavenumbers(self):
        g = TorusGrid(1, 16, 2 * np.pi)
        assert g.k_axes[0][0] == 0.0
        assert g.k_axes[0][1] == 1.0
        assert g.k_axes[0][8] == -8.0  # Nyquist wraps negative
        g4 = TorusGrid(1, 16, 4 * np.pi)
        assert g4.k_axes[0][1] == pytest.approx(0.5)

    def test_dealias_mask_is_two_thirds(self):
        g = TorusGrid(1, 64)
        j = g.mode_index
        assert bool(g.dealias_mask[np.abs(j) == 21].all())
        assert not g.dealias_mask[np.abs(j) == 22].any()

    def test_field_shape_mismatch(self, g1):
        with pytest.raises(ValueError):
            VelocityField(g1, np.zeros((2, g1.n)))
        with pytest.raises(ValueError):
            transform_forward(g1, np.zeros(g1.n + 1))


class TestTransforms:
    def test_constant_field_single_mode(self, g1):
        f = transform_forward(g1, np.full(g1.shape, 3.25))
        assert f.coefficients[0] == pytest.approx(3.25 * g1.n)
        assert np.abs(f.coefficients[1:]).max() < 1e-12 * g1.n

    def test_cosine_two_conjugate_coefficients(self):
        g = TorusGrid(1, 16)
        x = g.coords()[0]
        f = transform_forward(g, np.cos(3 * x))
        c = f.coefficients
        assert c[3] == pytest.approx(8.0, rel=1e-12)
        assert c[-3] == pytest.approx(8.0, rel=1e-12)
        others = np.delete(c, [3, 16 - 3])
        assert np.abs(others).max() < 1e-12 * 16
        assert f.hermitian_defect() < 1e-12

    def test_roundtrip(self, g2):
        rng = np.random.default_rng(1)
        samples = rng.standard_normal(g2.shape)
        back = transform_inverse(transform_forward(g2, samples))
        assert np.abs(back - samples).max() < 1e-12 * np.abs(samples).max()

    def test_parseval(self, g2):
        for seed in range(5):
            u = random_field(g2, seed)
            quad = float(np.sum(u.data ** 2)) * g2.cell_volume
            norm2 = sobolev_norm(u, 0.0) ** 2
            assert abs(norm2 - quad) / norm2 < 1e-12


class TestMultipliers:
    def test_identity_symbol(self, rand1):
        out = apply_multiplier(rand1, lambda r: np.ones_like(r))
        assert np.abs(out.data - rand1.data).max() < 1e-12

    def test_laplacian_eigenfunction(self, g1):
        x = g1.coords()[0]
        u = VelocityField.from_components(g1, np.cos(2 * x))
        out = apply_multiplier(u, lambda r: r ** 2)
        assert np.abs(out.data - 4 * np.cos(2 * x)).max() < 1e-11

    def test_single_mode_bessel(self, g1):
        x = g1.coords()[0]
        u = VelocityField.from_components(g1, np.cos(3 * x))
        out = apply_multiplier(u, lambda r: 1.0 + r ** 2)
        assert np.abs(out.data - 10 * np.cos(3 * x)).max() < 1e-11

    def test_nan_symbol_rejected(self, rand1):
        with pytest.raises(ValueError, match="finite"):
            apply_multiplier(rand1, lambda r: 1.0 / r)  # inf at k = 0

    def test_lambda_s_zero_is_identity(self, rand2):
        out = lambda_s(rand2, 0.0)
        assert np.abs(out.data - rand2.data).max() < 1e-12

    def test_lambda_s_inverse_pair(self, rand2):
        out = lambda_s(lambda_s(rand2, 1.7), -1.7)
        assert np.abs(out.data - rand2.data).max() < 1e-12

    def test_lambda_s_cos3x(self, g1):
        x = g1.coords()[0]
        u = VelocityField.from_components(g1, np.cos(3 * x))
        out = lambda_s(u, 2.0)
        assert np.abs(out.data - 10 * np.cos(3 * x)).max() < 1e-10

    def test_multiplier_composition(self, rand2):
        a = lambda_s(rand2, 0.9 + 1.3)
        b = lambda_s(lambda_s(rand2, 0.9), 1.3)
        assert np.abs(a.data - b.data).max() < 1e-12 * max(1.0, np.abs(a.data).max())

    def test_helmholtz_identity_at_zero(self, rand2):
        out = helmholtz_inverse(rand2, 0.0)
        assert np.abs(out.data - rand2.data).max() < 1e-12

    def test_helmholtz_single_mode(self, g1):
        x = g1.coords()[0]
        u = VelocityField.from_components(g1, np.cos(2 * x))
        out = helmholtz_inverse(u, 0.5)
        assert np.abs(out.data - 0.5 * np.cos(2 * x)).max() < 1e-12

    def test_helmholtz_rejects_negative_alpha(self, rand1):
        with pytest.raises(ValueError):
            helmholtz_inverse(rand1, -0.1)

    def test_helmholtz_contraction(self, g2):
        for alpha in (0.0, 0.1, 0.5, 1.0):
            for seed in range(3):
                u = random_field(g2, seed)
                assert sobolev_norm(helmholtz_inverse(u, alpha), 0.0) <= sobolev_norm(u, 0.0) * (1 + 1e-12)

    def test_lambda_s_alpha_composition_and_commutation(self, rand2):
        s, alpha = 1.8, 0.7
        a = lambda_s_alpha(rand2, s, alpha)
        b = helmholtz_inverse(lambda_s(rand2, s), alpha)
        c = lambda_s(helmholtz_inverse(rand2, alpha), s)
        scale = max(1.0, np.abs(a.data).max())
        assert np.abs(a.data - b.data).max() < 1e-12 * scale
        assert np.abs(b.data - c.data).max() < 1e-12 * scale

    def test_lambda_s_alpha_single_mode(self, g1):
        x = g1.coords()[0]
        u = VelocityField.from_components(g1, np.cos(3 * x))
        out = lambda_s_alpha(u, 2.0, 1.0)
        assert np.abs(out.data - np.cos(3 * x)).max() < 1e-11

    def test_lambda_s_alpha_zero_alpha_is_lambda_s(self, rand2):
        a = lambda_s_alpha(rand2, 2.2, 0.0)
        b = lambda_s(rand2, 2.2)
        assert np.abs(a.data - b.data).max() < 1e-12 * max(1.0, np.abs(b.data).max())


class TestDerivatives:
    def test_shear_jacobian_and_divergence(self, g2):
        X, Y = g2.coords()
        u = VelocityField.from_components(g2, np.sin(Y), np.zeros(g2.shape))
        jac = jacobian(u)
        assert np.abs(jac[0, 0]).max() < 1e-12
        assert np.abs(jac[0, 1] - np.cos(Y)).max() < 1e-11
        assert np.abs(jac[1]).max() < 1e-12
        assert np.abs(divergence(u)).max() < 1e-12

    def test_constant_field_zero_jacobian(self, g2):
        u = VelocityField(g2, np.full((2,) + g2.shape, 1.5))
        assert np.abs(jacobian(u)).max() < 1e-12

    def test_div_grad_is_laplacian(self, g2):
        p = random_field(g2, 3).component(0)
        lap1 = divergence(gradient(g2, p))
        hat = np.fft.fftn(p)
        lap2 = np.fft.ifftn(hat * (-g2.k2)).real
        assert np.abs(lap1 - lap2).max() < 1e-11 * max(1.0, np.abs(lap2).max())

    def test_derivative_exactness_on_trig_polynomials(self, g1):
        x = g1.coords()[0]
        for k, coef in ((1, 0.3), (5, -1.2), (9, 0.7)):
            u = VelocityField.from_components(g1, coef * np.sin(k * x))
            d = jacobian(u)[0, 0]
            exact = coef * k * np.cos(k * x)
            assert np.abs(d - exact).max() < 1e-12 * max(1.0, np.abs(exact).max())


class TestNorms:
    def test_sin_l2(self, g1):
        x = g1.coords()[0]
        u = VelocityField.from_components(g1, np.sin(x))
        assert sobolev_norm(u, 0.0) == pytest.approx(np.sqrt(np.pi), rel=1e-12)

    def test_sin_h2(self, g1):
        x = g1.coords()[0]
        u = VelocityField.from_components(g1, np.sin(x))
        assert sobolev_norm(u, 2.0) == pytest.approx(2 * np.sqrt(np.pi), rel=1e-12)

    def test_zero_field(self, g2):
        assert sobolev_norm(VelocityField.zeros(g2), 1.3) == 0.0

    def test_linf_of_sine(self, g1):
        x = g1.coords()[0]
        u = VelocityField.from_components(g1, np.sin(x))
        assert linf_norm(u) == pytest.approx(1.0, abs=1e-12)


class TestDealias:
    def test_idempotent(self, g1, rand1):
        f = transform_forward(g1, rand1.component(0))
        once = dealias(f)
        twice = dealias(once)
        assert np.array_equal(once.coefficients, twice.coefficients)

    def test_bandlimited_unchanged(self, g2):
        u = random_field(g2, 2, k_max=g2.n / 4.0)
        out = dealias_field(u)
        assert np.abs(out.data - u.data).max() < 1e-13

    def test_zeroes_above_two_thirds(self):
        g = TorusGrid(1, 64)
        x = g.coords()[0]
        u = VelocityField.from_components(g, np.cos(25 * x))  # 25 > 64/3
        out = dealias_field(u)
        assert np.abs(out.data).max() < 1e-12

    def test_zero_pad_exact_for_bandlimited(self, g2):
        u = random_field(g2, 4, k_max=g2.n / 4.0)
        fine, up = zero_pad(g2, u.component(0))
        # the refined samples at the coarse points match the original
        assert np.abs(up[::2, ::2] - u.component(0)).max() < 1e-12
        assert fine.n == 2 * g2.n
