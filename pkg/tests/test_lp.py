"""Littlewood-Paley family, blocks, cutoffs, Besov norms, lemma verifiers."""

import math

import numpy as np
import pytest

from epalpha.grid import TorusGrid, VelocityField
from epalpha.lp import (
    BERNSTEIN_BUDGET,
    INTERPOLATION_BUDGET,
    PRODUCT_BUDGET,
    besov_norm,
    build_lp_family,
    dyadic_block,
    low_cutoff,
    verify_bernstein,
    verify_interpolation,
    verify_product,
)
from epalpha.spectral import sobolev_norm

from conftest import random_field

FAM = build_lp_family()


class TestProfiles:
    def test_chi_support_endpoints(self):
        assert FAM.chi(0.5) == 1.0
        assert FAM.chi(0.75) == 1.0
        assert FAM.chi(4.0 / 3.0) == 0.0
        assert FAM.chi(2.0) == 0.0

    def test_chi_monotone_smooth_interior(self):
        r = np.linspace(0.7, 1.4, 400)
        vals = FAM.chi(r)
        assert ((vals >= 0) & (vals <= 1)).all()
        assert (np.diff(vals) <= 1e-12).all()

    def test_phi_one_on_plateau(self):
        # the plateau [4/3, 3/2] is used by the block examples
        for r in (4.0 / 3.0, 1.4, 1.45, 1.5):
            assert FAM.phi(r) == pytest.approx(1.0, abs=1e-15)

    def test_phi_support(self):
        assert FAM.phi(0.74) == 0.0
        assert FAM.phi(8.0 / 3.0) == 0.0
        assert FAM.phi(3.0) == 0.0
        assert FAM.phi(1.0) > 0.0

    def test_telescoping(self):
        r = 100.0
        total = FAM.chi(r) + sum(FAM.phi(r / 2.0 ** j) for j in range(0, 11))
        assert total == pytest.approx(FAM.chi(r / 2.0 ** 11), abs=1e-12)
        assert total == pytest.approx(1.0, abs=1e-12)

    def test_partition_of_unity_on_grid(self):
        for n in (32, 64):
            g = TorusGrid(2, n)
            jmax = FAM.j_max(g)
            total = FAM.chi(g.kmag) + sum(FAM.phi(g.kmag / 2.0 ** j) for j in range(jmax + 1))
            assert np.abs(total - 1.0).max() < 1e-12

    def test_j_max_covers_nyquist(self, g2):
        jmax = FAM.j_max(g2)
        assert 2.0 ** jmax * 0.75 > g2.kmag.max() / 2.0
        # blocks beyond j_max vanish on the grid
        assert (FAM.phi(g2.kmag / 2.0 ** (jmax + 1)) == 0.0).all()


class TestBlocks:
    def test_cos3x_lives_in_block_one(self, g1):
        x = g1.coords()[0]
        u = VelocityField.from_components(g1, np.cos(3 * x))
        b1 = dyadic_block(u, 1, FAM)
        assert np.abs(b1.data - u.data).max() < 1e-12
        for j in (-1, 0, 2, 3, 4):
            if j == 1:
                continue
            assert sobolev_norm(dyadic_block(u, j, FAM), 0.0) < 1e-12

    def test_below_minus_one_is_zero(self, rand1):
        assert sobolev_norm(dyadic_block(rand1, -2, FAM), 0.0) == 0.0

    def test_block_minus_one_keeps_constants(self, g2):
        u = VelocityField(g2, np.full((2,) + g2.shape, 2.5))
        out = dyadic_block(u, -1, FAM)
        assert np.abs(out.data - u.data).max() < 1e-12

    def test_partition_reconstructs_bandlimited(self, g2):
        u = random_field(g2, 5)
        jmax = FAM.j_max(g2)
        total = VelocityField.zeros(g2)
        for j in range(-1, jmax + 1):
            total = total + dyadic_block(u, j, FAM)
        assert np.abs(total.data - u.data).max() < 1e-11


class TestLowCutoff:
    def test_equals_partial_block_sum(self, g2):
        u = random_field(g2, 6)
        for n in (0, 1, 2, 3):
            sn = low_cutoff(u, n, FAM)
            partial = dyadic_block(u, -1, FAM)
            for j in range(0, n):
                partial = partial + dyadic_block(u, j, FAM)
            assert np.abs(sn.data - partial.data).max() < 1e-12

    def test_identity_on_bandlimited_for_large_n(self, g1):
        x = g1.coords()[0]
        u = VelocityField.from_components(g1, np.cos(3 * x) + 0.5 * np.sin(2 * x))
        for n in (3, 4, 5):  # 2^n * 3/4 > 3
            sn = low_cutoff(u, n, FAM)
            assert np.abs(sn.data - u.data).max() < 1e-12

    def test_s0_kills_cos3x(self, g1):
        x = g1.coords()[0]
        u = VelocityField.from_components(g1, np.cos(3 * x))
        assert sobolev_norm(low_cutoff(u, 0, FAM), 0.0) < 1e-12

    def test_rejects_negative_n(self, rand1):
        with pytest.raises(ValueError):
            low_cutoff(rand1, -1, FAM)

    def test_tail_monotone_in_n(self, g2):
        u = random_field(g2, 7)
        s = 1.5
        tails = [sobolev_norm(u - low_cutoff(u, n, FAM), s) for n in range(0, 6)]
        for a, b in zip(tails, tails[1:]):
            assert b <= a + 1e-12

    def test_smoothing_gain_budget(self, g2_64):
        # ||S_n u||_{H^{s+sigma}} <= C 2^{sigma n} ||u||_{H^s}; the sharp C is
        # the multiplier norm max_k (1+|k|^2)^{sigma/2} chi(|k|/2^n) / 2^{sigma n},
        # which must stay below (5/3)^sigma and stable across n
        g = g2_64
        u = random_field(g, 8, k_max=g.n / 4.0)
        s = 1.5
        base = sobolev_norm(u, s)
        for sigma in (1.0, 2.0, 3.0):
            ops = []
            for n in range(1, 5):
                gain = sobolev_norm(low_cutoff(u, n, FAM), s + sigma)
                c_op = float(
                    ((1.0 + g.k2) ** (sigma / 2.0) * FAM.chi(g.kmag / 2.0 ** n)).max()
                ) / 2.0 ** (sigma * n)
                assert gain <= c_op * 2.0 ** (sigma * n) * base * (1 + 1e-9)
                ops.append(c_op)
            assert max(ops) <= (5.0 / 3.0) ** sigma * (1 + 1e-9)
            assert max(ops) / min(ops) < 2.0


class TestBesov:
    def test_single_mode_norm(self, g1):
        x = g1.coords()[0]
        u = VelocityField.from_components(g1, np.cos(3 * x))
        for s in (0.0, 1.0, 2.5):
            expect = 2.0 ** s * np.sqrt(np.pi)
            assert besov_norm(u, s, 2, FAM) == pytest.approx(expect, rel=1e-12)

    def test_zero_field(self, g2):
        assert besov_norm(VelocityField.zeros(g2), 1.0, 2, FAM) == 0.0

    def test_rejects_r_below_one(self, rand1):
        with pytest.raises(ValueError):
            besov_norm(rand1, 1.0, 0.5, FAM)

    def test_r_infinity_is_sup(self, rand2):
        v2 = besov_norm(rand2, 1.0, 2, FAM)
        vinf = besov_norm(rand2, 1.0, math.inf, FAM)
        v1 = besov_norm(rand2, 1.0, 1, FAM)
        assert vinf <= v2 <= v1

    def test_equivalence_with_sobolev(self, g2_64):
        # oracle: the weight-ratio band scanned over every grid mode bounds
        # the norm ratio for every field
        s = 1.5
        g = g2_64
        jmax = FAM.j_max(g)
        w_b = FAM.chi(g.kmag) ** 2 * 2.0 ** (-2 * s)
        for j in range(jmax + 1):
            w_b = w_b + FAM.phi(g.kmag / 2.0 ** j) ** 2 * 2.0 ** (2 * j * s)
        w_h = (1.0 + g.k2) ** s
        band = np.sqrt(w_b / w_h)
        c1, c2 = float(band.min()), float(band.max())
        ratios = []
        for seed in range(10):
            u = random_field(g, seed, k_max=g.n / 4.0)
            ratios.append(besov_norm(u, s, 2, FAM) / sobolev_norm(u, s))
        assert c1 * (1 - 1e-9) <= min(ratios) and max(ratios) <= c2 * (1 + 1e-9)
        print(f"\nmeasured Besov/Sobolev equivalence constants: "
              f"[{min(ratios):.4f}, {max(ratios):.4f}] in oracle band [{c1:.4f}, {c2:.4f}]")

    def test_tail_decay_rate(self):
        # |u_hat(k)| = (1+|k|)^{-sigma} exactly; the H^s tail after S_n must
        # decay like 2^{-n (sigma - s - d/2)} within a factor-2 band
        g = TorusGrid(2, 128)
        s, sigma = 2.5, 4.5
        rate = sigma - s - g.d / 2.0
        hat = np.where(g.kmag > 0, (1.0 + g.kmag) ** (-sigma), 0.0) * g.dealias_mask
        comp = np.fft.ifftn(hat).real * g.npoints
        u = VelocityField(g, np.stack([comp, comp]))
        # direct-summation oracle for the same tails, bypassing the lp module
        quad = g.cell_volume / g.npoints
        weights = (1.0 + g.k2) ** s
        ns = range(2, 6)
        tails, oracle = [], []
        for n in ns:
            tails.append(sobolev_norm(u - low_cutoff(u, n, FAM), s))
            shaped = (1.0 - FAM.chi(g.kmag / 2.0 ** n)) * hat * g.npoints
            oracle.append(math.sqrt(2.0 * float(np.sum(weights * np.abs(shaped) ** 2)) * quad))
        assert np.allclose(tails, oracle, rtol=1e-12)
        q = [t * 2.0 ** (rate * n) for n, t in zip(ns, tails)]
        assert max(q) / min(q) <= 2.0


class TestVerifiers:
    def test_bernstein_band(self):
        rep = verify_bernstein(3, seed=0)
        assert rep.passed, (rep.min_ratio, rep.max_ratio)
        assert rep.budget == BERNSTEIN_BUDGET
        assert rep.min_ratio >= 0.75 - 1e-6 and rep.max_ratio <= 8.0 / 3.0 + 1e-6

    def test_interpolation_exact(self):
        rep = verify_interpolation(3, seed=0)
        assert rep.passed
        assert rep.max_ratio <= INTERPOLATION_BUDGET

    def test_product_budget(self):
        rep = verify_product(3, seed=0)
        assert rep.passed, rep.max_ratio
        assert rep.max_ratio <= PRODUCT_BUDGET

    def test_rows_schema(self):
        rep = verify_product(1, seed=1)
        assert all(len(row) == 4 for row in rep.rows)

    def test_trials_validated(self):
        with pytest.raises(ValueError):
            verify_bernstein(0, seed=0)
