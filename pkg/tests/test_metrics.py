import math

import numpy as np
import pytest

from oiasim.channel import ChannelRealization, SystemConfig, draw_realization, sinr
from oiasim.metrics import (alignment_metric, build_metric_tables, effective_gain,
                            hybrid_metric, max_sinr_receiver, max_snr_receiver)
from oiasim.rng import make_rng

from oracles import ks_statistic

I2 = np.eye(2, dtype=complex)
E0 = np.array([1.0, 0.0], dtype=complex)
E1 = np.array([0.0, 1.0], dtype=complex)


def unit(v):
    v = np.asarray(v, dtype=complex)
    return v / np.linalg.norm(v)


def random_unit_triple(rng):
    z = rng.standard_normal((3, 2)) + 1j * rng.standard_normal((3, 2))
    return z / np.linalg.norm(z, axis=-1, keepdims=True)


class TestEffectiveGain:
    def test_identity(self):
        assert effective_gain(I2, E0) == pytest.approx(1.0)

    def test_scaling(self):
        assert effective_gain(2 * I2, unit([1, 1])) == pytest.approx(4.0)

    def test_column_norm(self):
        h = np.array([[1, 1], [0, 1]], dtype=complex)
        assert effective_gain(h, E0) == pytest.approx(1.0)


class TestAlignmentMetric:
    def test_parallel(self):
        assert alignment_metric(I2, E0, I2, E0) == pytest.approx(1.0)

    def test_orthogonal(self):
        assert alignment_metric(I2, E0, I2, E1) == pytest.approx(0.0)

    def test_halfway(self):
        assert alignment_metric(I2, E0, I2, unit([1, 1])) == pytest.approx(0.5)

    def test_degenerate_direction(self):
        with pytest.raises(ValueError, match="degenerate"):
            alignment_metric(np.zeros((2, 2), dtype=complex), E0, I2, E1)

    def test_bounds_exact(self):
        rng = np.random.default_rng(8)
        for _ in range(500):
            h1 = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
            h2 = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
            g = alignment_metric(h1, unit(rng.standard_normal(2) + 1j * rng.standard_normal(2)),
                                 h2, unit(rng.standard_normal(2) + 1j * rng.standard_normal(2)))
            assert 0.0 <= g <= 1.0

    def test_scale_and_phase_invariance(self):
        rng = np.random.default_rng(9)
        h1 = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
        h2 = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
        w1 = unit(rng.standard_normal(2) + 1j * rng.standard_normal(2))
        w2 = unit(rng.standard_normal(2) + 1j * rng.standard_normal(2))
        base = alignment_metric(h1, w1, h2, w2)
        scaled = alignment_metric((2.0 - 1.0j) * h1, w1, 0.3j * h2, w2)
        rotated = alignment_metric(h1, w1 * np.exp(0.9j), h2, w2 * np.exp(-2.1j))
        assert scaled == pytest.approx(base, abs=1e-12)
        assert rotated == pytest.approx(base, abs=1e-12)

    def test_uniform_distribution(self):
        rng = make_rng(901)
        vals = []
        for _ in range(40_000):
            h1 = (rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))) / np.sqrt(2)
            h2 = (rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))) / np.sqrt(2)
            vals.append(alignment_metric(h1, E0, h2, E0))
        assert ks_statistic(np.array(vals), lambda x: np.clip(x, 0, 1)) < 0.012


class TestHybridMetric:
    def test_interference_limited_endpoint(self):
        assert hybrid_metric(0.7, 2.0, 0.0) == pytest.approx(0.7)

    def test_gain_only_endpoint(self):
        assert hybrid_metric(0.7, 2.0, 1.0) == pytest.approx(2.0)

    def test_blend(self):
        assert hybrid_metric(0.4, 2.0, 0.5) == pytest.approx(1.2)

    def test_infinite_theta_ranks_by_gain(self):
        assert hybrid_metric(0.4, 2.0, math.inf) == 2.0

    def test_argmax_matches_gain_for_theta_ge_one(self):
        rng = np.random.default_rng(10)
        gam = rng.random((6, 4))
        bet = rng.gamma(2.0, 1.0, (6, 4))
        for theta in (1.0, 1.7, math.inf):
            alpha = hybrid_metric(gam, bet, theta)
            assert np.array_equal(np.argmax(alpha, axis=0), np.argmax(bet, axis=0))

    def test_negative_theta_rejected(self):
        with pytest.raises(ValueError):
            hybrid_metric(0.5, 1.0, -0.1)


class TestMaxSnrReceiver:
    def test_identity(self):
        np.testing.assert_allclose(max_snr_receiver(I2, E0), E0)

    def test_scale_invariant_direction(self):
        np.testing.assert_allclose(max_snr_receiver(3 * I2, E1), E1)

    def test_zero_channel_rejected(self):
        with pytest.raises(ValueError):
            max_snr_receiver(np.zeros((2, 2), dtype=complex), E0)

    def test_beats_grid_of_receivers(self):
        rng = np.random.default_rng(11)
        h = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
        w = unit(rng.standard_normal(2) + 1j * rng.standard_normal(2))
        v = max_snr_receiver(h, w)
        best = np.abs(np.vdot(v, h @ w)) ** 2
        for _ in range(2000):
            u = unit(rng.standard_normal(2) + 1j * rng.standard_normal(2))
            assert np.abs(np.vdot(u, h @ w)) ** 2 <= best + 1e-9


def cfg_with(**kw):
    base = dict(k=1, s=1, p_s=1.0, p_i=1.0, noise_var=1.0)
    base.update(kw)
    return SystemConfig(**base)


class TestMaxSinrReceiver:
    def test_no_interference_reduces_to_matched_filter(self):
        rng = make_rng(12)
        c = cfg_with(p_i=0.0, p_s=2.0, noise_var=0.5)
        real = draw_realization(c, rng)
        w = random_unit_triple(rng)
        v, lam = max_sinr_receiver(c, real, 0, 0, w)
        hw = real.h[0, 0, 0] @ w[0]
        assert lam == pytest.approx(c.p_s * np.linalg.norm(hw) ** 2 / c.noise_var, rel=1e-12)
        v_snr = max_snr_receiver(real.h[0, 0, 0], w[0])
        assert np.abs(np.vdot(v, v_snr)) == pytest.approx(1.0, abs=1e-12)

    def test_aligned_interference_is_cancelled(self):
        # both interference vectors land on e1; the signal has an e0 component,
        # so nulling e1 recovers nearly the interference-free SINR
        h = np.zeros((1, 3, 3, 2, 2), dtype=complex)
        h[0, 0, 0] = I2
        h[0, 0, 1] = np.array([[0, 0], [1, 0]])  # w=e0 -> interference along e1
        h[0, 0, 2] = np.array([[0, 0], [1, 0]])
        for i in (1, 2):
            for j in range(3):
                h[0, i, j] = I2
        real = ChannelRealization(h)
        c = cfg_with(p_i=10.0, noise_var=1e-3)
        w = np.array([E0, E0, E0])
        _, lam = max_sinr_receiver(c, real, 0, 0, w)
        interference_free = c.p_s * 1.0 / c.noise_var  # |e0 component|^2 = 1
        assert lam == pytest.approx(interference_free, rel=1e-9)

    def test_beats_random_receivers(self):
        rng = make_rng(13)
        c = cfg_with(p_s=1.3, p_i=0.8, noise_var=0.2)
        real = draw_realization(c, rng)
        w = random_unit_triple(rng)
        v, lam = max_sinr_receiver(c, real, 0, 0, w)
        assert sinr(c, real, 0, 0, w, v) == pytest.approx(lam, abs=1e-9 * (1 + lam))
        for _ in range(10_000):
            u = unit(rng.standard_normal(2) + 1j * rng.standard_normal(2))
            assert sinr(c, real, 0, 0, w, u) <= lam + 1e-9

    def test_dominates_max_snr_receiver(self):
        rng = make_rng(14)
        c = cfg_with()
        for _ in range(50):
            real = draw_realization(c, rng)
            w = random_unit_triple(rng)
            _, lam = max_sinr_receiver(c, real, 0, 0, w)
            v_snr = max_snr_receiver(real.h[0, 0, 0], w[0])
            assert sinr(c, real, 0, 0, w, v_snr) <= lam + 1e-12


class TestTables:
    def test_tables_match_scalar_functions(self):
        rng = make_rng(15)
        c = cfg_with(k=4, s=3)
        real = draw_realization(c, rng)
        vectors = np.array([random_unit_triple(rng) for _ in range(3)])
        gam, bet = build_metric_tables(real, vectors)
        assert gam.shape == (3, 4, 3)
        for i in range(3):
            ip, idp = (i + 1) % 3, (i + 2) % 3
            for k in range(4):
                for s in range(3):
                    g_ref = alignment_metric(real.h[k, i, ip], vectors[s, ip],
                                             real.h[k, i, idp], vectors[s, idp])
                    b_ref = effective_gain(real.h[k, i, i], vectors[s, i])
                    assert gam[i, k, s] == pytest.approx(g_ref, abs=1e-13)
                    assert bet[i, k, s] == pytest.approx(b_ref, rel=1e-13)
