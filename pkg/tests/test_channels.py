import numpy as np
import pytest

from aecomm.channels import (
    ChannelSpec,
    correlation_factor,
    draw_disturbance,
    noise_variance,
    transmit,
)
from aecomm.errors import ConfigurationError
from aecomm.rng import substream


class TestNoiseVariance:
    def test_zero_db_rate_four_sevenths(self):
        # 1 / (2 * 4/7 * 1) = 7/8
        assert noise_variance(0.0, 4.0 / 7.0) == pytest.approx(0.875, abs=1e-15)

    def test_ten_db_scales_by_ten(self):
        assert noise_variance(10.0, 4.0 / 7.0) == pytest.approx(0.0875, abs=1e-15)

    def test_rate_one(self):
        assert noise_variance(0.0, 1.0) == pytest.approx(0.5, abs=1e-15)

    def test_positive_infinity_means_zero_noise(self):
        assert noise_variance(np.inf, 4.0 / 7.0) == 0.0

    def test_nan_rejected(self):
        with pytest.raises(ConfigurationError):
            noise_variance(np.nan, 0.5)

    def test_negative_infinity_rejected(self):
        with pytest.raises(ConfigurationError):
            noise_variance(-np.inf, 0.5)

    def test_nonpositive_rate_rejected(self):
        with pytest.raises(ConfigurationError):
            noise_variance(0.0, 0.0)


class TestChannelSpec:
    def test_defaults_valid(self):
        spec = ChannelSpec()
        assert spec.kind == "awgn"
        assert spec.sigma2 == noise_variance(spec.ebn0_db, spec.rate)

    def test_unknown_kind(self):
        with pytest.raises(ConfigurationError):
            ChannelSpec(kind="bsc")

    def test_rate_out_of_range(self):
        with pytest.raises(ConfigurationError):
            ChannelSpec(rate=0.0)
        with pytest.raises(ConfigurationError):
            ChannelSpec(rate=1.5)

    def test_rho_out_of_range(self):
        with pytest.raises(ConfigurationError):
            ChannelSpec(kind="correlated_awgn", rho=1.0)
        with pytest.raises(ConfigurationError):
            ChannelSpec(kind="correlated_awgn", rho=-0.1)

    def test_nan_ebn0_rejected(self):
        with pytest.raises(ConfigurationError):
            ChannelSpec(ebn0_db=np.nan)

    def test_with_ebn0(self):
        spec = ChannelSpec("correlated_awgn", 3.0, 0.5, rho=0.4)
        moved = spec.with_ebn0(-2.0)
        assert moved.ebn0_db == -2.0
        assert (moved.kind, moved.rate, moved.rho) == ("correlated_awgn", 0.5, 0.4)


class TestCorrelationFactor:
    def test_factor_reconstructs_covariance(self):
        for rho in (0.3, 0.6, 0.9):
            sigma2 = 0.7
            factor = correlation_factor(rho, 7, sigma2)
            lags = np.arange(7)
            toeplitz = rho ** np.abs(lags[:, None] - lags[None, :])
            assert np.allclose(factor @ factor.T, sigma2 * toeplitz, atol=1e-12)

    def test_rho_zero_is_scaled_identity(self):
        factor = correlation_factor(0.0, 5, 0.25)
        assert np.array_equal(factor, 0.5 * np.eye(5))

    def test_lower_triangular(self):
        factor = correlation_factor(0.5, 6, 1.0)
        assert np.allclose(factor, np.tril(factor))


class TestDrawDisturbance:
    def test_awgn_statistics(self):
        spec = ChannelSpec("awgn", 0.0, 0.5)  # sigma2 = 1
        noise, fade = draw_disturbance(spec, (200_000, 7), substream(0, "t"))
        assert fade is None
        assert abs(noise.mean()) < 0.01
        assert abs(noise.var() - 1.0) < 0.01

    def test_rho_zero_matches_awgn_draw(self):
        awgn = ChannelSpec("awgn", 4.0, 4 / 7)
        corr = ChannelSpec("correlated_awgn", 4.0, 4 / 7, rho=0.0)
        a, _ = draw_disturbance(awgn, (1000, 7), substream(1, "x"))
        b, _ = draw_disturbance(corr, (1000, 7), substream(1, "x"))
        assert np.array_equal(a, b)

    def test_correlated_sample_covariance(self):
        # empirical covariance within 2% (max abs entry) of sigma2 * T(rho)
        rho, sigma2 = 0.6, noise_variance(2.0, 4 / 7)
        spec = ChannelSpec("correlated_awgn", 2.0, 4 / 7, rho=rho)
        noise, _ = draw_disturbance(spec, (400_000, 7), substream(2, "cov"))
        emp = np.cov(noise.T)
        lags = np.arange(7)
        want = sigma2 * rho ** np.abs(lags[:, None] - lags[None, :])
        assert np.abs(emp - want).max() <= 0.02 * sigma2

    def test_rayleigh_fade_unit_second_moment(self):
        spec = ChannelSpec("rayleigh", 5.0, 4 / 7)
        _, fade = draw_disturbance(spec, (300_000, 7), substream(3, "h"))
        assert fade.shape == (300_000,)
        assert np.all(fade > 0)
        assert abs((fade**2).mean() - 1.0) < 0.01

    def test_noise_drawn_before_fade(self):
        # sharing a substream, the additive noise is identical whether or
        # not a fade is drawn afterwards
        awgn = ChannelSpec("awgn", 5.0, 4 / 7)
        ray = ChannelSpec("rayleigh", 5.0, 4 / 7)
        a, _ = draw_disturbance(awgn, (500, 7), substream(4, "pair"))
        b, _ = draw_disturbance(ray, (500, 7), substream(4, "pair"))
        assert np.array_equal(a, b)


class TestTransmit:
    def test_awgn_additive(self):
        spec = ChannelSpec("awgn", 3.0, 4 / 7)
        x = substream(5, "cw").standard_normal((64, 7))
        noise, _ = draw_disturbance(spec, (64, 7), substream(6, "n"))
        y, fade = transmit(spec, x, substream(6, "n"))
        assert fade is None
        assert np.array_equal(y, x + noise)

    def test_zero_noise_sentinel_passes_through(self):
        spec = ChannelSpec("awgn", np.inf, 4 / 7)
        x = substream(7, "cw").standard_normal((16, 7))
        y, _ = transmit(spec, x, substream(8, "n"))
        assert np.array_equal(y, x)

    def test_rayleigh_scales_blocks(self):
        spec = ChannelSpec("rayleigh", np.inf, 4 / 7)
        x = np.ones((32, 7))
        y, fade = transmit(spec, x, substream(9, "n"))
        assert fade.shape == (32,)
        assert np.allclose(y, fade[:, None])

    def test_single_vector_shape(self):
        spec = ChannelSpec("awgn", 7.0, 4 / 7)
        y, _ = transmit(spec, np.ones(7), substream(10, "n"))
        assert y.shape == (7,)

    def test_nonfinite_input_rejected(self):
        spec = ChannelSpec("awgn", 7.0, 4 / 7)
        bad = np.full(7, np.nan)
        with pytest.raises(ValueError):
            transmit(spec, bad, substream(11, "n"))
