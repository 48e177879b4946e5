"""Channel models: AWGN, correlated AWGN, and Rayleigh block fading.

The noise level is always derived from Eb/N0 and the code rate: with unit
average energy per channel use, the per-dimension noise variance is

    sigma^2 = 1 / (2 * R * 10^(ebn0_db / 10))

so the received vector is y ~ N(x, sigma^2 I) on the plain AWGN channel.
"""

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError

CHANNEL_KINDS = ("awgn", "correlated_awgn", "rayleigh")

# Rayleigh scale giving the fade unit second moment: E[h^2] = 2*scale^2 = 1.
_RAYLEIGH_SCALE = 1.0 / np.sqrt(2.0)


def noise_variance(ebn0_db: float, rate: float) -> float:
    """Per-dimension noise variance for a given Eb/N0 (dB) and code rate.

    ``ebn0_db = +inf`` is the documented zero-noise sentinel and yields 0.
    """
    if not rate > 0.0:
        raise ConfigurationError(f"rate must be positive, got {rate}")
    if np.isnan(ebn0_db) or ebn0_db == -np.inf:
        raise ConfigurationError(f"ebn0_db must be finite or +inf, got {ebn0_db}")
    if ebn0_db == np.inf:
        return 0.0
    return 1.0 / (2.0 * float(rate) * 10.0 ** (ebn0_db / 10.0))


@dataclass(frozen=True)
class ChannelSpec:
    """One channel configuration: kind, operating point, and rate.

    ``rho`` only applies to the correlated kind; ``block_fading`` only to
    rayleigh (the fade is one scalar per transmitted block).
    """

    kind: str = "awgn"
    ebn0_db: float = 7.0
    rate: float = 4.0 / 7.0
    rho: float = 0.0
    block_fading: bool = True

    def __post_init__(self):
        if self.kind not in CHANNEL_KINDS:
            raise ConfigurationError(
                f"unknown channel kind {self.kind!r}; expected one of {CHANNEL_KINDS}"
            )
        if not 0.0 < self.rate <= 1.0:
            raise ConfigurationError(f"rate must be in (0, 1], got {self.rate}")
        if not 0.0 <= self.rho < 1.0:
            raise ConfigurationError(f"rho must be in [0, 1), got {self.rho}")
        if np.isnan(self.ebn0_db) or self.ebn0_db == -np.inf:
            raise ConfigurationError(
                f"ebn0_db must be finite or +inf, got {self.ebn0_db}"
            )
        if self.kind == "rayleigh" and not self.block_fading:
            raise ConfigurationError("rayleigh channel supports block fading only")

    @property
    def sigma2(self) -> float:
        return noise_variance(self.ebn0_db, self.rate)

    def with_ebn0(self, ebn0_db: float) -> "ChannelSpec":
        return ChannelSpec(self.kind, ebn0_db, self.rate, self.rho, self.block_fading)


def correlation_factor(rho: float, n: int, sigma2: float) -> np.ndarray:
    """Lower-triangular factor L with L L^T = sigma^2 * T(rho), T = [rho^|i-j|]."""
    lags = np.arange(n)
    toeplitz = rho ** np.abs(lags[:, None] - lags[None, :])
    try:
        return np.linalg.cholesky(sigma2 * toeplitz)
    except np.linalg.LinAlgError as exc:
        raise ConfigurationError(
            f"correlation matrix not factorizable (rho={rho})"
        ) from exc


def draw_disturbance(spec: ChannelSpec, shape, rng: np.random.Generator):
    """Sample the channel disturbance for a batch of codewords.

    ``shape`` is the codeword-batch shape, last axis = channel uses.  Returns
    ``(noise, fade)`` with ``fade`` None except for the rayleigh kind, where
    it is one positive scalar per block (leading axes of ``shape``).

    The additive noise is always drawn before the fade, so two channels that
    share an rng substream see identical noise realizations regardless of
    whether fading is applied on top.
    """
    shape = tuple(shape)
    sigma2 = spec.sigma2
    if spec.kind == "correlated_awgn":
        factor = correlation_factor(spec.rho, shape[-1], sigma2)
        noise = rng.standard_normal(shape) @ factor.T
    else:
        noise = np.sqrt(sigma2) * rng.standard_normal(shape)
    fade = None
    if spec.kind == "rayleigh":
        fade = rng.rayleigh(_RAYLEIGH_SCALE, size=shape[:-1])
    return noise, fade


def transmit(spec: ChannelSpec, x: np.ndarray, rng: np.random.Generator):
    """Pass codewords through the channel.

    ``x`` has shape (n,) or (batch, n).  Returns ``(y, fade)``; ``fade`` is
    None unless the kind is rayleigh, in which case y = fade * x + noise with
    the fade applied per block.  The receiver is not given the fade.
    """
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)):
        raise ValueError("transmit input must be finite")
    noise, fade = draw_disturbance(spec, x.shape, rng)
    if fade is None:
        return x + noise, None
    return fade[..., None] * x + noise, fade
