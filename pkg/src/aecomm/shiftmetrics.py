"""Distribution-shift metrics between received-signal distributions.

Training at one Eb/N0 and testing at another makes the received signal
y ~ N(x, sigma^2 I) differ only in its noise variance.  The shift between
the two same-mean Gaussians is quantified by the overlapping coefficient
(the shared probability mass, integral of min(p, q)) and by the KL
divergence.  The tabulated quantity is the univariate per-dimension
overlap; the isotropic n-dimensional variant and a Monte Carlo estimator
are provided as labeled extensions, not the tabulated number.
"""

from dataclasses import dataclass

import numpy as np
from scipy.special import erfc, gammainc

from . import channels


def normal_cdf(x):
    """Standard normal CDF via the complementary error function."""
    x = np.asarray(x, dtype=float)
    out = 0.5 * erfc(-x / np.sqrt(2.0))
    return out if out.ndim else float(out)


def chi_square_cdf(x, dof: int):
    """Chi-square CDF via the regularized lower incomplete gamma function."""
    if dof < 1:
        raise ValueError(f"dof must be >= 1, got {dof}")
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise ValueError("chi-square CDF is defined for x >= 0")
    out = gammainc(dof / 2.0, x / 2.0)
    return out if out.ndim else float(out)


def _check_variances(sigma2_a, sigma2_b):
    if not (sigma2_a > 0 and sigma2_b > 0):
        raise ValueError(
            f"variances must be positive, got {sigma2_a}, {sigma2_b}"
        )


def overlap_same_mean_1d(sigma2_a: float, sigma2_b: float) -> float:
    """Overlapping coefficient of two zero-mean univariate Gaussians.

    With sigma_a < sigma_b the densities cross at +-x*, where
    x*^2 = ln(sigma_b^2/sigma_a^2) / (1/sigma_a^2 - 1/sigma_b^2); the shared
    mass is the wide density inside [-x*, x*] plus the narrow density
    outside: [2 Phi(x*/sigma_b) - 1] + 2 [1 - Phi(x*/sigma_a)].
    """
    _check_variances(sigma2_a, sigma2_b)
    if sigma2_a == sigma2_b:
        return 1.0
    lo, hi = sorted((sigma2_a, sigma2_b))
    x_star = np.sqrt(np.log(hi / lo) / (1.0 / lo - 1.0 / hi))
    inner = 2.0 * normal_cdf(x_star / np.sqrt(hi)) - 1.0
    outer = 2.0 * (1.0 - normal_cdf(x_star / np.sqrt(lo)))
    return float(inner + outer)


def overlap_same_mean_isotropic(sigma2_a: float, sigma2_b: float, dimension: int) -> float:
    """Overlap of two zero-mean isotropic Gaussians in ``dimension`` dims.

    The density ratio depends only on the radius; the crossover radius is
    r*^2 = d ln(sigma_b^2/sigma_a^2) / (1/sigma_a^2 - 1/sigma_b^2) and the
    shared mass follows from the chi-square law of r^2/sigma^2.
    """
    _check_variances(sigma2_a, sigma2_b)
    if dimension < 1:
        raise ValueError(f"dimension must be >= 1, got {dimension}")
    if sigma2_a == sigma2_b:
        return 1.0
    lo, hi = sorted((sigma2_a, sigma2_b))
    r2 = dimension * np.log(hi / lo) / (1.0 / lo - 1.0 / hi)
    wide_inside = chi_square_cdf(r2 / hi, dimension)
    narrow_outside = 1.0 - chi_square_cdf(r2 / lo, dimension)
    return float(wide_inside + narrow_outside)


def kl_same_mean(sigma2_a: float, sigma2_b: float, dimension: int = 1) -> float:
    """KL(N(0, a I_d) || N(0, b I_d)) = d/2 [a/b - 1 + ln(b/a)] in nats."""
    _check_variances(sigma2_a, sigma2_b)
    if dimension < 1:
        raise ValueError(f"dimension must be >= 1, got {dimension}")
    ratio = sigma2_a / sigma2_b
    return float(0.5 * dimension * (ratio - 1.0 - np.log(ratio)))


@dataclass(frozen=True)
class MonteCarloOverlap:
    estimate: float
    std_error: float
    samples: int


def overlap_monte_carlo(
    sigma2_a: float,
    sigma2_b: float,
    dimension: int,
    samples: int,
    rng: np.random.Generator,
) -> MonteCarloOverlap:
    """Estimate the overlap by sampling the mixture (p + q) / 2.

    Under the mixture, E[2 min(p,q) / (p+q)] = integral of min(p, q); the
    integrand equals 2 / (1 + exp|log p - log q|), which is computed from
    log densities so extreme variance ratios stay stable.
    """
    _check_variances(sigma2_a, sigma2_b)
    if dimension < 1:
        raise ValueError(f"dimension must be >= 1, got {dimension}")
    if samples < 1:
        raise ValueError(f"samples must be >= 1, got {samples}")
    pick_a = rng.random(samples) < 0.5
    sigma = np.where(pick_a, np.sqrt(sigma2_a), np.sqrt(sigma2_b))
    draws = sigma[:, None] * rng.standard_normal((samples, dimension))
    r2 = np.einsum("ij,ij->i", draws, draws)
    log_ratio = 0.5 * dimension * np.log(sigma2_b / sigma2_a) + 0.5 * r2 * (
        1.0 / sigma2_b - 1.0 / sigma2_a
    )
    # 2 / (1 + e^|t|) written with a negative exponent so large |t|
    # underflows to the correct 0 instead of overflowing
    damp = np.exp(-np.abs(log_ratio))
    values = 2.0 * damp / (1.0 + damp)
    estimate = float(values.mean())
    std_error = float(values.std(ddof=1) / np.sqrt(samples)) if samples > 1 else 0.0
    return MonteCarloOverlap(estimate, std_error, samples)


@dataclass(frozen=True)
class OverlapResult:
    """Shift between a train-time and a test-time received distribution."""

    overlap: float
    kl_nats: float
    sigma2_train: float
    sigma2_test: float
    dimension: int


def compare_received_distributions(
    train_ebn0_db: float,
    test_ebn0_db: float,
    rate: float,
    dimension: int = 1,
) -> OverlapResult:
    """Overlap and KL between the received distributions at two operating
    points of the same rate-R system.  ``dimension=1`` is the per-dimension
    (tabulated) convention."""
    s2_train = channels.noise_variance(train_ebn0_db, rate)
    s2_test = channels.noise_variance(test_ebn0_db, rate)
    if dimension == 1:
        overlap = overlap_same_mean_1d(s2_train, s2_test)
    else:
        overlap = overlap_same_mean_isotropic(s2_train, s2_test, dimension)
    kl = kl_same_mean(s2_train, s2_test, dimension)
    return OverlapResult(overlap, kl, s2_train, s2_test, dimension)
