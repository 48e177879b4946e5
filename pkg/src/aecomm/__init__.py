"""Desk-scale end-to-end autoencoder link simulator.

A (7,4) block autoencoder learns its own modulation and coding against an
additive white Gaussian noise channel, then gets evaluated the way a coded
link would be: Monte Carlo block error rates with confidence intervals,
classical Hamming baselines with closed-form references, train/test
distribution-shift metrics, and channel-mismatch probes.
"""

__version__ = "0.1.0"

from . import channels, codecs, config, harness, nn, rng, shiftmetrics
from .channels import (
    CHANNEL_KINDS,
    ChannelSpec,
    correlation_factor,
    draw_disturbance,
    noise_variance,
    transmit,
)
from .codecs import (
    GENERATOR,
    K,
    N,
    PARITY_CHECK,
    RATE,
    bits_to_message,
    bpsk_demap,
    bpsk_map,
    hamming_encode,
    hamming_hard_bler_closed_form,
    hamming_hard_decode,
    hamming_mld_decode,
    hamming_mld_message,
    message_to_bits,
    q_function,
    uncoded_bpsk_bler_closed_form,
)
from .config import (
    ExperimentConfig,
    load_config,
    loads_config,
    save_config,
    serialize_config,
)
from .errors import (
    ConfigFileError,
    ConfigurationError,
    DegenerateCodewordError,
    DivergenceError,
)
from .harness import (
    BlerCurve,
    BlerPoint,
    ChannelSystem,
    StopRule,
    SweepResult,
    autoencoder_system,
    baseline_curves,
    estimate_bler,
    hamming_hard_system,
    hamming_mld_system,
    overlap_table,
    robustness_probe,
    run_sweep,
    train_autoencoder,
    uncoded_system,
    width_sweep,
    wilson_interval,
)
from .nn import (
    AdamState,
    ModelParams,
    NetworkLayout,
    adam_step,
    codebook,
    decode,
    default_layout,
    encode,
    finite_difference_gradients,
    gradient_check,
    init_params,
    load_checkpoint,
    loss_and_gradients,
    loss_and_gradients_given,
    loss_given_disturbance,
    predict,
    save_checkpoint,
)
from .rng import substream
from .shiftmetrics import (
    MonteCarloOverlap,
    OverlapResult,
    chi_square_cdf,
    compare_received_distributions,
    kl_same_mean,
    normal_cdf,
    overlap_monte_carlo,
    overlap_same_mean_1d,
    overlap_same_mean_isotropic,
)
