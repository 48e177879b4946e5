"""Experiment orchestration: training runs, Monte Carlo BLER with stopping
rules and Wilson intervals, the train/test generalization sweep, the overlap
table, the capacity (width) probe, and the channel-mismatch probe.

Determinism contract: every random draw comes from a substream named by
(seed, purpose, operating point[, chunk index]).  BLER estimation walks
fixed-size chunks whose substreams depend only on the chunk index, stops at
the exact block where the target error count is reached, and is therefore
invariant to the worker count.
"""

import itertools
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.special import ndtri

from . import channels, codecs, nn, shiftmetrics
from .config import ExperimentConfig
from .errors import ConfigurationError, DivergenceError
from .rng import substream

DEFAULT_CHUNK_BLOCKS = 20_000

# two-sided 95%
_Z95 = float(ndtri(0.975))


def _db_key(db: float) -> str:
    return format(float(db), "g")


def wilson_interval(errors: int, blocks: int, z: float = _Z95):
    """Wilson score interval for a binomial proportion."""
    if blocks < 1:
        raise ValueError("wilson interval needs at least one trial")
    p = errors / blocks
    z2 = z * z
    denom = 1.0 + z2 / blocks
    center = (p + z2 / (2.0 * blocks)) / denom
    half = z * np.sqrt(p * (1.0 - p) / blocks + z2 / (4.0 * blocks**2)) / denom
    # at p = 0 and p = 1 the exact bound is the endpoint; rounding can land
    # one ulp inside, so snap those cases
    low = 0.0 if errors == 0 else max(0.0, float(center - half))
    high = 1.0 if errors == blocks else min(1.0, float(center + half))
    return low, high


@dataclass(frozen=True)
class StopRule:
    """Stop at target_block_errors or max_blocks, whichever comes first."""

    target_block_errors: int = 200
    max_blocks: int = 1_000_000

    def __post_init__(self):
        if self.target_block_errors < 1:
            raise ConfigurationError("target_block_errors must be >= 1")
        if self.max_blocks < 1:
            raise ConfigurationError("max_blocks must be >= 1")


@dataclass(frozen=True)
class BlerPoint:
    test_ebn0_db: float
    blocks: int
    block_errors: int
    bler: float
    ci_low: float
    ci_high: float

    def __post_init__(self):
        if self.block_errors > self.blocks:
            raise ValueError("block_errors exceeds blocks")
        if not self.ci_low <= self.bler <= self.ci_high:
            raise ValueError("bler outside its confidence interval")


def make_bler_point(test_ebn0_db, errors, blocks) -> BlerPoint:
    low, high = wilson_interval(errors, blocks)
    return BlerPoint(float(test_ebn0_db), int(blocks), int(errors),
                     errors / blocks, low, high)


@dataclass
class BlerCurve:
    system: str
    label: str
    train_ebn0_db: float | None
    seed_count: int
    points: list

    def __post_init__(self):
        dbs = [p.test_ebn0_db for p in self.points]
        if sorted(set(dbs)) != dbs:
            raise ValueError("curve points must be sorted by test_ebn0_db, "
                             "without duplicates")

    def blers(self) -> np.ndarray:
        return np.array([p.bler for p in self.points])


@dataclass(frozen=True)
class ChannelSystem:
    """A message-in/message-out link: draw disturbances from the chunk rng,
    return decoded message indices."""

    message_count: int
    run: object  # callable (messages, rng) -> decoded messages


def estimate_bler(system: ChannelSystem, test_ebn0_db: float, stop: StopRule,
                  seed_key, chunk_blocks: int = DEFAULT_CHUNK_BLOCKS,
                  workers: int = 1) -> BlerPoint:
    """Monte Carlo BLER with a deterministic chunked substream scheme.

    ``seed_key`` is a tuple of int/str substream keys; chunk i draws from
    ``substream(*seed_key, i)``.  Chunk sizes depend only on the chunk index,
    chunks are consumed in index order, and the count is truncated at the
    exact block where the target error count is reached, so the result is
    identical for any ``workers``.
    """
    seed_key = tuple(seed_key)
    target = stop.target_block_errors
    max_blocks = stop.max_blocks

    def chunk_size(index):
        return min(chunk_blocks, max_blocks - index * chunk_blocks)

    def run_chunk(index):
        rng = substream(*seed_key, index)
        msgs = rng.integers(0, system.message_count, chunk_size(index))
        decoded = system.run(msgs, rng)
        return np.not_equal(decoded, msgs)

    blocks = 0
    errors = 0
    wave = max(1, workers)
    pool = ThreadPoolExecutor(max_workers=wave) if workers > 1 else None
    try:
        for first in itertools.count(0, wave):
            indices = [i for i in range(first, first + wave) if chunk_size(i) > 0]
            if not indices or errors >= target or blocks >= max_blocks:
                break
            if pool is not None:
                results = list(pool.map(run_chunk, indices))
            else:
                results = [run_chunk(i) for i in indices]
            for err_vec in results:
                if errors >= target or blocks >= max_blocks:
                    break  # later chunks of the wave are discarded
                cums = errors + np.cumsum(err_vec)
                if cums[-1] >= target:
                    cut = int(np.searchsorted(cums, target))
                    blocks += cut + 1
                    errors = target
                else:
                    blocks += err_vec.size
                    errors = int(cums[-1])
    finally:
        if pool is not None:
            pool.shutdown()
    if blocks == 0:
        raise RuntimeError("no blocks simulated")
    return make_bler_point(test_ebn0_db, errors, blocks)


# -- systems ------------------------------------------------------------------

def autoencoder_system(params: nn.ModelParams,
                       spec: channels.ChannelSpec) -> ChannelSystem:
    cb = nn.codebook(params)

    def run(messages, rng):
        y, _ = channels.transmit(spec, cb[messages], rng)
        return nn.predict(params, y)

    return ChannelSystem(params.message_count, run)


def hamming_hard_system(spec: channels.ChannelSpec) -> ChannelSystem:
    def run(messages, rng):
        y, _ = channels.transmit(spec, codecs.CODEBOOK_BPSK[messages], rng)
        return codecs.bits_to_message(codecs.hamming_hard_decode(y))

    return ChannelSystem(2**codecs.K, run)


def hamming_mld_system(spec: channels.ChannelSpec) -> ChannelSystem:
    def run(messages, rng):
        y, _ = channels.transmit(spec, codecs.CODEBOOK_BPSK[messages], rng)
        return codecs.hamming_mld_message(y)

    return ChannelSystem(2**codecs.K, run)


def uncoded_system(spec: channels.ChannelSpec) -> ChannelSystem:
    """4 info bits sent as 4 BPSK uses at per-info-bit energy Eb (rate 1)."""
    symbols = codecs.bpsk_map(codecs.message_to_bits(np.arange(2**codecs.K)))

    def run(messages, rng):
        y, _ = channels.transmit(spec, symbols[messages], rng)
        return codecs.bits_to_message(codecs.bpsk_demap(y))

    return ChannelSystem(2**codecs.K, run)


# -- training -----------------------------------------------------------------

@dataclass
class TrainingHistory:
    steps: list = field(default_factory=list)
    losses: list = field(default_factory=list)

    def record(self, step, loss):
        self.steps.append(int(step))
        self.losses.append(float(loss))


def train_autoencoder(config: ExperimentConfig, train_ebn0_db: float,
                      seed: int):
    """Train one autoencoder at a fixed Eb/N0; deterministic per (config,
    seed).  Returns (ModelParams, TrainingHistory) with the loss recorded
    every ``loss_log_interval`` steps."""
    config.validate()
    layout = nn.default_layout(config.message_count, config.channel_uses,
                               config.decoder_hidden)
    params = nn.init_params(layout, seed)
    state = nn.AdamState.for_params(
        params, config.learning_rate, config.beta1, config.beta2,
        config.epsilon)
    spec = config.channel_spec(train_ebn0_db)
    db = _db_key(train_ebn0_db)
    msg_rng = substream(seed, "train", db)
    noise_rng = substream(seed, "channel", "train", db)
    history = TrainingHistory()
    batch_shape = (config.batch_size, config.channel_uses)
    for step in range(1, config.steps + 1):
        messages = msg_rng.integers(0, config.message_count, config.batch_size)
        noise, fade = channels.draw_disturbance(spec, batch_shape, noise_rng)
        try:
            loss, grads = nn.loss_and_gradients_given(params, messages, noise,
                                                      fade)
        except DivergenceError as exc:
            raise DivergenceError(str(exc), step=step) from exc
        params, state = nn.adam_step(params, grads, state)
        if not params.all_finite():
            raise DivergenceError("non-finite parameters after update",
                                  step=step)
        if step % config.loss_log_interval == 0 or step == config.steps:
            history.record(step, loss)
    return params, history


# -- sweep --------------------------------------------------------------------

@dataclass
class SweepResult:
    curves: list
    models: dict  # (train_ebn0_db, seed) -> ModelParams


def _require_hamming_rate(config):
    if (config.block_bits, config.channel_uses) != (codecs.K, codecs.N):
        raise ConfigurationError(
            f"classical baselines are fixed at rate {codecs.K}/{codecs.N}; "
            f"got {config.rate}")


def _pooled_curve(system_for_seed, seeds, label, test_grid, stop, workers=1):
    points = []
    for db in test_grid:
        errors = 0
        blocks = 0
        for seed in seeds:
            point = estimate_bler(
                system_for_seed(seed, db), db, stop,
                seed_key=(seed, "bler", label, _db_key(db)), workers=workers)
            errors += point.block_errors
            blocks += point.blocks
        points.append(make_bler_point(db, errors, blocks))
    return points


def run_sweep(config: ExperimentConfig, workers: int = 1,
              progress=None) -> SweepResult:
    """Train one autoencoder per (train Eb/N0, seed), evaluate everything on
    the test grid, and attach the classical baselines.

    Autoencoder curves pool blocks and errors across seeds; baselines run
    once on the first seed.  ``progress`` is an optional callable taking a
    status string.
    """
    config.validate()
    _require_hamming_rate(config)
    say = progress if progress is not None else lambda text: None
    stop = StopRule(config.target_block_errors, config.max_blocks)
    grid = config.test_grid()
    curves = []
    models = {}

    for train_db in config.train_ebn0_db:
        for seed in config.seeds:
            say(f"training autoencoder at {train_db:g} dB, seed {seed}")
            params, _ = train_autoencoder(config, train_db, seed)
            models[(train_db, seed)] = params
        label = f"ae-train{train_db:+g}dB"
        say(f"estimating BLER for {label}")
        points = _pooled_curve(
            lambda seed, db: autoencoder_system(
                models[(train_db, seed)], config.channel_spec(db)),
            config.seeds, label, grid, stop, workers)
        curves.append(BlerCurve("autoencoder", label, float(train_db),
                                len(config.seeds), points))

    curves.extend(baseline_curves(config, workers=workers, progress=progress))
    return SweepResult(curves, models)


def baseline_curves(config: ExperimentConfig, workers: int = 1,
                    progress=None) -> list:
    """Hamming hard-decision, Hamming MLD, and uncoded BPSK over the test
    grid.  Hard and MLD share one substream per point, so their noise is
    matched draw for draw."""
    config.validate()
    _require_hamming_rate(config)
    say = progress if progress is not None else lambda text: None
    stop = StopRule(config.target_block_errors, config.max_blocks)
    grid = config.test_grid()
    base_seed = config.seeds[0]
    rate = float(config.rate)
    baselines = (
        ("hamming_hard", "hamming-hard",
         lambda db: hamming_hard_system(channels.ChannelSpec("awgn", db, rate))),
        ("hamming_mld", "hamming-mld",
         lambda db: hamming_mld_system(channels.ChannelSpec("awgn", db, rate))),
        ("uncoded", "uncoded-bpsk",
         lambda db: uncoded_system(channels.ChannelSpec("awgn", db, 1.0))),
    )
    curves = []
    for system_name, label, make in baselines:
        say(f"estimating BLER for {label}")
        points = []
        for db in grid:
            point = estimate_bler(
                make(db), db, stop,
                seed_key=(base_seed, "bler", "baseline-channel", _db_key(db)),
                workers=workers)
            points.append(point)
        curves.append(BlerCurve(system_name, label, None, 1, points))
    return curves


# -- overlap table ------------------------------------------------------------

@dataclass(frozen=True)
class OverlapRow:
    test_ebn0_db: float
    overlap_pct: float
    kl_nats: float


def overlap_table(train_ebn0_db: float, test_ebn0_db, rate) -> list:
    """Univariate overlap (percent) and KL against one training point."""
    rows = []
    for db in test_ebn0_db:
        result = shiftmetrics.compare_received_distributions(
            train_ebn0_db, db, float(rate), dimension=1)
        rows.append(OverlapRow(float(db), 100.0 * result.overlap,
                               result.kl_nats))
    return rows


# -- width probe --------------------------------------------------------------

@dataclass(frozen=True)
class WidthSweepRow:
    decoder_hidden: int
    train_loss: float
    test_loss: float
    parameter_count: int


def width_sweep(config: ExperimentConfig, widths, train_ebn0_db: float = 7.0,
                train_set_size: int = 1024, test_set_size: int = 100_000,
                seed: int | None = None) -> list:
    """Capacity probe: train on a fixed finite set of (message, noise) draws
    at several decoder widths and report train/test cross-entropy.

    Exploratory; emits data, asserts nothing about the curve shape.
    """
    config.validate()
    if any(w < 1 for w in widths):
        raise ConfigurationError("widths must be >= 1")
    if seed is None:
        seed = config.seeds[0]
    m, n = config.message_count, config.channel_uses
    spec = config.channel_spec(train_ebn0_db)
    db = _db_key(train_ebn0_db)

    data_rng = substream(seed, "width-sweep", "dataset", db)
    train_msgs = data_rng.integers(0, m, train_set_size)
    train_noise, train_fade = channels.draw_disturbance(
        spec, (train_set_size, n), data_rng)
    test_rng = substream(seed, "width-sweep", "test", db)
    test_msgs = test_rng.integers(0, m, test_set_size)
    test_noise, test_fade = channels.draw_disturbance(
        spec, (test_set_size, n), test_rng)

    rows = []
    for width in widths:
        layout = nn.default_layout(m, n, int(width))
        params = nn.init_params(layout, seed)
        state = nn.AdamState.for_params(
            params, config.learning_rate, config.beta1, config.beta2,
            config.epsilon)
        # same batch schedule for every width
        batch_rng = substream(seed, "width-sweep", "batches")
        for step in range(1, config.steps + 1):
            idx = batch_rng.integers(0, train_set_size, config.batch_size)
            fade = None if train_fade is None else train_fade[idx]
            try:
                _, grads = nn.loss_and_gradients_given(
                    params, train_msgs[idx], train_noise[idx], fade)
            except DivergenceError as exc:
                raise DivergenceError(f"width {width}: {exc}", step=step) from exc
            params, state = nn.adam_step(params, grads, state)
        train_loss = nn.loss_given_disturbance(params, train_msgs, train_noise,
                                               train_fade)
        test_loss = nn.loss_given_disturbance(params, test_msgs, test_noise,
                                              test_fade)
        count = sum(a.size for a in params.arrays())
        rows.append(WidthSweepRow(int(width), train_loss, test_loss, count))
    return rows


# -- channel-mismatch probe ---------------------------------------------------

def robustness_probe(params: nn.ModelParams, config: ExperimentConfig,
                     train_ebn0_db: float, seed: int | None = None,
                     rhos=(0.5, 0.9), include_rayleigh: bool = True,
                     workers: int = 1) -> list:
    """Evaluate an AWGN-trained model under correlated-noise and Rayleigh
    variants, side by side with its AWGN curve.

    All variants at one test point share one substream per chunk, and the
    additive noise is drawn before the fade, so the comparisons are paired:
    rho = 0 reproduces the AWGN curve exactly.
    """
    config.validate()
    if seed is None:
        seed = config.seeds[0]
    stop = StopRule(config.target_block_errors, config.max_blocks)
    grid = config.test_grid()
    rate = float(config.rate)

    variants = [("awgn", "ae-awgn",
                 lambda db: channels.ChannelSpec("awgn", db, rate))]
    for rho in rhos:
        variants.append(
            (f"corr-rho{rho:g}", f"ae-corr-rho{rho:g}",
             lambda db, rho=rho: channels.ChannelSpec(
                 "correlated_awgn", db, rate, rho=rho)))
    if include_rayleigh:
        variants.append(("rayleigh", "ae-rayleigh",
                         lambda db: channels.ChannelSpec("rayleigh", db, rate)))

    curves = []
    for _, label, make_spec in variants:
        points = []
        for db in grid:
            system = autoencoder_system(params, make_spec(db))
            points.append(estimate_bler(
                system, db, stop,
                seed_key=(seed, "bler", "robust", _db_key(db)),
                workers=workers))
        curves.append(BlerCurve("autoencoder", label, float(train_ebn0_db), 1,
                                points))
    return curves


# -- emitters -----------------------------------------------------------------

SWEEP_CSV_HEADER = ("system,label,train_ebn0_db,test_ebn0_db,blocks,"
                    "block_errors,bler,ci_low,ci_high,seed_count")


def sweep_to_csv(curves) -> str:
    lines = [SWEEP_CSV_HEADER]
    for curve in curves:
        train = "" if curve.train_ebn0_db is None else repr(curve.train_ebn0_db)
        for p in curve.points:
            lines.append(",".join([
                curve.system, curve.label, train, repr(p.test_ebn0_db),
                str(p.blocks), str(p.block_errors), repr(p.bler),
                repr(p.ci_low), repr(p.ci_high), str(curve.seed_count),
            ]))
    return "\n".join(lines) + "\n"


_CLOSED_FORMS = {
    "hamming_hard": codecs.hamming_hard_bler_closed_form,
    "uncoded": codecs.uncoded_bpsk_bler_closed_form,
}


def baseline_to_csv(curves) -> str:
    """Sweep schema plus a closed_form_bler column (empty where no closed
    form exists, e.g. MLD)."""
    lines = [SWEEP_CSV_HEADER + ",closed_form_bler"]
    for curve in curves:
        train = "" if curve.train_ebn0_db is None else repr(curve.train_ebn0_db)
        closed = _CLOSED_FORMS.get(curve.system)
        for p in curve.points:
            reference = "" if closed is None else repr(closed(p.test_ebn0_db))
            lines.append(",".join([
                curve.system, curve.label, train, repr(p.test_ebn0_db),
                str(p.blocks), str(p.block_errors), repr(p.bler),
                repr(p.ci_low), repr(p.ci_high), str(curve.seed_count),
                reference,
            ]))
    return "\n".join(lines) + "\n"


def overlap_to_csv(rows) -> str:
    lines = ["test_ebn0_db,overlap_pct,kl_nats"]
    for row in rows:
        lines.append(f"{row.test_ebn0_db!r},{row.overlap_pct!r},"
                     f"{row.kl_nats!r}")
    return "\n".join(lines) + "\n"


def width_sweep_to_csv(rows) -> str:
    lines = ["decoder_hidden,train_loss,test_loss,parameter_count"]
    for row in rows:
        lines.append(f"{row.decoder_hidden},{row.train_loss!r},"
                     f"{row.test_loss!r},{row.parameter_count}")
    return "\n".join(lines) + "\n"


def history_to_csv(history: TrainingHistory) -> str:
    lines = ["step,loss"]
    for step, loss in zip(history.steps, history.losses):
        lines.append(f"{step},{loss!r}")
    return "\n".join(lines) + "\n"


PLOT_SCRIPT = '''\
#!/usr/bin/env python3
"""Plot BLER curves from a sweep CSV (log BLER vs test Eb/N0)."""
import csv
import sys
from collections import OrderedDict

import matplotlib.pyplot as plt

path = sys.argv[1] if len(sys.argv) > 1 else "sweep.csv"
curves = OrderedDict()
with open(path, newline="") as fh:
    for row in csv.DictReader(fh):
        curves.setdefault(row["label"], []).append(
            (float(row["test_ebn0_db"]), float(row["bler"]),
             float(row["ci_low"]), float(row["ci_high"])))

styles = ["o-", "s-", "^-", "v-", "d-", "x--", "+--", "*--", ".-", "p-"]
plt.figure(figsize=(7, 5))
for i, (label, pts) in enumerate(curves.items()):
    pts.sort()
    db = [p[0] for p in pts]
    bler = [max(p[1], 1e-7) for p in pts]
    plt.semilogy(db, bler, styles[i % len(styles)], label=label,
                 markersize=4)
plt.xlabel("test Eb/N0 (dB)")
plt.ylabel("block error rate")
plt.grid(True, which="both", alpha=0.3)
plt.legend(fontsize=8)
plt.tight_layout()
out = path.rsplit(".", 1)[0] + ".png"
plt.savefig(out, dpi=150)
print(f"wrote {out}")
'''


def write_plot_script(path):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(PLOT_SCRIPT)
