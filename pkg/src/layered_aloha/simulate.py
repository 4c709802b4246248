"""Slot-level Monte Carlo simulator for the layered random-access scheme.

One slot: every layer draws a Poisson number of users, each user places B
copies on B distinct uniformly-chosen channels, and each (user, channel)
pair gets an independent exponential power gain.  The receiver sweeps
layers globally in order 1..L; within a layer, a channel with a single
not-yet-cancelled copy is decoded when log2(1 + SINR) clears the layer
rate, a channel with two or more copies is a collision.  Collisions and
failed singletons stop the sweep at that channel for all deeper layers
(single forward pass -- by default a stopped channel never reopens, even
if the offending copies are later cancelled through duplicates decoded
elsewhere; `reopen_cleared_channels` flips that for sensitivity studies).
After each layer pass, every copy of every user decoded in that layer is
cancelled before the next layer is evaluated.  Cancellation never revisits
same-layer collisions.

Randomness is counter-based (Philox).  Single slots draw from a stream
keyed by (seed, slot index); the estimators consume fixed-size batches of
slots, each batch keyed by (seed, batch index), so results are
bit-identical for any worker count.  Batch reductions go through
math.fsum, which is exactly rounded and hence order-independent.
"""

from __future__ import annotations

import math
import multiprocessing
from dataclasses import dataclass

import numpy as np

from .model import SystemConfig, snr_gap

# user outcome codes, in increasing report priority
DECODED = 0
COLLIDED = 1
SINR_FAILURE = 2
BLOCKED = 3
OUTCOME_NAMES = ("decoded", "collided", "sinr_failure", "blocked")

#: slots per estimator batch.  Part of the sampling contract: changing it
#: changes which substream a slot draws from, hence the sample path.
BATCH_SLOTS = 4096

_KEY_SLOT = 0
_KEY_BATCH = 1 << 63


def _check_seed(seed: int):
    if not isinstance(seed, int) or not 0 <= seed < 2 ** 64:
        raise ValueError(f"seed must be an integer in [0, 2^64), got {seed!r}")


def _philox(seed: int, stream: int) -> np.random.Generator:
    # the key must be handed over as uint64; a plain int list would be
    # coerced through float64 and silently truncate large stream ids
    key = np.array([seed, stream], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def slot_rng(seed: int, slot_index: int) -> np.random.Generator:
    """Independent substream for one slot, keyed by (seed, slot index)."""
    _check_seed(seed)
    if not 0 <= slot_index < _KEY_BATCH:
        raise ValueError(f"slot_index out of range: {slot_index!r}")
    return _philox(seed, _KEY_SLOT + slot_index)


def _batch_rng(seed: int, batch_index: int) -> np.random.Generator:
    return _philox(seed, _KEY_BATCH + batch_index)


@dataclass(eq=False)
class SlotRealization:
    """Sampled arrivals of one slot.

    `channels[l]` is an (M_l, B) array of distinct channel indices per user
    and `gains[l]` the matching (M_l, B) channel power gains, for 0-based
    layer position l.
    """

    counts: np.ndarray
    channels: list[np.ndarray]
    gains: list[np.ndarray]

    def __eq__(self, other):
        if not isinstance(other, SlotRealization):
            return NotImplemented
        return (
            np.array_equal(self.counts, other.counts)
            and all(np.array_equal(a, b) for a, b in zip(self.channels, other.channels))
            and all(np.array_equal(a, b) for a, b in zip(self.gains, other.gains))
        )

    @property
    def num_users(self) -> int:
        return int(self.counts.sum())


@dataclass(frozen=True)
class DecodeReport:
    """Outcome of the SIC sweep over one slot.

    `outcomes[l]` holds one code per layer-l user; a user is DECODED when
    any copy decodes, else COLLIDED when any copy collided, else
    SINR_FAILURE when any lone copy failed its SINR test, else BLOCKED
    (every copy sat on a channel already stopped by lower layers).
    `residual[l, q]` counts layer-l copies left at channel q after the
    layer-l pass and its cancellations.  `stop_layer[q]` is the number of
    layers cleanly cleared at channel q counting from layer 1 (L means the
    sweep never stalled there).
    """

    outcomes: tuple[np.ndarray, ...]
    decoded_per_layer: tuple[int, ...]
    residual: np.ndarray
    stop_layer: np.ndarray


@dataclass(frozen=True)
class EstimatorOutput:
    """Point estimate with its Monte Carlo standard error."""

    value: float
    stderr: float
    slots: int
    seed: int


@dataclass(frozen=True)
class ThroughputEstimate:
    per_layer: tuple[EstimatorOutput, ...]
    total: EstimatorOutput


@dataclass(frozen=True)
class OutageEstimate:
    per_layer: tuple[EstimatorOutput, ...]


@dataclass(frozen=True)
class JointCaptureEstimate:
    """Joint and marginal decode probabilities for isolated two-layer pairs.

    Estimated over channels carrying exactly one user in each of the two
    layers; `covariance` is the sample covariance between the two decode
    indicators (zero would mean the per-layer decode events are
    independent), with `samples` conditioning events observed.
    """

    joint: EstimatorOutput
    marginal_first: EstimatorOutput
    marginal_second: EstimatorOutput
    covariance: float
    covariance_stderr: float
    samples: int


# --- sampling ----------------------------------------------------------------


def _draw_copies(rng, total: int, num_channels: int, copies: int, gain_mean: float):
    """Channel sets and gains for `total` users, one row per user.

    Channels are a partial shuffle (first B entries of a full per-row
    permutation), so each row is a uniform B-subset of distinct channels.
    """
    if total == 0:
        return (
            np.zeros((0, copies), dtype=np.int64),
            np.zeros((0, copies), dtype=np.float64),
        )
    if copies == 1:
        ch = rng.integers(0, num_channels, size=(total, 1))
    else:
        perm = rng.permuted(np.tile(np.arange(num_channels), (total, 1)), axis=1)
        ch = np.ascontiguousarray(perm[:, :copies])
    gains = rng.exponential(scale=gain_mean, size=(total, copies))
    return ch, gains


def sample_slot(config: SystemConfig, rng: np.random.Generator) -> SlotRealization:
    """Draw one slot: Poisson user counts, then channels and gains for all
    users in layer order.  Deterministic given the generator state."""
    lams = np.asarray(config.arrival_rates, dtype=np.float64)
    counts = rng.poisson(lams)
    total = int(counts.sum())
    ch, gains = _draw_copies(rng, total, config.num_channels, config.repetition, config.channel_gain_mean)
    offsets = np.concatenate(([0], np.cumsum(counts)))
    channels_per_layer = [ch[offsets[l]: offsets[l + 1]] for l in range(config.num_layers)]
    gains_per_layer = [gains[offsets[l]: offsets[l + 1]] for l in range(config.num_layers)]
    return SlotRealization(counts=counts, channels=channels_per_layer, gains=gains_per_layer)


# --- per-slot decoding --------------------------------------------------------


def sic_decode(
    slot: SlotRealization, config: SystemConfig, reopen_cleared_channels: bool = False
) -> DecodeReport:
    """Run the layer-by-layer SIC sweep on one slot (see module docstring)."""
    N = config.num_channels
    L = config.num_layers
    P = config.powers
    nus = [snr_gap(r) for r in config.rates]

    # interference seen by layer l at each channel: every copy of layers > l
    suffix = []
    acc = np.full(N, config.noise_power)
    for l in range(L - 1, -1, -1):
        suffix.append(acc.copy())
        ch, g = slot.channels[l], slot.gains[l]
        if l > 0 and ch.size:
            acc += np.bincount(ch.ravel(), weights=P[l] * g.ravel(), minlength=N)
    suffix.reverse()

    blocked = np.zeros(N, dtype=bool)
    residual_below = np.zeros(N, dtype=np.int64)
    alive = np.ones(N, dtype=bool)  # consecutively cleared from layer 1
    stop_layer = np.zeros(N, dtype=np.int64)
    residual = np.zeros((L, N), dtype=np.int64)
    outcomes = []
    decoded_per_layer = []

    for l in range(L):
        ch, g = slot.channels[l], slot.gains[l]
        m = ch.shape[0]
        open_now = (residual_below == 0) if reopen_cleared_channels else ~blocked
        if m == 0:
            outcomes.append(np.zeros(0, dtype=np.int8))
            decoded_per_layer.append(0)
            alive &= open_now  # an empty layer stalls nothing
            stop_layer[alive] = l + 1
            continue
        occ = np.bincount(ch.ravel(), minlength=N)
        copy_open = open_now[ch]
        coll = copy_open & (occ[ch] >= 2)
        single = copy_open & (occ[ch] == 1)
        ok = single & (P[l] * g >= nus[l] * suffix[l][ch])
        user_decoded = ok.any(axis=1)

        out = np.full(m, BLOCKED, dtype=np.int8)
        out[(single & ~ok).any(axis=1)] = SINR_FAILURE
        out[coll.any(axis=1)] = COLLIDED
        out[user_decoded] = DECODED
        outcomes.append(out)
        decoded_per_layer.append(int(user_decoded.sum()))

        stalled = np.zeros(N, dtype=bool)
        stalled[ch[coll]] = True
        stalled[ch[single & ~ok]] = True
        blocked |= stalled
        alive &= open_now & ~stalled
        stop_layer[alive] = l + 1

        res = occ.copy()
        if user_decoded.any():  # cancel every copy of each decoded user
            res -= np.bincount(ch[user_decoded].ravel(), minlength=N)
        residual[l] = res
        residual_below += res

    return DecodeReport(
        outcomes=tuple(outcomes),
        decoded_per_layer=tuple(decoded_per_layer),
        residual=residual,
        stop_layer=stop_layer,
    )


# --- batched sampling + decoding (estimator fast path) -------------------------


def _sample_batch(config: SystemConfig, seed: int, batch_index: int, size: int):
    """Sample `size` slots from the batch substream.

    Returns (counts (S, L), channels (T, B), gains (T, B), slot_of_row,
    layer_of_row); copy rows are slot-major, layer-major within a slot.
    """
    rng = _batch_rng(seed, batch_index)
    L = config.num_layers
    lams = np.asarray(config.arrival_rates, dtype=np.float64)
    counts = rng.poisson(lam=lams, size=(size, L))
    total = int(counts.sum())
    ch, gains = _draw_copies(rng, total, config.num_channels, config.repetition, config.channel_gain_mean)
    slot_of_row = np.repeat(np.arange(size), counts.sum(axis=1))
    layer_of_row = np.tile(np.arange(L), size).repeat(counts.ravel())
    return counts, ch, gains, slot_of_row, layer_of_row


def _batch_from_slots(slots: list[SlotRealization]):
    """Adapter packing sampled slots into the batched-decode layout."""
    L = slots[0].counts.shape[0]
    counts = np.stack([s.counts for s in slots])
    ch_parts, gain_parts = [], []
    for s in slots:
        for l in range(L):
            if s.channels[l].size:
                ch_parts.append(s.channels[l])
                gain_parts.append(s.gains[l])
    B = slots[0].channels[0].shape[1] if slots[0].channels else 1
    ch = np.concatenate(ch_parts) if ch_parts else np.zeros((0, B), dtype=np.int64)
    gains = np.concatenate(gain_parts) if gain_parts else np.zeros((0, B))
    slot_of_row = np.repeat(np.arange(len(slots)), counts.sum(axis=1))
    layer_of_row = np.tile(np.arange(L), len(slots)).repeat(counts.ravel())
    return counts, ch, gains, slot_of_row, layer_of_row


def _decode_batch(
    batch,
    config: SystemConfig,
    reopen_cleared_channels: bool = False,
    want_channel_flags: bool = False,
):
    """Vectorized SIC sweep over a batch of slots.

    Channels of different slots live at disjoint keys slot*N + q, so one
    pass decodes all slots at once.  Returns per-slot decoded counts
    (S, L); with `want_channel_flags` also per-layer channel occupancy and
    singleton-decode flags (used by the joint-capture estimator).
    """
    counts, ch, gains, slot_of_row, layer_of_row = batch
    S, L = counts.shape
    N = config.num_channels
    SN = S * N
    P = config.powers
    nus = [snr_gap(r) for r in config.rates]
    keys = ch + (slot_of_row * N)[:, None]

    layer_rows = [np.nonzero(layer_of_row == l)[0] for l in range(L)]
    suffix = []
    acc = None
    for l in range(L - 1, -1, -1):
        suffix.append(acc)
        if l > 0 and layer_rows[l].size:
            r = layer_rows[l]
            w = np.bincount(keys[r].ravel(), weights=P[l] * gains[r].ravel(), minlength=SN)
            acc = w if acc is None else acc + w
    suffix.reverse()  # suffix[l] is interferer power above layer l (None if nothing)

    blocked = np.zeros(SN, dtype=bool)
    residual_below = np.zeros(SN, dtype=np.int64)
    decoded = np.zeros((S, L))
    occ_flags, dec_flags = [], []

    for l in range(L):
        r = layer_rows[l]
        if r.size == 0:
            if want_channel_flags:
                occ_flags.append(np.zeros(SN, dtype=np.int64))
                dec_flags.append(np.zeros(SN, dtype=bool))
            continue
        k = keys[r]
        g = gains[r]
        occ = np.bincount(k.ravel(), minlength=SN)
        open_now = (residual_below[k] == 0) if reopen_cleared_channels else ~blocked[k]
        coll = open_now & (occ[k] >= 2)
        single = open_now & (occ[k] == 1)
        interference = config.noise_power if suffix[l] is None else suffix[l][k] + config.noise_power
        ok = single & (P[l] * g >= nus[l] * interference)
        user_decoded = ok.any(axis=1)
        decoded[:, l] = np.bincount(slot_of_row[r][user_decoded], minlength=S)

        blocked[k[coll]] = True
        blocked[k[single & ~ok]] = True
        if reopen_cleared_channels or want_channel_flags:
            res = occ.copy()
            if user_decoded.any():
                res -= np.bincount(k[user_decoded].ravel(), minlength=SN)
            residual_below += res
        if want_channel_flags:
            flag = np.zeros(SN, dtype=bool)
            flag[k[ok]] = True
            occ_flags.append(occ)
            dec_flags.append(flag)

    if want_channel_flags:
        return decoded, occ_flags, dec_flags
    return decoded


# --- estimators ----------------------------------------------------------------


def _batch_worker(args):
    mode, config, seed, batch_index, size, reopen = args
    batch = _sample_batch(config, seed, batch_index, size)
    counts = batch[0]
    if mode == "throughput":
        dec = _decode_batch(batch, config, reopen)
        bits = dec * np.asarray(config.rates)
        tot = bits.sum(axis=1)
        return (
            bits.sum(axis=0),
            (bits * bits).sum(axis=0),
            float(tot.sum()),
            float(tot @ tot),
        )
    if mode == "outage":
        dec = _decode_batch(batch, config, reopen)
        und = counts - dec
        return (
            und.sum(axis=0),
            counts.sum(axis=0).astype(np.float64),
            (und * und).sum(axis=0),
            (und * counts).sum(axis=0),
            (counts * counts).sum(axis=0).astype(np.float64),
        )
    if mode == "joint":
        _, occ_flags, dec_flags = _decode_batch(batch, config, reopen, want_channel_flags=True)
        mask = (occ_flags[0] == 1) & (occ_flags[1] == 1)
        a = dec_flags[0][mask]
        b = dec_flags[1][mask]
        return (
            float(mask.sum()),
            float(a.sum()),
            float(b.sum()),
            float((a & b).sum()),
        )
    raise ValueError(f"unknown estimator mode {mode!r}")


def _map_batches(mode, config, num_slots, seed, workers, reopen):
    if num_slots < 1:
        raise ValueError(f"num_slots must be >= 1, got {num_slots}")
    _check_seed(seed)
    tasks = []
    for bi in range(0, (num_slots + BATCH_SLOTS - 1) // BATCH_SLOTS):
        size = min(BATCH_SLOTS, num_slots - bi * BATCH_SLOTS)
        tasks.append((mode, config, seed, bi, size, reopen))
    if workers <= 1 or len(tasks) == 1:
        return [_batch_worker(t) for t in tasks]
    with multiprocessing.Pool(processes=min(workers, len(tasks))) as pool:
        return pool.map(_batch_worker, tasks, chunksize=1)


def _fsum_field(partials, idx, layer=None):
    if layer is None:
        return math.fsum(p[idx] for p in partials)
    return math.fsum(float(p[idx][layer]) for p in partials)


def _mean_se(total: float, total_sq: float, n: int) -> tuple[float, float]:
    mean = total / n
    if n < 2:
        return mean, 0.0
    var = max(0.0, (total_sq - n * mean * mean) / (n - 1))
    return mean, math.sqrt(var / n)


def estimate_throughput(
    config: SystemConfig,
    num_slots: int,
    seed: int,
    workers: int = 1,
    reopen_cleared_channels: bool = False,
) -> ThroughputEstimate:
    """Per-layer and total decoded bits per slot, with standard errors.

    One sample per slot: the sum over decoded users of their layer rate.
    Deterministic for fixed (config, num_slots, seed) whatever `workers`.
    """
    partials = _map_batches("throughput", config, num_slots, seed, workers, reopen_cleared_channels)
    per_layer = []
    for l in range(config.num_layers):
        mean, se = _mean_se(_fsum_field(partials, 0, l), _fsum_field(partials, 1, l), num_slots)
        per_layer.append(EstimatorOutput(mean, se, num_slots, seed))
    mean, se = _mean_se(_fsum_field(partials, 2), _fsum_field(partials, 3), num_slots)
    return ThroughputEstimate(per_layer=tuple(per_layer), total=EstimatorOutput(mean, se, num_slots, seed))


def estimate_outage(
    config: SystemConfig,
    num_slots: int,
    seed: int,
    workers: int = 1,
    reopen_cleared_channels: bool = False,
) -> OutageEstimate:
    """Per-layer fraction of users not decoded, aggregated over slots.

    Ratio estimator: undecoded users / present users, so slots without
    layer-l arrivals contribute nothing to layer l.  The standard error
    treats slots as iid (delta method for the ratio).
    """
    if any(lam <= 0 for lam in config.arrival_rates):
        raise ValueError("outage estimation needs a positive arrival rate in every layer")
    partials = _map_batches("outage", config, num_slots, seed, workers, reopen_cleared_channels)
    per_layer = []
    for l in range(config.num_layers):
        u = _fsum_field(partials, 0, l)
        c = _fsum_field(partials, 1, l)
        u2 = _fsum_field(partials, 2, l)
        uc = _fsum_field(partials, 3, l)
        c2 = _fsum_field(partials, 4, l)
        if c == 0:
            per_layer.append(EstimatorOutput(float("nan"), float("nan"), num_slots, seed))
            continue
        ratio = u / c
        resid_sq = max(0.0, u2 - 2.0 * ratio * uc + ratio * ratio * c2)
        per_layer.append(EstimatorOutput(ratio, math.sqrt(resid_sq) / c, num_slots, seed))
    return OutageEstimate(per_layer=tuple(per_layer))


def estimate_joint_capture(
    config: SystemConfig, num_slots: int, seed: int, workers: int = 1
) -> JointCaptureEstimate:
    """Decode statistics for channels holding exactly one user per layer.

    Requires a two-layer, single-copy config.  Conditioned on a channel
    with a lone user in each layer, estimates the probability both decode,
    each marginal, and the covariance between the two decode indicators.
    Per-channel user counts are independent across channels (Poisson
    splitting), so the conditioning events are iid samples.
    """
    if config.num_layers != 2:
        raise ValueError(f"joint capture is defined for exactly 2 layers, got {config.num_layers}")
    if config.repetition != 1:
        raise ValueError("joint capture is defined for single-copy transmission (repetition = 1)")
    partials = _map_batches("joint", config, num_slots, seed, workers, False)
    n = _fsum_field(partials, 0)
    sa = _fsum_field(partials, 1)
    sb = _fsum_field(partials, 2)
    sab = _fsum_field(partials, 3)
    if n == 0:
        nan = EstimatorOutput(float("nan"), float("nan"), num_slots, seed)
        return JointCaptureEstimate(nan, nan, nan, float("nan"), float("nan"), 0)
    p1, p2, p11 = sa / n, sb / n, sab / n
    cov = p11 - p1 * p2
    # second moment of (a - p1)(b - p2) over the four cells of the 2x2 table
    p10, p01 = p1 - p11, p2 - p11
    p00 = 1.0 - p1 - p2 + p11
    m2 = (
        p11 * ((1 - p1) * (1 - p2)) ** 2
        + p10 * ((1 - p1) * p2) ** 2
        + p01 * (p1 * (1 - p2)) ** 2
        + p00 * (p1 * p2) ** 2
    )
    cov_se = math.sqrt(max(0.0, m2 - cov * cov) / n)

    def _binom(p):
        return EstimatorOutput(p, math.sqrt(max(0.0, p * (1 - p) / n)), num_slots, seed)

    return JointCaptureEstimate(
        joint=_binom(p11),
        marginal_first=_binom(p1),
        marginal_second=_binom(p2),
        covariance=cov,
        covariance_stderr=cov_se,
        samples=int(n),
    )
