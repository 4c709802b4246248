"""Closed-form capture probabilities and throughput of the layered scheme.

All expressions here model single-copy transmission (one copy per user per
slot); the repetition variant is handled by :mod:`layered_aloha.outage`.
The per-layer throughput chains the channel-clear probabilities of the
layers below, which treats decoding events in different layers as
independent -- exact for the first layer and for L = 1, an approximation
for deeper layers (the simulator quantifies the gap).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .model import SystemConfig, interference_variance, snr_gap

# Reference constants for the two classic baselines, in decoded packets per
# slot per channel.  The repetition-slotted-ALOHA figure is the published
# asymptotic value for an optimized degree distribution with repetition
# capped at 16; it is a literature constant, not something computed here.
IRSA_PACKETS_PER_CHANNEL = 0.965
ALOHA_PACKETS_PER_CHANNEL = math.exp(-1.0)


@dataclass(frozen=True)
class AnalyticReport:
    """Per-layer closed-form quantities plus the total throughput.

    `layer_throughput[l]` is R_l * (prod of lower-layer rho) * eta_l using
    `capture_exact` (or `capture_bound` when `used_bound` is set); the total
    is their sum, in bits per channel use.
    """

    capture_exact: tuple[float, ...]
    capture_bound: tuple[float, ...]
    eta: tuple[float, ...]
    rho: tuple[float, ...]
    layer_throughput: tuple[float, ...]
    total_throughput: float
    used_bound: bool = False


def _check_layer(l: int, config: SystemConfig):
    if not 1 <= l <= config.num_layers:
        raise ValueError(f"layer index must be in 1..{config.num_layers}, got {l}")


def capture_prob_exact(l: int, config: SystemConfig, rate: float | None = None) -> float:
    """Probability that a lone layer-l signal survives fading and upper-layer
    interference at its rate.

    Averaging the Rayleigh decoding event over the exponential interferer
    gains and the Poisson per-channel occupancy (mean lambda_i / N) gives

        exp( -nu(R_l) N_0 / (P_l s2)
             - sum_{i>l} (lambda_i/N) nu(R_l) P_i / (P_l + nu(R_l) P_i) )

    with s2 the mean channel gain.  ``l`` is 1-based; `rate` overrides the
    layer's configured rate (handy for rate searches).
    """
    _check_layer(l, config)
    lp = config.layers[l - 1]
    nu = snr_gap(lp.rate if rate is None else rate)
    expo = nu * config.noise_power / (lp.power * config.channel_gain_mean)
    for i in range(l, config.num_layers):
        up = config.layers[i]
        expo += (up.arrival_rate / config.num_channels) * nu * up.power / (lp.power + nu * up.power)
    return math.exp(-expo)


def capture_prob_lower_bound(l: int, config: SystemConfig, rate: float | None = None) -> float:
    """Jensen lower bound exp(-nu(R_l)/gamma_l) on the capture probability.

    gamma_l = P_l s2 / sigma_bar_l^2 is the layer's average SINR with the
    interference replaced by its mean.  Tight (equal to the exact value)
    for the top layer, which sees no interference.
    """
    _check_layer(l, config)
    lp = config.layers[l - 1]
    gamma_l = lp.power * config.channel_gain_mean / interference_variance(l, config, copies=1)
    return math.exp(-snr_gap(lp.rate if rate is None else rate) / gamma_l)


def eta(l: int, config: SystemConfig, capture_prob: float) -> float:
    """Expected decoded packets at layer l once all lower layers are clear:
    capture_prob * lambda_l * exp(-lambda_l / N)."""
    _check_layer(l, config)
    if not 0.0 <= capture_prob <= 1.0:
        raise ValueError(f"capture_prob must be in [0, 1], got {capture_prob}")
    lam = config.layers[l - 1].arrival_rate
    return capture_prob * lam * math.exp(-lam / config.num_channels)


def rho(l: int, config: SystemConfig, capture_prob: float) -> float:
    """Probability a given channel is clear after the layer-l pass (empty, or
    a lone decodable signal): (1 + capture_prob * lambda_l / N) * exp(-lambda_l / N)."""
    _check_layer(l, config)
    if not 0.0 <= capture_prob <= 1.0:
        raise ValueError(f"capture_prob must be in [0, 1], got {capture_prob}")
    lam = config.layers[l - 1].arrival_rate
    x = lam / config.num_channels
    return (1.0 + capture_prob * x) * math.exp(-x)


def throughput(config: SystemConfig, use_bound: bool = False) -> AnalyticReport:
    """Total throughput sum_l R_l (prod_{m<l} rho_m) eta_l and its pieces.

    `use_bound` switches the capture probability to the Jensen lower bound
    (useful for conservative comparisons); the default is the exact form.
    """
    L = config.num_layers
    cap_exact = tuple(capture_prob_exact(l, config) for l in range(1, L + 1))
    cap_bound = tuple(capture_prob_lower_bound(l, config) for l in range(1, L + 1))
    caps = cap_bound if use_bound else cap_exact
    etas = tuple(eta(l, config, caps[l - 1]) for l in range(1, L + 1))
    rhos = tuple(rho(l, config, caps[l - 1]) for l in range(1, L + 1))
    per_layer = []
    clear = 1.0  # probability all lower layers are clear at this channel
    for l in range(L):
        per_layer.append(config.layers[l].rate * clear * etas[l])
        clear *= rhos[l]
    return AnalyticReport(
        capture_exact=cap_exact,
        capture_bound=cap_bound,
        eta=etas,
        rho=rhos,
        layer_throughput=tuple(per_layer),
        total_throughput=math.fsum(per_layer),
        used_bound=use_bound,
    )


def sla_layer_contributions(num_channels: int, tau, rate: float, gamma: float) -> tuple[float, ...]:
    """Per-layer terms of the common-rate decoded-packet lower bound.

    Layer l contributes N * (prod_{m<l} rho_m) * phi * tau_l * exp(-tau_l)
    expected decoded packets, with phi = exp(-nu(rate)/gamma) and
    rho_m = (1 + phi tau_m) exp(-tau_m).
    """
    if num_channels < 1:
        raise ValueError(f"num_channels must be >= 1, got {num_channels}")
    if gamma <= 0:
        raise ValueError(f"gamma must be > 0, got {gamma}")
    taus = [float(t) for t in tau]
    if not taus or any(t < 0 for t in taus):
        raise ValueError("tau must be a non-empty list of non-negative values")
    phi = math.exp(-snr_gap(rate) / gamma)
    contribs = []
    clear = 1.0
    for t in taus:
        contribs.append(num_channels * clear * phi * t * math.exp(-t))
        clear *= (1.0 + phi * t) * math.exp(-t)
    return tuple(contribs)


def sla_lower_bound(num_channels: int, tau, rate: float, gamma: float) -> float:
    """Lower bound on expected decoded packets per slot with a common rate.

    With phi = exp(-nu(rate)/gamma) held fixed and normalized arrivals
    tau_l = lambda_l / N, the bound is
    N * sum_l (prod_{m<l} rho_m) * phi * tau_l * exp(-tau_l) with
    rho_m = (1 + phi tau_m) exp(-tau_m).  Scales linearly in N by
    construction (exactly: every term carries the explicit N factor).
    """
    return math.fsum(sla_layer_contributions(num_channels, tau, rate, gamma))


def baseline_aloha_max(num_channels: int) -> float:
    """Peak expected decoded packets of plain multichannel slotted ALOHA: N/e."""
    if num_channels < 1:
        raise ValueError(f"num_channels must be >= 1, got {num_channels}")
    return ALOHA_PACKETS_PER_CHANNEL * num_channels


def baseline_irsa(num_channels: int) -> float:
    """Asymptotic decoded packets of optimized irregular repetition slotted
    ALOHA (literature value 0.965 per channel, repetition capped at 16)."""
    if num_channels < 1:
        raise ValueError(f"num_channels must be >= 1, got {num_channels}")
    return IRSA_PACKETS_PER_CHANNEL * num_channels
