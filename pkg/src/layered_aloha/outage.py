"""Outage analysis for repetition transmission (B copies on distinct channels).

A layer-l user fails only if every one of its B copies collides or fades
out.  Conditioning on the number m of users in the layer, a single copy
fails with alpha(m) = p_c(m) + (1 - p_c(m)) beta, and treating the copies
as independent gives the per-layer failure probability

    Psi_l = sum_{m>=1} alpha(m)^B P(m | m >= 1).

This is exact for B = 1 and an approximation otherwise (copies of one user
can share interferers).  The infinite series has an equivalent finite form
obtained by binomial expansion; both are implemented here and must agree,
which is how each re-verifies the other.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .model import SystemConfig, collision_prob, snr_gap
from .throughput import capture_prob_exact

# The alternating finite form of the collision moments cancels
# catastrophically for deep moments or omega near 1; past these guards the
# direct conditional summation is used instead (same quantity).
_ALTERNATING_MAX_ORDER = 20
_ALTERNATING_BLOWUP = 1e6


@dataclass(frozen=True)
class OutageReport:
    """Per-layer failure probabilities psi, cascaded outage, and inputs.

    `outage[l-1]` is 1 - prod_{i<=l}(1 - psi_i): a layer-l user is in outage
    if its own layer fails or any layer below stalls the receiver.  `omega`
    is (1 - 1/N)**B; `beta` the per-layer single-copy decoding-error
    probabilities.
    """

    psi: tuple[float, ...]
    outage: tuple[float, ...]
    omega: float
    beta: tuple[float, ...]


def beta_crrd(l: int, config: SystemConfig) -> float:
    """Single-copy decoding-error probability of layer l under repetition.

    Same structure as 1 - capture probability, but each upper-layer user now
    loads B copies, so the per-channel occupancy mean is lambda_i B / N:

        1 - exp( -nu N_0 / (P_l s2)
                 - sum_{i>l} (lambda_i B / N) nu P_i / (P_l + nu P_i) ).

    Reduces to 1 - capture_prob_exact(l) when B = 1.
    """
    if not 1 <= l <= config.num_layers:
        raise ValueError(f"layer index must be in 1..{config.num_layers}, got {l}")
    lp = config.layers[l - 1]
    nu = snr_gap(lp.rate)
    B = config.repetition
    expo = nu * config.noise_power / (lp.power * config.channel_gain_mean)
    for i in range(l, config.num_layers):
        up = config.layers[i]
        expo += (up.arrival_rate * B / config.num_channels) * nu * up.power / (lp.power + nu * up.power)
    return 1.0 - math.exp(-expo)


def _conditional_pmf_terms(arrival_rate: float, tail_tol: float):
    """Yield (m, P(m | m >= 1)) until the conditional tail drops below tail_tol.

    Hard cap at max(50, ceil(lam + 10 sqrt(lam) + 30)) terms; the Poisson
    tail there is far below any practical tolerance.
    """
    lam = arrival_rate
    cap = max(50, math.ceil(lam + 10.0 * math.sqrt(lam) + 30.0))
    denom = -math.expm1(-lam)  # 1 - e^-lam, accurate for small lam
    pmf = lam * math.exp(-lam)  # P(M = 1)
    remaining = denom
    for m in range(1, cap + 1):
        yield m, pmf / denom
        remaining -= pmf
        if remaining / denom < tail_tol:
            return
        pmf *= lam / (m + 1)


def psi_series(
    l: int, config: SystemConfig, tail_tol: float = 1e-12, beta: float | None = None
) -> float:
    """Per-layer failure probability by direct truncated summation.

    This is the brute-force evaluation of the conditional expectation
    E[alpha(M)^B | M >= 1] and serves as the oracle for the finite form in
    :func:`psi_closed_form`.  `beta` overrides the layer's single-copy error
    probability (useful for isolating the collision part).
    """
    lam = _positive_arrival(l, config)
    if tail_tol <= 0:
        raise ValueError(f"tail_tol must be > 0, got {tail_tol}")
    if beta is None:
        beta = beta_crrd(l, config)
    N, B = config.num_channels, config.repetition
    total = 0.0
    for m, pbar in _conditional_pmf_terms(lam, tail_tol):
        pc = collision_prob(m, N, B)
        alpha = pc + (1.0 - pc) * beta
        total += (alpha ** B) * pbar
    return total


def conditional_collision_moment(
    b: int, arrival_rate: float, num_channels: int, copies: int, tail_tol: float = 1e-12
) -> float:
    """E[p_c(M)^b | M >= 1] by direct conditional-Poisson summation."""
    if b < 0:
        raise ValueError(f"moment order must be >= 0, got {b}")
    if arrival_rate <= 0:
        raise ValueError(f"arrival_rate must be > 0, got {arrival_rate}")
    if b == 0:
        return 1.0
    total = 0.0
    for m, pbar in _conditional_pmf_terms(arrival_rate, tail_tol):
        total += collision_prob(m, num_channels, copies) ** b * pbar
    return total


def _collision_moment_alternating(b: int, lam: float, omega: float) -> float:
    """Finite alternating form of E[p_c(M)^b | M >= 1].

    g(b) = sum_j C(b,j) (-1)^j omega^-j (e^{-lam(1-omega^j)} - e^-lam)
           / (1 - e^-lam)

    Falls back to the direct summation when the partial sums dwarf the
    result (cancellation) or the order is deep.
    """
    denom = -math.expm1(-lam)
    total = 0.0
    max_abs = 0.0
    e_lam = math.exp(-lam)
    for j in range(b + 1):
        term = math.comb(b, j) * (-1.0) ** j * omega ** (-j) * (
            math.exp(-lam * (1.0 - omega ** j)) - e_lam
        )
        total += term
        max_abs = max(max_abs, abs(total))
    g = total / denom
    if max_abs > _ALTERNATING_BLOWUP * abs(g) * denom:
        return float("nan")  # caller falls back to the direct summation
    return g


def _collision_moment(b: int, lam: float, num_channels: int, copies: int) -> float:
    omega = (1.0 - 1.0 / num_channels) ** copies
    if b == 0:
        return 1.0
    if b <= _ALTERNATING_MAX_ORDER:
        g = _collision_moment_alternating(b, lam, omega)
        if not math.isnan(g):
            return g
    return conditional_collision_moment(b, lam, num_channels, copies)


def psi_closed_form(l: int, config: SystemConfig) -> float:
    """Per-layer failure probability as a finite double sum.

    Binomial expansion of alpha(m)^B = (p_c(m) + (1 - p_c(m)) beta)^B turns
    the series into

        Psi_l = sum_{b=0}^B C(B,b) (1-beta)^b beta^{B-b} g(b)

    with g(b) = E[p_c(M)^b | M >= 1] in closed form.  Agrees with
    :func:`psi_series` to near machine precision.
    """
    lam = _positive_arrival(l, config)
    beta = beta_crrd(l, config)
    N, B = config.num_channels, config.repetition
    total = 0.0
    for b in range(B + 1):
        weight = math.comb(B, b) * (1.0 - beta) ** b * beta ** (B - b)
        if weight == 0.0:
            continue
        total += weight * _collision_moment(b, lam, N, B)
    return total


def outage(config: SystemConfig) -> OutageReport:
    """Per-layer psi (finite form) and the error-propagation cascade.

    The receiver clears layers in order, so a layer-l user is served only
    when layers 1..l all succeed: P_out,l = 1 - prod_{i<=l}(1 - psi_i).
    Requires every layer to have a positive arrival rate (psi conditions on
    at least one user).
    """
    L = config.num_layers
    psis = tuple(psi_closed_form(l, config) for l in range(1, L + 1))
    betas = tuple(beta_crrd(l, config) for l in range(1, L + 1))
    outs = []
    fail = 0.0  # running 1 - prod(1 - psi_i), accumulated to keep P_out,1 == psi_1 exact
    for p in psis:
        fail = fail + (1.0 - fail) * p
        outs.append(fail)
    omega = (1.0 - 1.0 / config.num_channels) ** config.repetition
    return OutageReport(psi=psis, outage=tuple(outs), omega=omega, beta=betas)


def _positive_arrival(l: int, config: SystemConfig) -> float:
    if not 1 <= l <= config.num_layers:
        raise ValueError(f"layer index must be in 1..{config.num_layers}, got {l}")
    lam = config.layers[l - 1].arrival_rate
    if lam <= 0:
        raise ValueError(
            f"layer {l} has arrival rate 0; the failure probability conditions on m >= 1"
        )
    return lam
