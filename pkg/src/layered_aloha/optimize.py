"""Recursive per-layer optimization of rates and of normalized arrivals.

The total throughput decomposes as T_l(R_l) = R_l eta_l(R_l) +
rho_l(R_l) T_{l+1}(R*_{l+1}) because the capture probability of a layer
depends only on its own rate once powers and arrivals are fixed.  The
optimal rates therefore come from L scalar maximizations run from the top
layer down, each treating the next layer's optimum as a constant.  The
same backward recursion applies to the normalized-arrival optimization of
the common-rate lower bound.

Scalar maximization is a coarse uniform grid followed by golden-section
refinement of the best bracket; the per-layer objective is not known to be
unimodal, so the grid stage guards against local maxima.  Ties break
toward the smallest argument.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .model import SystemConfig, snr_gap
from .throughput import capture_prob_exact, capture_prob_lower_bound

_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class SearchSettings:
    """Knobs for the scalar grid + golden-section search."""

    rate_max: float = 16.0
    grid_points: int = 2048
    refine_tol: float = 1e-9
    arrival_max: float = 4.0

    def __post_init__(self):
        if self.rate_max <= 0:
            raise ValueError(f"rate_max must be > 0, got {self.rate_max}")
        if self.grid_points < 2:
            raise ValueError(f"grid_points must be >= 2, got {self.grid_points}")
        if self.refine_tol <= 0:
            raise ValueError(f"refine_tol must be > 0, got {self.refine_tol}")
        if self.arrival_max <= 0:
            raise ValueError(f"arrival_max must be > 0, got {self.arrival_max}")


@dataclass(frozen=True)
class RatePlan:
    """Result of the backward rate recursion.

    `layer_values[i]` is the optimized partial objective covering layers
    i+1..L (1-based), so `layer_values[0]` is the full objective and
    equals `achieved_throughput`.
    """

    optimal_rates: tuple[float, ...]
    layer_values: tuple[float, ...]
    achieved_throughput: float


@dataclass(frozen=True)
class ArrivalPlan:
    """Result of the backward normalized-arrival recursion (common rate)."""

    optimal_tau: tuple[float, ...]
    layer_values: tuple[float, ...]
    value: float


def _golden_max(f, lo: float, hi: float, tol: float) -> float:
    """Golden-section maximization of f on [lo, hi] down to bracket width tol."""
    a, b = lo, hi
    c = b - _INV_PHI * (b - a)
    d = a + _INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    while d - c > tol:
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - _INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INV_PHI * (b - a)
            fd = f(d)
    return 0.5 * (a + b)


def _maximize_scalar(f, upper: float, settings: SearchSettings) -> tuple[float, float]:
    """Grid scan on [0, upper] then golden refinement around the best point.

    Returns (argmax, max).  The first of equal grid values wins, so ties
    break toward the smallest argument.
    """
    n = settings.grid_points
    xs = [upper * k / n for k in range(n + 1)]
    best_i = 0
    best_v = f(xs[0])
    for i in range(1, n + 1):
        v = f(xs[i])
        if v > best_v:
            best_i, best_v = i, v
    lo = xs[best_i - 1] if best_i > 0 else xs[0]
    hi = xs[best_i + 1] if best_i < n else xs[n]
    x = _golden_max(f, lo, hi, settings.refine_tol)
    v = f(x)
    if v > best_v:
        return x, v
    return xs[best_i], best_v


def optimize_rates(
    config: SystemConfig,
    settings: SearchSettings | None = None,
    use_bound: bool = False,
) -> RatePlan:
    """Find per-layer rates maximizing the analytic total throughput.

    Rates already present in `config` are ignored.  Layers with zero
    arrivals contribute nothing and get rate 0.  `use_bound` runs the
    recursion on the Jensen lower-bound capture probability instead of the
    exact one.
    """
    settings = settings or SearchSettings()
    capture = capture_prob_lower_bound if use_bound else capture_prob_exact
    N = config.num_channels
    L = config.num_layers
    rates = [0.0] * L
    values = [0.0] * L
    value_above = 0.0
    for l in range(L, 0, -1):
        lam = config.layers[l - 1].arrival_rate
        if lam == 0.0:
            # empty layer: eta = 0 and rho = 1, objective flat in R
            rates[l - 1] = 0.0
            values[l - 1] = value_above
            continue
        decay = math.exp(-lam / N)

        def objective(r, l=l, lam=lam, decay=decay, tail=value_above):
            phi = capture(l, config, rate=r)
            return r * phi * lam * decay + (1.0 + phi * lam / N) * decay * tail

        r_star, v_star = _maximize_scalar(objective, settings.rate_max, settings)
        rates[l - 1] = r_star
        values[l - 1] = v_star
        value_above = v_star
    return RatePlan(tuple(rates), tuple(values), values[0])


def optimize_arrivals(
    num_layers: int,
    num_channels: int,
    rate: float,
    gamma: float,
    settings: SearchSettings | None = None,
) -> ArrivalPlan:
    """Normalized arrivals maximizing the common-rate decoded-packet bound.

    With phi = exp(-nu(rate)/gamma) fixed, the per-layer term
    phi tau exp(-tau) and clear probability (1 + phi tau) exp(-tau) depend
    only on that layer's tau, so the same backward recursion applies.  The
    returned value is scaled by `num_channels`.
    """
    settings = settings or SearchSettings()
    if num_layers < 1:
        raise ValueError(f"num_layers must be >= 1, got {num_layers}")
    if num_channels < 1:
        raise ValueError(f"num_channels must be >= 1, got {num_channels}")
    if gamma <= 0:
        raise ValueError(f"gamma must be > 0, got {gamma}")
    phi = math.exp(-snr_gap(rate) / gamma)
    taus = [0.0] * num_layers
    values = [0.0] * num_layers
    value_above = 0.0
    for l in range(num_layers - 1, -1, -1):

        def objective(t, tail=value_above):
            return phi * t * math.exp(-t) + (1.0 + phi * t) * math.exp(-t) * tail

        t_star, v_star = _maximize_scalar(objective, settings.arrival_max, settings)
        taus[l] = t_star
        values[l] = v_star
        value_above = v_star
    return ArrivalPlan(tuple(taus), tuple(values), num_channels * values[0])
