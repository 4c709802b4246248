"""Two effects the closed forms gloss over, measured directly.

First: for a channel carrying exactly one user in each of two layers, the
two decode events are not independent (the strong layer must be decoded
and cancelled before the weak one is even attempted, and the weak user's
gain appears in both SINRs).  The simulator measures the joint decode
probability against the product of the marginals.

Second: the sweep semantics at a stalled channel.  By default a channel
that saw a collision or an undecodable lone signal stays stopped for all
deeper layers; the alternative semantics reopens it when every offending
copy was cancelled through a duplicate decoded elsewhere.  The choice
only matters under repetition, and the gap quantifies it.
"""

from layered_aloha import (
    db_to_linear,
    design_config,
    estimate_joint_capture,
    estimate_outage,
    optimize_rates,
)

# -- decode-event dependence on a shared channel ------------------------------

base = design_config(2, 10, 10.0, 0.0, db_to_linear(3.0))
cfg = base.with_rates(optimize_rates(base).optimal_rates)
est = estimate_joint_capture(cfg, 200_000, seed=7)

print("two layers, 10 channels, arrival 10/layer, 3 dB, optimized rates")
print(f"conditioning events (lone user in each layer at one channel): {est.samples}")
print(f"P(both decode)            = {est.joint.value:.4f} ({est.joint.stderr:.4f})")
print(f"P(layer 1) * P(layer 2)   = {est.marginal_first.value * est.marginal_second.value:.4f}")
print(f"covariance of the events  = {est.covariance:+.4f} ({est.covariance_stderr:.4f})")
print("the closed-form throughput multiplies marginals, so it misses this\n")

# -- stalled-channel semantics under repetition --------------------------------

crrd = design_config(3, 60, 3.0, 1.0, 10.0, repetition=4)
strict = estimate_outage(crrd, 100_000, seed=11)
reopen = estimate_outage(crrd, 100_000, seed=11, reopen_cleared_channels=True)

print("3 layers, 60 channels, arrival 3/layer, rate 1, 10 dB, 4 copies")
print("layer  P_out (stalled stays stopped)  P_out (cancellation reopens)")
for l, (a, b) in enumerate(zip(strict.per_layer, reopen.per_layer), start=1):
    print(f"{l:>5}  {a.value:12.5f} ({a.stderr:.5f})      {b.value:12.5f} ({b.stderr:.5f})")
print("reopening only helps deeper layers; layer 1 never waits on anyone")
