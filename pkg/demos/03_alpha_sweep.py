"""
How the stability index shapes the optimal threshold
====================================================

Sweeping alpha with the fair-comparison normalization lambda -> alpha*lambda
(which keeps the mean flush rate comparable across alpha) and refills allowed
from any state: small alpha means many small flushes (act early, low
threshold), large alpha means rare catastrophic ones.  The threshold x_bar
rises, peaks near alpha ~ 0.65, then collapses; past alpha ~ 0.96 acting
never pays and H sticks at 1.
"""
from sedstore.experiments import Config, run_alpha_sweep

cfg = Config(alpha=0.5, lam=0.2, mu=0.1, c=0.15, d=0.05, capital_lambda=0.25,
             m=100, alpha_min=0.05, alpha_max=0.99, alpha_count=20)
records = run_alpha_sweep(cfg)

print("  alpha     H       x_bar")
for r in records:
    bar = "-" if r.x_bar is None else f"{r.x_bar:.3f}"
    marker = " <- no threshold" if not r.has_threshold else ""
    print(f"  {r.param:.3f}  {r.h_value:.6f}  {bar}{marker}")

peak = max((r for r in records if r.x_bar is not None), key=lambda r: r.x_bar)
print(f"\nthreshold peaks at alpha = {peak.param:.3f} with x_bar = {peak.x_bar:.3f}")
