"""
Monte Carlo validation of the effective Hamiltonian
===================================================

H is defined as the best achievable long-run average cost, so it can be
checked without any PDE machinery: simulate the storage process under the
closed-form policy (refill to full when depleted) and time-average the cost.
The infinitely many small flushes are handled by sampling exact subordinator
increments per step.  A do-nothing policy drives the state to 0 and keeps it
there, so its average cost climbs to the depletion rate 1.
"""
from sedstore import levy
from sedstore.exact import ActionSet, ControlParams, solve_exact
from sedstore.paths import PathConfig, exact_policy_fn, null_policy, simulate

params = ControlParams(c=0.15, d=0.05, mu=0.1, capital_lambda=0.25,
                       action_set=ActionSet.XI2)
model = levy.stable_model(alpha=0.5, lam=0.2)
sol = solve_exact(model, params)
print(f"closed-form H = {sol.h_hat:.6f}")

# 64 paths over T = 500 keep this demo quick; the acceptance suite runs
# T = 2e4 with 200 paths for a 3-standard-error verdict.
cfg = PathConfig(horizon=500.0, x0=1.0, n_paths=64, master_seed=42, dt=0.01)
stats = simulate(params, model, exact_policy_fn(sol.kappa, params), cfg)
z = (stats.ergodic_cost_mean - sol.h_hat) / stats.ergodic_cost_stderr
print(f"\nexact policy : cost = {stats.ergodic_cost_mean:.6f} "
      f"+- {stats.ergodic_cost_stderr:.6f}  (z = {z:+.2f})")
print(f"               occupation at 0 = {stats.occupation_zero_fraction:.4f}, "
      f"refills/time = {stats.replenish_count_rate:.4f}")

null_stats = simulate(params, model, null_policy, cfg)
print(f"null policy  : cost = {null_stats.ergodic_cost_mean:.6f} "
      f"(occupation at 0 = {null_stats.occupation_zero_fraction:.4f})")

# Event-level view of a single path: drift decay, jump hits, observations.
_, rows = simulate(params, model, exact_policy_fn(sol.kappa, params),
                   PathConfig(horizon=3.0, x0=0.2, n_paths=1, master_seed=7,
                              dt=0.05), record_path=True)
print("\nfirst events of one path (t, x, event, cost):")
for t, x, event, cost in rows[:12]:
    print(f"  {t:6.3f}  {x:.4f}  {event:<8s}  {cost:.4f}")
