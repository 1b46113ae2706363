"""
Closed-form solution of the ergodic storage problem
===================================================

For the pure stable model with refills allowed only at the depleted state,
the long-run average cost H and the potential Phi have closed forms built
from a single constant kappa (the expected discounted depletion shortfall).
This demo evaluates them at the standard study parameters and shows the
act-vs-wait boundary c + d = kappa.
"""
import numpy as np

from sedstore import levy
from sedstore.exact import ActionSet, ControlParams, exact_potential, solve_exact

params = ControlParams(c=0.15, d=0.05, mu=0.1, capital_lambda=0.25,
                       action_set=ActionSet.XI2)
model = levy.stable_model(alpha=0.5, lam=0.2)

sol = solve_exact(model, params)
print(f"alpha = {sol.alpha}, lambda = {model.lam}, mu = {params.mu}")
print(f"kappa = {sol.kappa:.9f}   (closed form 1/(mu*alpha + lambda*pi) here)")
print(f"H     = {sol.h_hat:.9f}")
print(f"acting pays: c + d = {params.c + params.d} <= kappa -> "
      f"{params.c + params.d <= sol.kappa}")

# The potential is a pure power, Phi(x) = -kappa * H * x^alpha: steepest near
# the depleted state, where one more unit of storage buys the most time.
xs = np.linspace(0.0, 1.0, 6)
print("\n   x      Phi(x)")
for x, p in zip(xs, exact_potential(xs, sol)):
    print(f"  {x:.1f}  {p:+.6f}")

# Raising the intervention cost past kappa makes waiting optimal everywhere
# and pins H at the pure depletion rate 1.
pricey = ControlParams(c=1.2, d=0.4, mu=0.1, capital_lambda=0.25,
                       action_set=ActionSet.XI2)
print(f"\nwith c + d = {pricey.c + pricey.d} > kappa: "
      f"H = {solve_exact(model, pricey).h_hat}")
