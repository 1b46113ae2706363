"""
Ambiguity aversion: distrusting the observation clock
=====================================================

The robust variant lets an adversary thin the Poisson observation intensity
at an entropic price 1/gamma.  As gamma grows the decision-maker plans for
fewer chances to act: the guaranteed cost H rises toward 1 and the threshold
x_bar climbs (act whenever you can at ever-higher storage).  The worst-case
thinning a*(x) is deepest just below the threshold, where missing an
observation hurts most, and exactly 1 wherever acting is pointless anyway.
"""
from sedstore import levy
from sedstore.discretize import Grid, build
from sedstore.exact import ActionSet, ControlParams
from sedstore.robust import RobustTermParams, solve_robust
from sedstore.sweep import extract_threshold, solve

params = ControlParams(c=0.15, d=0.05, mu=0.1, capital_lambda=0.25,
                       action_set=ActionSet.XI1)
model = levy.stable_model(alpha=0.5, lam=0.2)
grid = Grid(100)
system = build(grid, params, model)

neutral = solve(system)
print(f"neutral:      H = {neutral.h_value:.6f}, "
      f"x_bar = {extract_threshold(neutral, grid):.3f}")

for gamma in (0.1, 1.0, 10.0):
    out = solve_robust(system, RobustTermParams(gamma, params.capital_lambda))
    x_bar = extract_threshold(out, grid)
    print(f"gamma = {gamma:5.1f}: H = {out.h_value:.6f}, x_bar = {x_bar:.3f}, "
          f"min a* = {out.a_star.min():.3e}")

# a* profile around the threshold for strong ambiguity aversion
gamma = 10.0
out = solve_robust(system, RobustTermParams(gamma, params.capital_lambda))
x_bar = extract_threshold(out, grid)
j = int(round(x_bar * grid.m))
print(f"\ngamma = {gamma}: a* near the threshold x_bar = {x_bar:.3f}")
for i in range(max(j - 3, 0), min(j + 4, grid.m + 1)):
    side = "below" if grid.nodes[i] <= x_bar else "above"
    print(f"  x = {grid.nodes[i]:.2f}  a* = {out.a_star[i]:.6f}  ({side})")
