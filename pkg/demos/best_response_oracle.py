"""Two independent roads to the same equilibrium.

The main solver characterizes equilibria through a dual vector and a
damped Newton iteration; it never optimizes anyone's utility directly.
The oracle plays the game naively instead: repeatedly give each agent
their single-agent optimal response to what the others currently hold.
When this fixed-point iteration converges, both must agree.
"""

import numpy as np

from relperf import (
    AgentSpec,
    Game,
    SinePerturbedCRRA,
    TanhBlendCRRA,
    fixed_point_iterate,
    lognormal_market,
    solve,
)

m = lognormal_market(0.3, 1.0, 32)
game = Game(
    (
        AgentSpec(SinePerturbedCRRA(2.0, 0.1), 0.6, x0=1.0),
        AgentSpec(TanhBlendCRRA(2.5, 0.4), 0.3, x0=2.0),
        AgentSpec(SinePerturbedCRRA(1.5, 0.05), 0.5, x0=0.5),
    )
)

profile = solve(game, m)
print("Newton solver: %d iterations, foc residual %.2e"
      % (profile.newton_iters, profile.foc_residual))

start = np.ones((m.atom_count, game.n))  # deliberately uninformed start
iterated, converged, history = fixed_point_iterate(game, m, game.x0, start)

print("best-response iteration: converged=%s after %d rounds" % (converged, len(history)))
print("per-round sup-norm changes:")
for k, change in enumerate(history, 1):
    print("  round %2d: %.3e" % (k, change))

print()
print("sup-norm disagreement between the two methods: %.3e"
      % np.abs(iterated - profile.wealth).max())
