"""Smallest nontrivial equilibrium, worked end to end.

Two CRRA(2) agents who each fully care about outperforming the other
(lambda = 1), in a market with two equally likely states and state-price
density z = (1/2, 3/2).  Everything here can be checked with pen and
paper: the equilibrium wealths are X^i = (2, 2/3) for both agents.
"""

import numpy as np

from relperf import AgentSpec, CRRA, Game, Market, crra_closed_form, solve, verify

m = Market(p=[0.5, 0.5], z=[0.5, 1.5])
game = Game((AgentSpec(CRRA(2.0), 1.0), AgentSpec(CRRA(2.0), 1.0)))

closed = crra_closed_form(game, m)
numeric = solve(game, m)

print("closed form wealths (rows = states, cols = agents):")
print(closed.wealth)
print("numerical solve:")
print(numeric.wealth)
print("difference: %.3g" % np.abs(closed.wealth - numeric.wealth).max())
print()
print("dual vector D = ln C:", numeric.dual)
print("Newton iterations:", numeric.newton_iters)

foc, budget = verify(game, m, None, numeric.wealth)
print("first-order residual %.3g, budget residual %.3g" % (foc, budget))

# the hand-derived answer
print()
print("expected X = (2, 2/3) in both columns:",
      np.allclose(numeric.wealth, [[2.0, 2.0], [2 / 3, 2 / 3]], atol=1e-10))
