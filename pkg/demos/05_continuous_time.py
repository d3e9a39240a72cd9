"""
A continuous-time economy on a product grid
===========================================

Consumption streams over scenarios and time become functions on the product
of a probability space with Lebesgue measure on time. Discretizing with
left-endpoint cells gives a finite state space whose weights sum to the
horizon, not to one. The equilibrium machinery does not care.
"""

import numpy as np

from negishi import CRRA, Economy, LogUtility, product_discretize, solve, verify

probs = [0.3, 0.7]
grid = np.linspace(0.0, 2.0, 9)
space = product_discretize(probs, grid)
print(len(space), "states, total mass", space.total_mass)

t = np.tile(grid[:-1], len(probs))
scenario = np.repeat(np.arange(len(probs)), len(grid) - 1)
growth = np.where(scenario == 0, 0.05, -0.02)

# a salaried worker with a flat income and an investor owning a growing asset
salary = np.full(len(space), 1.0)
dividend = 0.5 * np.exp(growth * t * 10)
econ = Economy(space, [CRRA(3.0), LogUtility()], [salary, dividend], agents=["worker", "investor"])

cert = solve(econ)
print("weights", cert.w)
share = cert.allocation[0] / econ.endowment
for i, p in enumerate(probs):
    cells = scenario == i
    print(f"scenario {i} (P={p}): worker's consumption share", np.round(share[cells], 3))
print("verified:", verify(cert, econ).passed)
