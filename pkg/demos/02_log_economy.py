"""
A two-state log economy solved end to end
=========================================

Agent A owns the first state, agent B the second. With log utility the
equilibrium weight of each agent is the average, across states, of the
fraction of the endowment they own.
"""

import numpy as np

from negishi import Economy, LogUtility, StateSpace, excess_value, fixed_point_map, solve, verify

space = StateSpace(["s1", "s2"], [1.0, 1.0])
econ = Economy(space, [LogUtility(), LogUtility()], [[2.0, 0.0], [0.0, 4.0]], agents=["A", "B"])

# Away from equilibrium agent A's plan is too expensive for B and too cheap for A.
w = np.array([0.25, 0.75])
print("excess values at", w, "->", excess_value(w, econ))
print("one fixed-point step ->", fixed_point_map(w, econ))

cert = solve(econ)
print("weights   ", cert.w)
print("allocation\n", cert.allocation)
print("state prices", cert.zeta)

closed_form = (econ.initial / econ.endowment) @ space.weights / space.total_mass
print("closed form weights", closed_form)

for check in verify(cert, econ).checks:
    print(f"  {check.name:<20s} {'ok' if check.passed else 'FAIL'}  {check.magnitude:.2e}")
