"""
When is the equilibrium unique?
===============================

If c U'(c) is non-decreasing for all agents but at most one, the equilibrium
is unique. Two agents with strong curvature and opposite state preferences
break the condition, and here the economy has three equilibria.
"""

import numpy as np

from negishi import CRRA, Economy, LogUtility, StateSpace, excess_utility, probe_multiplicity
from negishi.cli import check_report

space = StateSpace(["s1", "s2"], [0.5, 0.5])
init = [[0.95, 0.05], [0.05, 0.95]]

calm = Economy(space, [CRRA(5.0, [0.97, 0.03]), LogUtility([0.03, 0.97])], init, agents=["A", "B"])
wild = Economy(space, [CRRA(5.0, [0.97, 0.03]), CRRA(5.0, [0.03, 0.97])], init, agents=["A", "B"])

for name, econ in (("one violator", calm), ("two violators", wild)):
    print(f"--- {name}")
    print(check_report(econ).split("integrability")[0].rstrip())
    result = probe_multiplicity(econ, n_starts=16, scan_n=2000)
    for root in result.roots:
        print(f"  equilibrium weights {np.round(root.w, 6)}  residual {root.residual:.1e}")

# The excess utility of agent A along the simplex crosses zero three times.
ts = np.linspace(0.005, 0.995, 12)
h1 = [excess_utility([t, 1 - t], wild)[0] for t in ts]
print("h_A along w_A:", " ".join(f"{x:+.3f}" for x in h1))
