"""
Splitting a state's consumption among agents
============================================

Given planner weights, each state's endowment is divided so that weighted
marginal utilities agree. The common value is the multiplier U_c.
"""

import numpy as np

from negishi import CRRA, LogUtility, split_state

# Two log agents: shares are proportional to the weights, U_c = 1 / c.
res = split_state([0.4, 0.6], 10.0, 0, [LogUtility(), LogUtility()])
print("log agents     shares", res.shares, " U_c", res.lam)

# A cautious and a bold agent. Raising the bold agent's weight moves
# consumption toward them; weighted marginals stay equal.
fields = [CRRA(4.0), CRRA(0.5)]
for w_bold in (0.2, 0.5, 0.8):
    w = np.array([1 - w_bold, w_bold])
    res = split_state(w, 3.0, 0, fields)
    marg = [w[m] * float(fields[m].du(res.shares[m])) for m in range(2)]
    print(f"bold weight {w_bold:.1f}  shares {np.round(res.shares, 4)}  weighted marginals {np.round(marg, 6)}")

# Scaling every weight by the same factor changes nothing but the multiplier.
a = split_state([0.3, 0.7], 3.0, 0, fields)
b = split_state([3.0, 7.0], 3.0, 0, fields)
print("scaled weights: same shares", np.allclose(a.shares, b.shares), " U_c ratio", b.lam / a.lam)
