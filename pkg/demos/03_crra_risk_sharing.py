"""
Risk sharing with a common CRRA coefficient
===========================================

When all agents share the same power utility, each consumes a fixed fraction
of the aggregate endowment in every state. The fractions follow from the
budget constraints at prices proportional to Lambda^-gamma, and the
numerical solver should land on them.
"""

import numpy as np

from negishi import CRRA, Economy, StateSpace, solve

gamma = 4.0
space = StateSpace(["boom", "normal", "slump", "crash"], [0.1, 0.4, 0.3, 0.2])
endow = np.array([
    [3.0, 0.5, 0.0, 1.0],
    [0.2, 1.5, 0.7, 0.1],
    [0.0, 0.0, 2.0, 0.4],
])
econ = Economy(space, [CRRA(gamma)] * 3, endow, agents=["A", "B", "C"])
cert = solve(econ)

total = econ.endowment
mu = space.weights
theta = (endow * total ** -gamma) @ mu / (total ** (1 - gamma) @ mu)
print("consumption fractions, solver  ", np.round(cert.allocation[:, 0] / total[0], 10))
print("consumption fractions, formula ", np.round(theta, 10))
print("weights, solver ", cert.w)
print("weights, formula", theta ** gamma / np.sum(theta ** gamma))
print("solver stages:", [name for name, _ in cert.trace][:6], "...")

# Doubling every endowment doubles every allocation and keeps the weights.
richer = solve(econ.scaled_endowments(2.0))
print("weights unchanged after doubling endowments:", np.allclose(richer.w, cert.w, atol=1e-10))
