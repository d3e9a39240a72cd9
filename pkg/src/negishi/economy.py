"""The exchange economy: states, agents' utilities and endowments."""

from __future__ import annotations

from typing import Sequence

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .measure import AlignmentError, StateSpace, expectation
from .utility import UtilityField

CLEARING_RTOL = 1e-12


class EconomyError(ValueError):
    """The economy's primitives violate a standing requirement."""


def check_allocation(
    alloc: ArrayLike, endowment: ArrayLike, rtol: float = CLEARING_RTOL
) -> NDArray:
    """Validate an ``(M, S)`` allocation of ``endowment``; return it as floats.

    Every entry must be finite and non-negative and each column must sum to
    the endowment of that state to ``rtol``.
    """
    a = np.asarray(alloc, dtype=float)
    lam = np.asarray(endowment, dtype=float)
    if a.ndim != 2 or a.shape[1] != lam.size:
        raise AlignmentError(f"allocation of shape {a.shape} for {lam.size} states")
    if not np.all(np.isfinite(a)) or np.any(a < 0):
        raise EconomyError("allocations must be finite and non-negative")
    gap = np.abs(a.sum(axis=0) - lam)
    if np.any(gap > rtol * np.abs(lam)):
        s = int(np.argmax(gap))
        raise EconomyError(
            f"allocation does not clear state {s}: sum {a[:, s].sum()!r} vs {lam[s]!r}"
        )
    return a


class Economy:
    """Finite-state exchange economy.

    Parameters
    ----------
    space
        State space with weights ``mu``.
    fields
        One :class:`UtilityField` per agent.
    initial
        ``(M, S)`` initial allocation; each row must be non-zero.
    endowment
        Total endowment per state. Defaults to the column sums of
        ``initial``; if given it must match them to 1e-12 relative.
    agents
        Optional agent names (default ``a0, a1, ...``).
    """

    def __init__(
        self,
        space: StateSpace,
        fields: Sequence[UtilityField],
        initial: ArrayLike,
        endowment: ArrayLike | None = None,
        agents: Sequence[str] | None = None,
    ):
        fields = tuple(fields)
        init = np.array(initial, dtype=float, ndmin=2)
        n_agents, n_states = len(fields), len(space)
        if n_agents == 0:
            raise EconomyError("an economy needs at least one agent")
        if init.shape != (n_agents, n_states):
            raise AlignmentError(
                f"initial allocation has shape {init.shape}, expected {(n_agents, n_states)}"
            )
        for m, fld in enumerate(fields):
            if fld.n_states is not None and fld.n_states != n_states:
                raise AlignmentError(
                    f"utility of agent {m} carries {fld.n_states} states, economy has {n_states}"
                )
        if not np.all(np.isfinite(init)) or np.any(init < 0):
            raise EconomyError("initial endowments must be finite and non-negative")
        if endowment is None:
            lam = init.sum(axis=0)
        else:
            lam = np.array(endowment, dtype=float).reshape(-1)
            if lam.size != n_states:
                raise AlignmentError(f"endowment has {lam.size} entries for {n_states} states")
        if not np.all(np.isfinite(lam)) or np.any(lam <= 0):
            bad = [space.states[i] for i in np.flatnonzero(~(lam > 0))]
            raise EconomyError(f"total endowment must be strictly positive in every state; fails in {bad}")
        for m in range(n_agents):
            if not np.any(init[m] > 0):
                raise EconomyError(
                    f"agent {m} has a zero initial endowment; every agent needs alpha_0 != 0"
                )
        check_allocation(init, lam)
        if agents is None:
            agents = [f"a{m}" for m in range(n_agents)]
        agents = tuple(str(a) for a in agents)
        if len(agents) != n_agents or len(set(agents)) != n_agents:
            raise EconomyError("agent names must be unique, one per utility field")
        init.setflags(write=False)
        lam.setflags(write=False)
        self.space = space
        self.fields = fields
        self.initial = init
        self.endowment = lam
        self.agents = agents

    @property
    def n_agents(self) -> int:
        return len(self.fields)

    @property
    def n_states(self) -> int:
        return len(self.space)

    def expect(self, f: ArrayLike) -> float:
        return expectation(f, self.space)

    def with_space(self, space: StateSpace) -> Economy:
        return Economy(space, self.fields, self.initial, self.endowment, self.agents)

    def scaled_endowments(self, k: float) -> Economy:
        return Economy(self.space, self.fields, self.initial * k, None, self.agents)

    def __repr__(self) -> str:
        return f"Economy(agents={list(self.agents)}, states={list(self.space.states)})"
