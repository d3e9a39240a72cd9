"""Finite weighted state spaces and expectations over them.

A :class:`StateSpace` is a finite discretisation of a measure space: an
ordered list of state identifiers with strictly positive weights. Weights
are measure units, so they need not sum to one.

State functions are plain float arrays aligned with a state space. They may
hold ``-inf`` (for instance a utility evaluated at zero consumption) but
never ``+inf`` or ``nan``.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np
from numpy.typing import ArrayLike, NDArray

StateFunction = NDArray[np.float64]


class AlignmentError(ValueError):
    """A state-indexed array does not match the state space it is used with."""


class StateSpace:
    """Ordered finite states with positive weights ``mu(s)``.

    Immutable: the weight array is flagged read-only.
    """

    __slots__ = ("states", "weights")

    states: tuple[str, ...]
    weights: NDArray[np.float64]

    def __init__(self, states: Sequence[str], weights: ArrayLike):
        states = tuple(str(s) for s in states)
        weights = np.array(weights, dtype=float).reshape(-1)
        if len(states) == 0:
            raise ValueError("a state space needs at least one state")
        if len(set(states)) != len(states):
            raise ValueError("state identifiers must be unique")
        if weights.shape != (len(states),):
            raise AlignmentError(
                f"{len(states)} states but {weights.size} weights"
            )
        if not np.all(np.isfinite(weights)) or np.any(weights <= 0):
            raise ValueError("state weights must be strictly positive and finite")
        weights.setflags(write=False)
        object.__setattr__(self, "states", states)
        object.__setattr__(self, "weights", weights)

    def __setattr__(self, name, value):
        raise AttributeError("StateSpace is immutable")

    def __repr__(self) -> str:
        return f"StateSpace(states={list(self.states)!r}, weights={self.weights.tolist()!r})"

    def __len__(self) -> int:
        return len(self.states)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, StateSpace):
            return NotImplemented
        return self.states == other.states and np.array_equal(
            self.weights, other.weights
        )

    def __hash__(self) -> int:
        return hash((self.states, self.weights.tobytes()))

    @property
    def total_mass(self) -> float:
        return float(np.sum(self.weights))

    @classmethod
    def uniform(cls, n: int, weight: float = 1.0) -> StateSpace:
        return cls([f"s{i}" for i in range(n)], np.full(n, float(weight)))

    def index(self, state: str) -> int:
        return self.states.index(state)

    def scaled(self, factor: float) -> StateSpace:
        """Same states with every weight multiplied by ``factor``."""
        return StateSpace(self.states, self.weights * factor)


def state_function(values: ArrayLike, space: StateSpace) -> StateFunction:
    """Validate ``values`` as a state function on ``space``.

    Returns a read-only float copy. Raises :class:`AlignmentError` on a
    length mismatch and ``ValueError`` on ``+inf`` or ``nan`` entries.
    """
    arr = np.array(values, dtype=float).reshape(-1)
    if arr.shape != (len(space),):
        raise AlignmentError(
            f"state function has {arr.size} values, state space has {len(space)}"
        )
    if np.any(np.isnan(arr)) or np.any(arr == np.inf):
        raise ValueError("state functions take values in [-inf, inf)")
    arr.setflags(write=False)
    return arr


def expectation(f: ArrayLike, space: StateSpace) -> float:
    """``E[f] = sum_s f(s) mu(s)``, equal to ``-inf`` if any value is ``-inf``.

    States are always summed in their stored order, so the result is
    bit-for-bit reproducible.
    """
    arr = np.asarray(f, dtype=float)
    if arr.shape != (len(space),):
        raise AlignmentError(
            f"state function has shape {arr.shape}, expected ({len(space)},)"
        )
    if np.any(arr == -np.inf):
        return -np.inf
    if np.any(np.isnan(arr)) or np.any(arr == np.inf):
        raise ValueError("state functions take values in [-inf, inf)")
    return float(np.dot(arr, space.weights))


def product_discretize(
    probabilities: Sequence[float], time_grid: Sequence[float]
) -> StateSpace:
    """State space over (scenario, time) pairs with weight ``P[omega_i] * dt_j``.

    Time cells use left endpoints: the cell starting at ``t_j`` has length
    ``t_{j+1} - t_j``, so a grid of ``n`` points yields ``n - 1`` cells per
    scenario. States are ordered scenario-major.
    """
    p = np.asarray(probabilities, dtype=float).reshape(-1)
    t = np.asarray(time_grid, dtype=float).reshape(-1)
    if p.size == 0 or np.any(p <= 0) or not np.all(np.isfinite(p)):
        raise ValueError("probabilities must be positive and finite")
    if abs(p.sum() - 1.0) > 1e-12:
        raise ValueError(f"probabilities sum to {p.sum()!r}, not 1")
    if t.size < 2 or not np.all(np.isfinite(t)):
        raise ValueError("time grid needs at least two finite points")
    dt = np.diff(t)
    if np.any(dt <= 0):
        raise ValueError("time grid must be strictly increasing")
    weights = np.outer(p, dt).reshape(-1)
    states = [f"w{i}_t{j}" for i in range(p.size) for j in range(dt.size)]
    return StateSpace(states, weights)
