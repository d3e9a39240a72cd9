"""Weighted social planner splits and the Pareto map ``w -> pi(w, Lambda)``.

For weights ``w`` and consumption ``c`` the planner maximises
``sum_m w^m U_m(c^m)`` over splits of ``c``. At the optimum every active
agent's weighted marginal utility equals a common multiplier ``lam``
(the derivative of the aggregate utility in ``c``), so

    c = sum_{m: w^m > 0} inv_du_m(lam / w^m)

which is strictly decreasing in ``lam``. We solve it per state by geometric
bracketing, then shrink the bracket in ``log lam`` with Illinois false
position steps (falling back to bisection when a step does not halve the
bracket) until its relative width is below 1e-13. No derivative of the field
is needed and the root stays bracketed throughout.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .economy import Economy, check_allocation
from .utility import UtilityField

BRACKET_RTOL = 1e-13
MAX_DOUBLINGS = 200
MAX_REFINE = 400


class NumericalFailure(ArithmeticError):
    """The multiplier root could not be bracketed or evaluated."""

    def __init__(self, message: str, state: int | str | None = None):
        super().__init__(message if state is None else f"state {state}: {message}")
        self.state = state


class AggregateSplit(NamedTuple):
    lam: float | None
    shares: NDArray


def as_weights(w: ArrayLike, n_agents: int | None = None) -> NDArray:
    """Validate a weight vector in the non-negative orthant minus the origin."""
    arr = np.array(w, dtype=float).reshape(-1)
    if n_agents is not None and arr.size != n_agents:
        raise ValueError(f"expected {n_agents} weights, got {arr.size}")
    if not np.all(np.isfinite(arr)) or np.any(arr < 0):
        raise ValueError("weights must be finite and non-negative")
    if not np.any(arr > 0):
        raise ValueError("at least one weight must be positive")
    return arr


def to_simplex(w: ArrayLike) -> NDArray:
    w = as_weights(w)
    return w / w.sum()


def _total(fields, w, active, lam, s_idx):
    tot = np.zeros_like(lam)
    for m in active:
        tot += fields[m].inv_du(lam / w[m], s_idx)
    return tot


def _refine(fields, w, active, sp, cp, lo, hi):
    """Shrink ``[lo, hi]`` around the multiplier root, all states at once.

    Works on ``x = log lam`` and ``F(x) = log total(e^x) - log c``, which is
    decreasing and close to linear for power-type utilities.
    """
    a, b = np.log(lo), np.log(hi)
    fa = np.log(_total(fields, w, active, lo, sp)) - np.log(cp)
    fb = np.log(_total(fields, w, active, hi, sp)) - np.log(cp)
    tol = np.log1p(BRACKET_RTOL)
    prev_width = b - a
    side = np.zeros(a.shape, dtype=int)
    for it in range(MAX_REFINE):
        width = b - a
        open_ = width > tol
        if not np.any(open_):
            break
        denom = fa - fb
        x = np.where(denom > 0, a + fa * width / np.where(denom > 0, denom, 1.0), 0.5 * (a + b))
        # bisect when the secant point is not strictly inside, or progress is slow
        slow = width > 0.5 * prev_width
        bisect = ~((x > a) & (x < b)) | (slow & (it % 2 == 1))
        x = np.where(bisect, 0.5 * (a + b), x)
        prev_width = np.where(it % 2 == 1, width, prev_width)
        fx = np.log(_total(fields, w, active, np.exp(x), sp)) - np.log(cp)
        right = open_ & (fx > 0)  # root lies above x
        left = open_ & (fx < 0)
        hit = open_ & (fx == 0)
        a = np.where(right | hit, x, a)
        b = np.where(left | hit, x, b)
        # Illinois: halve the stale endpoint value when the same side moves twice
        fa_new = np.where(right | hit, fx, np.where(left & (side == -1), 0.5 * fa, fa))
        fb_new = np.where(left | hit, fx, np.where(right & (side == 1), 0.5 * fb, fb))
        fa, fb = fa_new, fb_new
        side = np.where(right, 1, np.where(left, -1, side))
    return np.exp(0.5 * (a + b))


def split_states(
    w: NDArray, c: NDArray, fields: Sequence[UtilityField], s_idx: NDArray
) -> tuple[NDArray, NDArray]:
    """Vectorised planner split over several states.

    ``c`` and ``s_idx`` are aligned arrays (consumption, state index). Returns
    ``(lam, shares)`` with ``lam`` NaN where ``c == 0`` and ``shares`` of
    shape ``(M, len(c))``.
    """
    w = as_weights(w, len(fields))
    c = np.asarray(c, dtype=float).reshape(-1)
    s_idx = np.asarray(s_idx).reshape(-1)
    if np.any(c < 0) or not np.all(np.isfinite(c)):
        raise ValueError("consumption must be finite and non-negative")
    n_agents = len(fields)
    shares = np.zeros((n_agents, c.size))
    lam = np.full(c.size, np.nan)
    active = np.flatnonzero(w > 0)
    pos = c > 0
    if not np.any(pos):
        return lam, shares
    cp, sp = c[pos], s_idx[pos]

    if active.size == 1:
        (m,) = active
        lam[pos] = w[m] * fields[m].du(cp, sp)
        shares[m, pos] = cp
        return lam, shares

    with np.errstate(all="ignore"):
        lam0 = np.mean(
            [w[m] * fields[m].du(cp / active.size, sp) for m in active], axis=0
        )
        bad = ~(np.isfinite(lam0) & (lam0 > 0))
        if np.any(bad):
            raise NumericalFailure(
                "equal-split marginal utility is not positive and finite",
                int(sp[np.argmax(bad)]),
            )
        excess = _total(fields, w, active, lam0, sp) - cp
        lo, hi = lam0.copy(), lam0.copy()
        need_up = excess > 0
        need_down = excess < 0
        for _ in range(MAX_DOUBLINGS):
            if not (np.any(need_up) or np.any(need_down)):
                break
            lo[need_up] = hi[need_up]
            hi[need_up] *= 2.0
            hi[need_down] = lo[need_down]
            lo[need_down] *= 0.5
            t = _total(fields, w, active, np.where(need_up, hi, lo), sp)
            need_up &= ~(t <= cp)
            need_down &= ~(t >= cp)
        else:
            if np.any(need_up) or np.any(need_down):
                stuck = need_up | need_down
                raise NumericalFailure(
                    f"multiplier not bracketed after {MAX_DOUBLINGS} doublings; "
                    "the utility field may violate the Inada conditions",
                    int(sp[np.argmax(stuck)]),
                )
        if not (np.all(np.isfinite(lo)) and np.all(np.isfinite(hi)) and np.all(lo > 0)):
            raise NumericalFailure("multiplier bracket left the floating point range")

        root = _refine(fields, w, active, sp, cp, lo, hi)
        raw = np.array([fields[m].inv_du(root / w[m], sp) for m in active])
    if not np.all(np.isfinite(raw)) or np.any(raw < 0):
        raise NumericalFailure("inverse marginal utility returned invalid shares")
    # one proportional correction so that the shares exhaust c
    raw *= cp / raw.sum(axis=0)
    lam[pos] = root
    shares[np.ix_(active, np.flatnonzero(pos))] = raw
    return lam, shares


def split_state(
    w: ArrayLike, c: float, state: int, fields: Sequence[UtilityField]
) -> AggregateSplit:
    """Planner split of ``c`` in one state (``state`` is the state index).

    Returns ``lam=None`` when ``c == 0``; every share is then zero.
    """
    if c < 0:
        raise ValueError("consumption must be non-negative")
    lam, shares = split_states(w, np.array([c]), fields, np.array([state]))
    return AggregateSplit(None if np.isnan(lam[0]) else float(lam[0]), shares[:, 0])


def pareto_allocation(w: ArrayLike, economy: Economy) -> tuple[NDArray, NDArray]:
    """Pareto allocation ``pi(w, Lambda)`` and multiplier ``U_c(w, Lambda)``.

    Returns ``(alloc, lam)``, ``alloc`` of shape ``(M, S)``.
    """
    w = as_weights(w, economy.n_agents)
    lam, alloc = split_states(
        w, economy.endowment, economy.fields, np.arange(economy.n_states)
    )
    return alloc, lam


def weighted_utility(w: ArrayLike, alloc: ArrayLike, economy: Economy) -> NDArray:
    """Per-state ``sum_m w^m U_m(alloc^m)`` with zero-weight agents dropped."""
    w = as_weights(w, economy.n_agents)
    alloc = np.asarray(alloc, dtype=float)
    s_idx = np.arange(economy.n_states)
    total = np.zeros(economy.n_states)
    for m in np.flatnonzero(w > 0):
        with np.errstate(divide="ignore"):
            total = total + w[m] * economy.fields[m].u(alloc[m], s_idx)
    return total


def aggregate_utility_value(w: ArrayLike, economy: Economy) -> float:
    """``E[U(w, Lambda)]``: the planner's optimal expected weighted utility.

    Agents with zero weight contribute nothing, even if ``U_m(0) = -inf``.
    """
    alloc, _ = pareto_allocation(w, economy)
    return economy.expect(weighted_utility(w, alloc, economy))


def expected_utilities(alloc: ArrayLike, economy: Economy) -> NDArray:
    """``E[U_m(alloc^m)]`` for each agent."""
    alloc = np.asarray(alloc, dtype=float)
    s_idx = np.arange(economy.n_states)
    with np.errstate(divide="ignore"):
        return np.array(
            [economy.expect(f.u(alloc[m], s_idx)) for m, f in enumerate(economy.fields)]
        )


@dataclass
class DominanceVerdict:
    dominated: bool
    dominating: NDArray | None = None
    gains: NDArray | None = None


def dominance_oracle(
    candidate: ArrayLike, economy: Economy, grid_n: int, tol: float = 1e-12
) -> DominanceVerdict:
    """Brute-force search for a grid allocation dominating ``candidate``.

    Two agents only, at most four states. Agent 1 receives ``k_s / grid_n``
    of the endowment in state ``s`` for every ``k`` in ``{0..grid_n}^S``.
    An allocation dominates when no agent loses and some agent gains more
    than ``tol * max(1, |E U|)``. The returned allocation is the one with the
    largest such gain.
    """
    if economy.n_agents != 2:
        raise ValueError("the dominance oracle handles two agents only")
    if economy.n_states > 4:
        raise ValueError("the dominance oracle handles at most four states")
    if grid_n < 1:
        raise ValueError("grid_n must be positive")
    cand = check_allocation(candidate, economy.endowment)
    base = expected_utilities(cand, economy)
    if not np.all(np.isfinite(base)):
        raise ValueError("candidate utilities must be finite")
    lam = economy.endowment
    mu = economy.space.weights
    s_idx = np.arange(economy.n_states)
    frac = np.arange(grid_n + 1) / grid_n
    # per-state expected-utility contributions on the share grid, shape (S, n+1)
    take1 = np.outer(lam, frac)
    take2 = np.outer(lam, frac[::-1])
    with np.errstate(divide="ignore", invalid="ignore"):
        u1 = mu[:, None] * economy.fields[0].u(take1, s_idx[:, None])
        u2 = mu[:, None] * economy.fields[1].u(take2, s_idx[:, None])
    thresh = tol * np.maximum(1.0, np.abs(base))

    best_gain, best_k = 0.0, None
    n_states = economy.n_states
    # enumerate all but the last state by broadcasting, loop over the last one
    e1 = np.zeros(())
    e2 = np.zeros(())
    for s in range(n_states - 1):
        e1 = np.add.outer(e1, u1[s])
        e2 = np.add.outer(e2, u2[s])
    for k_last in range(grid_n + 1):
        t1 = e1 + u1[-1, k_last]
        t2 = e2 + u2[-1, k_last]
        d1 = t1 - base[0]
        d2 = t2 - base[1]
        with np.errstate(invalid="ignore"):
            ok = (d1 >= 0) & (d2 >= 0) & ((d1 > thresh[0]) | (d2 > thresh[1]))
        if np.any(ok):
            gain = np.where(ok, np.maximum(d1 / thresh[0], d2 / thresh[1]), -np.inf)
            idx = np.unravel_index(int(np.argmax(gain)), np.shape(gain))
            g = float(np.asarray(gain)[idx])
            if g > best_gain:
                best_gain, best_k = g, tuple(int(i) for i in idx) + (k_last,)
    if best_k is None:
        return DominanceVerdict(False)
    beta1 = lam * frac[list(best_k)]
    beta = np.vstack([beta1, lam - beta1])
    return DominanceVerdict(True, beta, expected_utilities(beta, economy) - base)

