"""State-dependent utility fields and checks of their analytic properties.

A utility field assigns to each state ``s`` a utility function ``U(., s)`` on
``[0, inf)``. The solver only ever touches a field through three evaluators:
the utility ``u``, its marginal ``du`` and the inverse marginal ``inv_du``.
All three broadcast over ``c`` (or ``y``) and the state index ``s``.

Built-in families are CRRA and log, each with an optional positive per-state
scale ``a(s)`` (utility ``a(s) * U(c)``). Anything else can be plugged in via
:class:`CustomField`. Since the Inada conditions cannot be proved for a
black box, :func:`validate_field` runs grid heuristics instead.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from numpy.typing import ArrayLike, NDArray

DEFAULT_GRID = np.logspace(-9, 9, 181)

INADA_RATIO = 1e3
INVERSE_RTOL = 1e-10
DERIVATIVE_RTOL = 1e-6
MONOTONE_RTOL = 1e-12


class UtilityField:
    """Base class for per-state utility functions.

    Subclasses implement ``u``, ``du``, ``inv_du`` and ``u_at_zero``. The
    argument ``s`` is an integer state index or an integer array that
    broadcasts against ``c``; ``None`` means "state-independent" and is only
    valid for fields without per-state data.
    """

    #: number of states the field carries data for, or None if it has none
    n_states: int | None = None

    def u(self, c: ArrayLike, s: ArrayLike | None = None) -> NDArray:
        raise NotImplementedError

    def du(self, c: ArrayLike, s: ArrayLike | None = None) -> NDArray:
        raise NotImplementedError

    def inv_du(self, y: ArrayLike, s: ArrayLike | None = None) -> NDArray:
        raise NotImplementedError

    def u_at_zero(self, s: ArrayLike | None = None) -> NDArray:
        raise NotImplementedError

    def describe(self) -> dict:
        return {"family": type(self).__name__}


def _scale_array(scale: ArrayLike | None) -> NDArray | None:
    if scale is None:
        return None
    a = np.array(scale, dtype=float).reshape(-1)
    if a.size == 0 or not np.all(np.isfinite(a)) or np.any(a <= 0):
        raise ValueError("utility scale coefficients must be positive and finite")
    a.setflags(write=False)
    return a


class _ScaledFamily(UtilityField):
    def __init__(self, scale: ArrayLike | None = None):
        self.scale = _scale_array(scale)
        self.n_states = None if self.scale is None else self.scale.size

    def _a(self, s):
        if self.scale is None:
            return 1.0
        if s is None:
            raise ValueError("a state index is required for a state-dependent field")
        return self.scale[np.asarray(s)]


class CRRA(_ScaledFamily):
    """``a(s) * c**(1 - gamma) / (1 - gamma)`` for ``gamma > 0``, ``gamma != 1``."""

    def __init__(self, gamma: float, scale: ArrayLike | None = None):
        gamma = float(gamma)
        if not np.isfinite(gamma) or gamma <= 0:
            raise ValueError(f"CRRA needs gamma > 0, got {gamma}")
        if gamma == 1.0:
            raise ValueError("gamma = 1 is log utility; use LogUtility explicitly")
        super().__init__(scale)
        self.gamma = gamma

    def u(self, c, s=None):
        c = np.asarray(c, dtype=float)
        g = self.gamma
        with np.errstate(divide="ignore"):
            return self._a(s) * (np.power(c, 1.0 - g) / (1.0 - g))

    def du(self, c, s=None):
        with np.errstate(divide="ignore"):
            return self._a(s) * np.power(np.asarray(c, dtype=float), -self.gamma)

    def inv_du(self, y, s=None):
        y = np.asarray(y, dtype=float) / self._a(s)
        with np.errstate(divide="ignore"):
            return np.power(y, -1.0 / self.gamma)

    def u_at_zero(self, s=None):
        shape = np.shape(s) if s is not None else ()
        return np.full(shape, -np.inf if self.gamma > 1 else 0.0)

    def describe(self):
        d = {"family": "crra", "gamma": self.gamma}
        if self.scale is not None:
            d["scale"] = self.scale.tolist()
        return d

    def __repr__(self):
        return f"CRRA(gamma={self.gamma!r})"


class LogUtility(_ScaledFamily):
    """``a(s) * ln(c)``."""

    def u(self, c, s=None):
        with np.errstate(divide="ignore"):
            return self._a(s) * np.log(np.asarray(c, dtype=float))

    def du(self, c, s=None):
        with np.errstate(divide="ignore"):
            return self._a(s) / np.asarray(c, dtype=float)

    def inv_du(self, y, s=None):
        with np.errstate(divide="ignore"):
            return self._a(s) / np.asarray(y, dtype=float)

    def u_at_zero(self, s=None):
        return np.full(np.shape(s) if s is not None else (), -np.inf)

    def describe(self):
        d = {"family": "log"}
        if self.scale is not None:
            d["scale"] = self.scale.tolist()
        return d

    def __repr__(self):
        return "LogUtility()"


class CustomField(UtilityField):
    """A field given by user callables ``f(c, s)``.

    ``u_at_zero`` may be a callable of ``s`` or a constant.
    """

    def __init__(
        self,
        u: Callable,
        du: Callable,
        inv_du: Callable,
        u_at_zero: Callable | float,
        n_states: int | None = None,
        name: str = "custom",
    ):
        self._u, self._du, self._inv_du = u, du, inv_du
        self._u0 = u_at_zero
        self.n_states = n_states
        self.name = name

    def u(self, c, s=None):
        return np.asarray(self._u(np.asarray(c, dtype=float), s), dtype=float)

    def du(self, c, s=None):
        return np.asarray(self._du(np.asarray(c, dtype=float), s), dtype=float)

    def inv_du(self, y, s=None):
        return np.asarray(self._inv_du(np.asarray(y, dtype=float), s), dtype=float)

    def u_at_zero(self, s=None):
        if callable(self._u0):
            return np.asarray(self._u0(s), dtype=float)
        return np.full(np.shape(s) if s is not None else (), float(self._u0))

    def describe(self):
        return {"family": self.name}

    def __repr__(self):
        return f"CustomField(name={self.name!r})"


def field_from_dict(entry: dict, n_states: int | None = None) -> UtilityField:
    """Build a field from ``{"family": "crra", "gamma": g, "scale": [...]}``
    or ``{"family": "log", "scale": [...]}``."""
    family = entry.get("family")
    scale = entry.get("scale")
    if scale is not None and n_states is not None and len(scale) != n_states:
        raise ValueError(f"scale has {len(scale)} entries for {n_states} states")
    if family == "crra":
        if "gamma" not in entry:
            raise ValueError("crra utility needs a gamma")
        return CRRA(entry["gamma"], scale)
    if family == "log":
        return LogUtility(scale)
    raise ValueError(f"unknown utility family {family!r}")


def _state_indices(fld: UtilityField, n_states: int | None) -> list:
    n = n_states if n_states is not None else fld.n_states
    if n is None:
        return [None]
    return list(range(n))


def _check_grid(c_grid, min_decades=0.0):
    c = np.asarray(c_grid, dtype=float).reshape(-1)
    if c.size < 2 or np.any(c <= 0) or not np.all(np.isfinite(c)):
        raise ValueError("consumption grid must hold at least two positive finite points")
    if np.any(np.diff(c) <= 0):
        raise ValueError("consumption grid must be strictly increasing")
    if np.log10(c[-1] / c[0]) < min_decades - 1e-9:
        raise ValueError(f"consumption grid must span at least {min_decades:g} decades")
    return c


@dataclass
class StateCheck:
    """Outcome of the analytic checks for one state."""

    state: int | None
    increasing: bool
    marginal_positive: bool
    marginal_decreasing: bool
    inada_zero: bool
    inada_infinity: bool
    inverse_max_rel_error: float
    derivative_max_rel_error: float
    u_at_zero: float

    @property
    def passed(self) -> bool:
        return (
            self.increasing
            and self.marginal_positive
            and self.marginal_decreasing
            and self.inada_zero
            and self.inada_infinity
            and self.inverse_max_rel_error <= INVERSE_RTOL
            and self.derivative_max_rel_error <= DERIVATIVE_RTOL
        )

    def failures(self) -> list[str]:
        out = []
        if not self.increasing:
            out.append("utility not strictly increasing")
        if not self.marginal_positive:
            out.append("marginal utility not positive")
        if not self.marginal_decreasing:
            out.append("marginal utility not strictly decreasing")
        if not self.inada_zero:
            out.append("Inada condition at zero fails")
        if not self.inada_infinity:
            out.append("Inada condition at infinity fails")
        if not self.inverse_max_rel_error <= INVERSE_RTOL:
            out.append(f"inverse marginal error {self.inverse_max_rel_error:.3g}")
        if not self.derivative_max_rel_error <= DERIVATIVE_RTOL:
            out.append(f"marginal vs finite difference error {self.derivative_max_rel_error:.3g}")
        return out


@dataclass
class ValidationReport:
    states: list[StateCheck] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(st.passed for st in self.states)

    def failures(self) -> dict:
        return {st.state: st.failures() for st in self.states if not st.passed}


def validate_field(
    fld: UtilityField,
    c_grid: ArrayLike | None = None,
    n_states: int | None = None,
) -> ValidationReport:
    """Grid checks for monotonicity, strict concavity, Inada and consistency.

    The Inada test asks for ``du(c_min) > 1e3 * du(1)`` and
    ``du(c_max) < 1e-3 * du(1)``, so the grid must straddle 1 and span at
    least six decades. Failures are recorded in the report, not raised.
    """
    c = _check_grid(DEFAULT_GRID if c_grid is None else c_grid, min_decades=6)
    report = ValidationReport()
    for s in _state_indices(fld, n_states):
        with np.errstate(all="ignore"):
            u = fld.u(c, s)
            du = fld.du(c, s)
            du1 = float(fld.du(1.0, s))
            back = fld.inv_du(du, s)
            h = 1e-5 * c
            fd = (fld.u(c + h, s) - fld.u(c - h, s)) / (2 * h)
        inv_err = float(np.max(np.abs(back - c) / c))
        der_err = float(np.max(np.abs(du - fd) / np.abs(du)))
        report.states.append(
            StateCheck(
                state=s,
                increasing=bool(np.all(np.diff(u) > 0)),
                marginal_positive=bool(np.all(du > 0)),
                marginal_decreasing=bool(np.all(np.diff(du) < 0)),
                inada_zero=bool(du[0] > INADA_RATIO * du1),
                inada_infinity=bool(du[-1] < du1 / INADA_RATIO),
                inverse_max_rel_error=inv_err if np.isfinite(inv_err) else np.inf,
                derivative_max_rel_error=der_err if np.isfinite(der_err) else np.inf,
                u_at_zero=float(fld.u_at_zero(s)),
            )
        )
    return report


@dataclass
class ConcavityReport:
    """Per-state worst slack of ``c U'(c) <= 2 (U(c) - U(c/2))``."""

    holds: dict
    worst_slack: dict

    @property
    def passed(self) -> bool:
        return all(self.holds.values())


def concavity_bound_check(
    fld: UtilityField, c_grid: ArrayLike | None = None, n_states: int | None = None
) -> ConcavityReport:
    """Check ``c du(c) <= 2 (u(c) - u(c/2))`` on the grid for every state.

    The right-hand side gets a relative allowance of ``1e-12 |u(c)|`` for
    rounding.
    """
    c = _check_grid(DEFAULT_GRID if c_grid is None else c_grid)
    holds, slack = {}, {}
    for s in _state_indices(fld, n_states):
        lhs = c * fld.du(c, s)
        uc = fld.u(c, s)
        rhs = 2.0 * (uc - fld.u(c / 2.0, s))
        gap = rhs + 1e-12 * np.abs(uc) - lhs
        holds[s] = bool(np.all(gap >= 0))
        slack[s] = float(np.min(gap))
    return ConcavityReport(holds, slack)


def marginal_times_c_monotone(
    fld: UtilityField, c_grid: ArrayLike | None = None, n_states: int | None = None
) -> dict:
    """Whether ``c -> c du(c, s)`` is non-decreasing along the grid, per state.

    Relative decreases below 1e-12 are treated as rounding.
    """
    c = _check_grid(DEFAULT_GRID if c_grid is None else c_grid)
    out = {}
    for s in _state_indices(fld, n_states):
        v = c * fld.du(c, s)
        drops = v[:-1] - v[1:]
        out[s] = bool(np.all(drops <= MONOTONE_RTOL * np.abs(v[:-1])))
    return out
