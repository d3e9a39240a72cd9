"""Equilibria as zeros of the excess value map on the weight simplex.

For planner weights ``w`` on the simplex, the Pareto allocation
``pi(w, Lambda)`` priced by the multiplier ``lam = U_c(w, Lambda)`` leaves
agent ``m`` with the budget imbalance

    f_m(w) = E[lam * (pi^m(w, Lambda) - alpha_0^m)].

An interior ``w`` with ``f(w) = 0`` gives an equilibrium with state price
density ``zeta = z * lam`` (any ``z > 0``) and allocation ``pi(w, Lambda)``,
and every equilibrium arises this way. The excess values always sum to zero
and ``f_m < 0`` wherever ``w^m = 0``, which is what makes a zero exist.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.stats import qmc

from .economy import Economy
from .measure import AlignmentError
from .pareto import NumericalFailure, as_weights, pareto_allocation, to_simplex
from .utility import DEFAULT_GRID, marginal_times_c_monotone

log = logging.getLogger(__name__)

OVERFLOW_LOG10 = 250.0
JACOBIAN_STEP = 1e-6
MAX_LOG_STEP = 30.0


class NonConvergence(RuntimeError):
    """The solver ran out of budget without meeting the residual target.

    Carries the best iterate seen, its residual and the residual trace.
    ``diagnostic`` is ``"budget"`` for a plain iteration limit and
    ``"boundary_collapse"`` when some weight stayed pinned at the floor.
    """

    def __init__(self, message, best_w, best_residual, trace, diagnostic="budget"):
        super().__init__(message)
        self.best_w = best_w
        self.best_residual = best_residual
        self.trace = trace
        self.diagnostic = diagnostic


@dataclass
class SolverOptions:
    tol_budget: float = 1e-10
    max_iters: int = 10_000
    warmup_iters: int = 50
    w_floor: float = 1e-12
    start: ArrayLike | None = None
    newton_iters: int = 100
    max_halvings: int = 30
    collapse_iters: int = 100


@dataclass
class _Eval:
    w: NDArray
    f: NDArray
    alloc: NDArray
    lam: NDArray
    scale: float

    @property
    def residual(self) -> float:
        return float(np.max(np.abs(self.f)) / self.scale)


def _evaluate(w: NDArray, economy: Economy) -> _Eval:
    alloc, lam = pareto_allocation(w, economy)
    f = np.array([economy.expect(lam * (alloc[m] - economy.initial[m]))
                  for m in range(economy.n_agents)])
    scale = economy.expect(lam * economy.endowment)
    return _Eval(w, f, alloc, lam, scale)


def excess_value(w: ArrayLike, economy: Economy) -> NDArray:
    """``f_m(w) = E[U_c(w, Lambda) (pi^m(w, Lambda) - alpha_0^m)]`` per agent."""
    return _evaluate(as_weights(w, economy.n_agents), economy).f


def excess_utility(w: ArrayLike, economy: Economy) -> NDArray:
    """``h_m(w) = f_m(w) / w^m``, defined for strictly positive weights.

    Equivalently ``E[U'_m(pi^m) (pi^m - alpha_0^m)]``; unchanged when ``w``
    is rescaled.
    """
    w = as_weights(w, economy.n_agents)
    if np.any(w <= 0):
        raise ValueError("excess utility needs strictly positive weights")
    return excess_value(w, economy) / w


def _g(ev: _Eval) -> NDArray:
    push = np.maximum(0.0, -ev.f)
    return (ev.w + push) / (1.0 + push.sum())


def fixed_point_map(w: ArrayLike, economy: Economy) -> NDArray:
    """``g_m(w) = (w^m + max(0, -f_m(w))) / (1 + sum_n max(0, -f_n(w)))``.

    Maps the simplex into itself; its interior fixed points are exactly the
    zeros of ``f``.
    """
    w = as_weights(w, economy.n_agents)
    if abs(w.sum() - 1.0) > 1e-12:
        raise ValueError("fixed_point_map expects a point of the simplex")
    return _g(_evaluate(w, economy))


@dataclass
class EquilibriumCertificate:
    """Weights, state prices and allocation of a candidate equilibrium.

    ``zeta`` should equal ``z * lam`` with ``lam = U_c(w, Lambda)``.
    """

    w: NDArray
    z: float
    zeta: NDArray
    allocation: NDArray
    lam: NDArray | None = None
    budget_residuals: NDArray | None = None
    foc_residuals: NDArray | None = None
    integrability: IntegrabilityReport | None = None
    iterations: int = 0
    trace: list = field(default_factory=list)
    converged: bool = True

    def rescaled(self, k: float) -> EquilibriumCertificate:
        """Same equilibrium with ``z`` and ``zeta`` multiplied by ``k``."""
        return EquilibriumCertificate(
            self.w, self.z * k, self.zeta * k, self.allocation, self.lam,
            self.budget_residuals, self.foc_residuals, self.integrability,
            self.iterations, list(self.trace), self.converged,
        )


def _foc_residuals(w, z, zeta, alloc, economy) -> NDArray:
    """Per-state max over agents of ``|z w^m U'_m(alpha^m) / zeta - 1|``."""
    s_idx = np.arange(economy.n_states)
    out = np.zeros(economy.n_states)
    with np.errstate(all="ignore"):
        for m, fld in enumerate(economy.fields):
            dev = np.abs(z * w[m] * fld.du(alloc[m], s_idx) / zeta - 1.0)
            out = np.maximum(out, np.where(np.isfinite(dev), dev, np.inf))
    return out


def _certificate(ev: _Eval, economy: Economy, iterations, trace, converged=True):
    zeta = ev.lam.copy()
    return EquilibriumCertificate(
        w=ev.w.copy(),
        z=1.0,
        zeta=zeta,
        allocation=ev.alloc.copy(),
        lam=ev.lam.copy(),
        budget_residuals=ev.f / ev.scale,
        foc_residuals=_foc_residuals(ev.w, 1.0, zeta, ev.alloc, economy),
        integrability=integrability_report(economy, ev.w) if converged else None,
        iterations=iterations,
        trace=trace,
        converged=converged,
    )


def _clamp(w: NDArray, floor: float) -> NDArray:
    w = np.maximum(w, floor)
    return w / w.sum()


def _reduced(w: NDArray) -> NDArray:
    """Indices of every agent except the one with the largest weight."""
    return np.delete(np.arange(w.size), int(np.argmax(w)))


def _jacobian(ev: _Eval, economy: Economy, keep: NDArray) -> NDArray:
    """Central differences of ``f[keep]`` in the log weights ``log w[keep]``.

    The dropped (largest) weight is held fixed and every probe is projected
    back to the simplex, so the step ``1e-6`` is a relative perturbation of
    one weight however small that weight is.
    """
    n = keep.size
    jac = np.empty((n, n))
    for j, m in enumerate(keep):
        up, down = ev.w.copy(), ev.w.copy()
        up[m] *= np.exp(JACOBIAN_STEP)
        down[m] *= np.exp(-JACOBIAN_STEP)
        f_up = _evaluate(up / up.sum(), economy).f[keep]
        f_down = _evaluate(down / down.sum(), economy).f[keep]
        jac[:, j] = (f_up - f_down) / (2 * JACOBIAN_STEP)
    return jac


def _merit(ev: _Eval) -> float:
    return float(np.linalg.norm(ev.f) / ev.scale)


def solve(economy: Economy, options: SolverOptions | None = None) -> EquilibriumCertificate:
    """Find weights ``w`` in the open simplex with ``f(w) = 0``.

    Runs three stages until ``max|f| <= tol_budget * E[U_c Lambda]``:

    1. up to ``warmup_iters`` steps of :func:`fixed_point_map` from the
       uniform point (or ``options.start``), stopping early once an
       iteration improves the residual by less than 0.1%;
    2. damped Newton from the best point so far on the excess values of
       all agents but the one with the largest weight (the remaining one
       follows from Walras' identity), in log-weight coordinates, with a
       finite-difference Jacobian and step halving on ``||f||``;
    3. whenever Newton stalls, multiplicative tatonnement
       ``w <- normalize(w * exp(-eta * h(w) / E[U_c Lambda]))`` from the best
       point, with ``eta`` halved when a step overshoots (some excess value
       changes sign while the residual grows) and doubled, up to 1, after
       every accepted step. Once tatonnement has cut the residual tenfold,
       Newton gets another try.

    Returns a certificate with ``z = 1``; raises :class:`NonConvergence`
    otherwise.
    """
    opts = options or SolverOptions()
    n = economy.n_agents
    tol = opts.tol_budget
    w0 = np.full(n, 1.0 / n) if opts.start is None else to_simplex(opts.start)
    if np.any(w0 <= 0):
        raise ValueError("the starting point must lie in the open simplex")
    trace: list[tuple[str, float]] = []
    iters = 0

    ev = _evaluate(w0, economy)
    best = ev
    trace.append(("start", ev.residual))
    log.debug("start residual %.3e", ev.residual)

    def done(e):
        return e.residual <= tol

    def finish(e):
        log.info("converged after %d iterations, residual %.3e", iters, e.residual)
        return _certificate(e, economy, iters, trace)

    if done(ev):
        return finish(ev)

    collapsed = 0

    def check_collapse(e):
        nonlocal collapsed
        collapsed = collapsed + 1 if np.any(e.w <= opts.w_floor * (1 + 1e-9)) else 0
        if collapsed >= opts.collapse_iters:
            raise NonConvergence(
                f"weight pinned at the floor for {collapsed} iterations; "
                "suspected non-existence or degeneracy",
                best.w, best.residual, trace, "boundary_collapse",
            )

    # stage 1: fixed-point warm-up
    for _ in range(opts.warmup_iters):
        if iters >= opts.max_iters:
            break
        new = _evaluate(_clamp(_g(ev), opts.w_floor), economy)
        iters += 1
        trace.append(("fixed_point", new.residual))
        stalled = new.residual > (1 - 1e-3) * ev.residual
        ev = new
        if ev.residual < best.residual:
            best = ev
        if done(ev):
            return finish(ev)
        check_collapse(ev)
        if stalled:
            break
    log.debug("warm-up ended at residual %.3e", best.residual)

    # stages 2 and 3: Newton, with tatonnement whenever Newton stalls
    ev = best
    newton_left = opts.newton_iters if n > 1 else 0
    while iters < opts.max_iters:
        while newton_left > 0 and iters < opts.max_iters:
            newton_left -= 1
            keep = _reduced(ev.w)
            try:
                step = np.linalg.solve(_jacobian(ev, economy, keep), -ev.f[keep])
            except np.linalg.LinAlgError:
                log.debug("singular Jacobian, leaving Newton")
                break
            if not np.all(np.isfinite(step)):
                break
            m0 = _merit(ev)
            # cap a single move at a factor e^MAX_LOG_STEP in any weight
            t = min(1.0, MAX_LOG_STEP / max(np.max(np.abs(step)), 1e-300))
            accepted = None
            for _ in range(opts.max_halvings + 1):
                x = ev.w.copy()
                x[keep] *= np.exp(t * step)
                trial = _evaluate(_clamp(x / x.sum(), opts.w_floor), economy)
                if _merit(trial) <= (1 - 1e-4 * t) * m0:
                    accepted = trial
                    break
                t *= 0.5
            iters += 1
            if accepted is None:
                log.debug("line search failed at residual %.3e", ev.residual)
                break
            ev = accepted
            trace.append(("newton", ev.residual))
            if ev.residual < best.residual:
                best = ev
            if done(ev):
                return finish(ev)
            check_collapse(ev)

        # tatonnement: runs until the residual drops tenfold, then Newton again
        ev = best
        target = 0.1 * ev.residual
        eta = 1.0
        while iters < opts.max_iters and eta > 1e-30:
            logstep = -eta * ev.f / ev.w / ev.scale
            # shifting the exponent does not change the normalized point
            logstep -= logstep.max()
            trial = _evaluate(_clamp(ev.w * np.exp(logstep), opts.w_floor), economy)
            iters += 1
            flipped = np.any(np.sign(trial.f) * np.sign(ev.f) < 0)
            if trial.residual > ev.residual and flipped:
                # overshoot: shrink the step and retry from the same point
                eta *= 0.5
                trace.append(("tatonnement_reject", ev.residual))
                continue
            ev = trial
            eta = min(1.0, 2.0 * eta)
            trace.append(("tatonnement", ev.residual))
            if ev.residual < best.residual:
                best = ev
            if done(ev):
                return finish(ev)
            check_collapse(ev)
            if ev.residual <= target and n > 1:
                newton_left = max(newton_left, 10)
                break
        else:
            break
        ev = best

    raise NonConvergence(
        f"residual {best.residual:.3e} above target {tol:.1e} after {iters} iterations",
        best.w, best.residual, trace,
    )


def best_effort_certificate(err: NonConvergence, economy: Economy) -> EquilibriumCertificate:
    """Certificate for the best iterate of a failed solve, flagged unconverged."""
    ev = _evaluate(err.best_w, economy)
    return _certificate(ev, economy, len(err.trace) - 1, err.trace, converged=False)


@dataclass
class Check:
    name: str
    passed: bool
    magnitude: float
    detail: str = ""


@dataclass
class VerificationReport:
    checks: list[Check]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failed(self) -> list[str]:
        return [c.name for c in self.checks if not c.passed]

    def __getitem__(self, name: str) -> Check:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)


def verify(
    cert: EquilibriumCertificate,
    economy: Economy,
    tol_budget: float = 1e-10,
    foc_rtol: float = 1e-8,
    clearing_rtol: float = 1e-12,
) -> VerificationReport:
    """Check a certificate against the equilibrium conditions.

    Checks: market clearing, budgets, first-order proportionality
    ``U'_m(alpha^m) / zeta = 1 / (z w^m)`` in every state, finiteness of
    ``E[zeta Lambda]`` and ``E[|U_m(alpha^m)|]``, interior weights and a
    strictly positive ``zeta``. The scale ``z`` is free: any ``z > 0``
    consistent with ``zeta`` passes.
    """
    w = np.asarray(cert.w, dtype=float).reshape(-1)
    zeta = np.asarray(cert.zeta, dtype=float).reshape(-1)
    alloc = np.asarray(cert.allocation, dtype=float)
    n, s = economy.n_agents, economy.n_states
    if w.shape != (n,) or zeta.shape != (s,) or alloc.shape != (n, s):
        raise AlignmentError(
            f"certificate shapes w{w.shape} zeta{zeta.shape} allocation{alloc.shape} "
            f"do not match {n} agents x {s} states"
        )
    lam_tot = economy.endowment
    s_idx = np.arange(s)
    checks = []

    gap = float(np.max(np.abs(alloc.sum(axis=0) - lam_tot) / lam_tot))
    nonneg = bool(np.all(alloc >= 0))
    checks.append(Check("market_clearing", gap <= clearing_rtol and nonneg, gap,
                        "" if nonneg else "negative consumption"))

    with np.errstate(all="ignore"):
        value = economy.expect(zeta * lam_tot)
        budgets = np.array([economy.expect(zeta * (alloc[m] - economy.initial[m]))
                            for m in range(n)])
        rel = float(np.max(np.abs(budgets)) / value) if value > 0 else np.inf
    worst = int(np.argmax(np.abs(budgets)))
    checks.append(Check("budget", bool(rel <= tol_budget), rel,
                        f"worst agent {economy.agents[worst]}"))

    z = float(cert.z)
    with np.errstate(all="ignore"):
        spread, offset = [], []
        for m, fld in enumerate(economy.fields):
            ratio = fld.du(alloc[m], s_idx) / zeta
            mean = float(np.mean(ratio))
            spread.append(float((np.max(ratio) - np.min(ratio)) / mean))
            offset.append(abs(mean * z * w[m] - 1.0))
    foc = max(max(spread), max(offset))
    foc = foc if np.isfinite(foc) else np.inf
    checks.append(Check("first_order", bool(foc <= foc_rtol), foc,
                        "ratio U'_m / zeta must be constant and equal 1/(z w^m)"))

    checks.append(Check("price_value_finite", bool(np.isfinite(value)), value))

    with np.errstate(all="ignore"):
        abs_u = np.array([economy.expect(np.abs(fld.u(alloc[m], s_idx)))
                          for m, fld in enumerate(economy.fields)])
    # expectation maps -inf to -inf; |U| never is, so only +inf or nan signal trouble
    fin = bool(np.all(np.isfinite(abs_u)))
    checks.append(Check("utility_finite", fin, float(np.max(abs_u)) if fin else np.inf))

    interior = bool(np.all(w > 0) and abs(w.sum() - 1.0) <= 1e-12 and z > 0)
    checks.append(Check("interior_weights", interior, float(np.min(w))))

    checks.append(Check("positive_prices", bool(np.all(zeta > 0) and np.all(np.isfinite(zeta))),
                        float(np.min(zeta))))
    return VerificationReport(checks)


@dataclass
class UniquenessReport:
    gs_flags: list[bool]
    failing: list[int]

    @property
    def guaranteed(self) -> bool:
        return len(self.failing) <= 1


def check_uniqueness_preconditions(
    economy: Economy, c_grid: ArrayLike | None = None
) -> UniquenessReport:
    """Which agents have ``c U'_m(c)`` non-decreasing in every state.

    At most one failing agent is allowed for uniqueness to be guaranteed.
    """
    grid = DEFAULT_GRID if c_grid is None else c_grid
    flags = []
    for fld in economy.fields:
        per_state = marginal_times_c_monotone(fld, grid, n_states=fld.n_states)
        flags.append(all(per_state.values()))
    return UniquenessReport(flags, [m for m, ok in enumerate(flags) if not ok])


@dataclass
class ProbeRoot:
    w: NDArray
    residual: float
    sources: list[str]


@dataclass
class ProbeResult:
    roots: list[ProbeRoot]
    failures: list[str]


def simplex_starts(n_agents: int, n_starts: int) -> NDArray:
    """Deterministic low-discrepancy points in the open simplex.

    Unscrambled Halton points ``u`` (skipping the origin) are mapped through
    ``-log(u)`` and normalised.
    """
    u = qmc.Halton(d=n_agents, scramble=False).random(n_starts + 1)[1:]
    u = np.clip(u, 1e-12, 1 - 1e-12)
    e = -np.log(u)
    return e / e.sum(axis=1, keepdims=True)


def _scan_roots(economy: Economy, scan_n: int) -> list[NDArray]:
    def h1(t):
        return excess_utility([t, 1.0 - t], economy)[0]

    ts = np.arange(1, scan_n + 1) / (scan_n + 1)
    hs = np.array([h1(t) for t in ts])
    roots = []
    for i, (t, h) in enumerate(zip(ts, hs)):
        if h == 0:
            roots.append(t)
        if i + 1 < len(ts) and h * hs[i + 1] < 0:
            lo, hi, hlo = t, ts[i + 1], h
            for _ in range(200):
                mid = 0.5 * (lo + hi)
                if mid in (lo, hi):
                    break
                hm = h1(mid)
                if hm == 0:
                    lo = hi = mid
                    break
                if np.sign(hm) == np.sign(hlo):
                    lo, hlo = mid, hm
                else:
                    hi = mid
            roots.append(0.5 * (lo + hi))
    return [np.array([t, 1.0 - t]) for t in roots]


def probe_multiplicity(
    economy: Economy,
    n_starts: int = 8,
    scan_n: int | None = None,
    options: SolverOptions | None = None,
    cluster_tol: float = 1e-6,
) -> ProbeResult:
    """Collect distinct equilibrium weights from many starts and a 1-D scan.

    Solves from ``n_starts`` low-discrepancy starting weights. For two
    agents and ``scan_n`` given, also brackets every sign change of
    ``t -> h_1(t, 1 - t)`` on ``scan_n`` interior grid points and refines it
    by bisection. Results within ``cluster_tol`` (sup norm) are merged.
    Per-start non-convergence is recorded in ``failures``.
    """
    if n_starts < 1:
        raise ValueError("n_starts must be at least 1")
    if scan_n is not None and economy.n_agents != 2:
        raise ValueError("the grid scan is only available for two agents")
    base = options or SolverOptions()
    found: list[tuple[NDArray, str]] = []
    failures = []
    for k, w0 in enumerate(simplex_starts(economy.n_agents, n_starts)):
        opts = SolverOptions(**{**base.__dict__, "start": w0})
        try:
            cert = solve(economy, opts)
        except NonConvergence as err:
            failures.append(f"start {k}: {err}")
            continue
        found.append((cert.w, f"start {k}"))
    if scan_n is not None:
        for w in _scan_roots(economy, scan_n):
            found.append((w, "scan"))

    roots: list[ProbeRoot] = []
    for w, src in found:
        for r in roots:
            if np.max(np.abs(r.w - w)) <= cluster_tol:
                r.sources.append(src)
                break
        else:
            roots.append(ProbeRoot(w, _evaluate(w, economy).residual, [src]))
    roots.sort(key=lambda r: tuple(r.w))
    return ProbeResult(roots, failures)


@dataclass
class IntegrabilityReport:
    """Magnitudes of the integrability quantities at weights ``w``.

    All are finite on a finite state space with positive endowment; the
    report exists to surface values close to the floating point range.
    """

    abs_utility: NDArray  # E|U_m(pi^m)|
    marginal_endowment: NDArray  # E[U'_m(pi^m) Lambda]
    marginal_own: NDArray  # E[U'_m(pi^m) pi^m]
    price_endowment: float  # E[U_c Lambda]
    equal_split_bound: float  # E[sum_m U'_m(Lambda / M) Lambda]
    max_log10: float
    overflow_risk: bool
    notes: list[str]

    def as_dict(self) -> dict:
        return {
            "abs_utility": self.abs_utility.tolist(),
            "marginal_endowment": self.marginal_endowment.tolist(),
            "marginal_own": self.marginal_own.tolist(),
            "price_endowment": self.price_endowment,
            "equal_split_bound": self.equal_split_bound,
            "max_log10": self.max_log10,
            "overflow_risk": self.overflow_risk,
            "notes": list(self.notes),
        }


def _magnitude_flags(name, values, notes, positive=True):
    """Largest |log10| among nonzero entries; note non-finite or underflowed values."""
    v = np.abs(np.asarray(values, dtype=float))
    if not np.all(np.isfinite(v)):
        notes.append(f"{name}: non-finite values")
        return np.inf
    if positive and np.any(v == 0):
        notes.append(f"{name}: values underflow to zero")
    nz = v[v > 0]
    return float(np.max(np.abs(np.log10(nz)))) if nz.size else 0.0


def integrability_report(economy: Economy, w: ArrayLike) -> IntegrabilityReport:
    """Integrability magnitudes at interior weights ``w``.

    Also evaluates the dominating bound ``E[sum_m U'_m(Lambda/M) Lambda]``
    that controls ``sup_w U_c(w, Lambda) Lambda``. Flags ``overflow_risk``
    when a per-state term leaves ``[1e-250, 1e250]``, is non-finite, or the
    planner split itself fails.
    """
    w = as_weights(w, economy.n_agents)
    if np.any(w <= 0):
        raise ValueError("integrability report needs interior weights")
    n = economy.n_agents
    lam_tot = economy.endowment
    s_idx = np.arange(economy.n_states)
    mu = economy.space.weights
    notes: list[str] = []
    mags = []
    with np.errstate(all="ignore"):
        even = np.stack([fld.du(lam_tot / n, s_idx) for fld in economy.fields])
        bound_terms = even.sum(axis=0) * lam_tot
        mags.append(_magnitude_flags("equal_split_bound", bound_terms * mu, notes))
        bound = economy.expect(bound_terms) if np.all(np.isfinite(bound_terms)) else np.inf
        try:
            alloc, lam = pareto_allocation(w, economy)
        except NumericalFailure as err:
            notes.append(f"planner split failed: {err}")
            nan = np.full(n, np.nan)
            return IntegrabilityReport(nan, nan, nan, np.nan, float(bound), np.inf, True, notes)
        du = np.stack([fld.du(alloc[m], s_idx) for m, fld in enumerate(economy.fields)])
        u = np.stack([fld.u(alloc[m], s_idx) for m, fld in enumerate(economy.fields)])
        terms = {
            "abs_utility": np.abs(u),
            "marginal_endowment": du * lam_tot,
            "marginal_own": du * alloc,
        }
        out = {}
        for name, t in terms.items():
            mags.append(_magnitude_flags(name, t * mu, notes, name != "abs_utility"))
            out[name] = np.array([economy.expect(row) if np.all(np.isfinite(row)) else np.inf
                                  for row in t])
        pe_terms = lam * lam_tot
        mags.append(_magnitude_flags("price_endowment", pe_terms * mu, notes))
        price_endowment = economy.expect(pe_terms) if np.all(np.isfinite(pe_terms)) else np.inf
    max_log10 = float(max(mags))
    risk = bool(max_log10 > OVERFLOW_LOG10 or notes)
    return IntegrabilityReport(
        out["abs_utility"], out["marginal_endowment"], out["marginal_own"],
        float(price_endowment), float(bound), max_log10, risk, notes,
    )
