"""The twelve acceptance criteria, each at its stated tolerance.

Run with ``pytest tests/test_acceptance.py``; the terminal summary prints one
PASS/FAIL line per criterion. Running this file directly does the same.
"""

import filecmp
from pathlib import Path

import numpy as np
import pytest

from conftest import random_economy, two_state_log
from oracles import (
    common_gamma_shares,
    common_gamma_weights,
    log_economy_allocation,
    log_economy_weights,
)
from negishi import (
    CRRA,
    Economy,
    LogUtility,
    StateSpace,
    concavity_bound_check,
    dominance_oracle,
    excess_value,
    fixed_point_map,
    marginal_times_c_monotone,
    pareto_allocation,
    probe_multiplicity,
    solve,
    split_state,
    verify,
)
from negishi.cli import cmd_solve
from negishi.equilibrium import check_uniqueness_preconditions
from negishi.utility import DEFAULT_GRID

CONFIGS = sorted((Path(__file__).resolve().parent.parent / "configs").glob("*.json"))
criterion = pytest.mark.criterion


def log_economies():
    rng = np.random.default_rng(1)
    out = [two_state_log()]
    for n_agents, n_states in [(2, 3), (3, 4), (4, 2), (5, 6)]:
        out.append(random_economy(rng, n_agents, n_states, gammas=[1.0] * n_agents, scaled=False))
    return out


def common_gamma_economies(gamma):
    rng = np.random.default_rng(int(gamma * 100))
    return [random_economy(rng, n, s, gammas=[gamma] * n, scaled=False)
            for n, s in [(2, 2), (3, 4), (4, 5)]]


def mixed_economies():
    rng = np.random.default_rng(7)
    specs = [(2, 2, [0.5, 3.0]), (3, 3, [1.0, 2.0, 0.7]), (3, 5, [4.0, 1.0, 1.0]),
             (4, 4, [0.5, 1.0, 2.0, 5.0]), (5, 3, [2.0, 2.0, 0.8, 1.0, 3.0])]
    return [random_economy(rng, n, s, gammas=g) for n, s, g in specs]


def random_simplex(rng, n_agents, size):
    return rng.dirichlet(np.ones(n_agents), size)


# solved equilibria shared by criteria 6 and 7
_solved = None


def solved_equilibria():
    global _solved
    if _solved is None:
        from negishi.config import load_config
        econs = [load_config(p).economy for p in CONFIGS]
        econs += log_economies()[:3] + common_gamma_economies(2.0) + mixed_economies()
        _solved = [(e, solve(e)) for e in econs]
    return _solved


@criterion(1, "log-economy closed form")
def test_log_closed_form():
    for econ in log_economies():
        mu, a0 = econ.space.weights, econ.initial
        cert = solve(econ)
        assert np.max(np.abs(cert.w - log_economy_weights(mu, a0))) <= 1e-9
        ref = log_economy_allocation(mu, a0)
        assert np.max(np.abs(cert.allocation - ref) / ref) <= 1e-9
        assert verify(cert, econ).passed


@criterion(2, "common-gamma CRRA closed form")
@pytest.mark.parametrize("gamma", [0.5, 2.0, 4.0])
def test_common_gamma_closed_form(gamma):
    for econ in common_gamma_economies(gamma):
        mu, a0 = econ.space.weights, econ.initial
        cert = solve(econ)
        assert np.max(np.abs(cert.w - common_gamma_weights(mu, a0, gamma))) <= 1e-8
        theta = common_gamma_shares(mu, a0, gamma)
        np.testing.assert_allclose(cert.allocation, np.outer(theta, econ.endowment), rtol=1e-8)


@criterion(3, "symmetric agents")
@pytest.mark.parametrize("make", [lambda s: CRRA(2.0, s), lambda s: LogUtility(s),
                                  lambda s: CRRA(0.5), lambda s: CRRA(7.0, s)])
@pytest.mark.parametrize("n_agents", [2, 3, 5])
def test_symmetry(make, n_agents):
    space = StateSpace(["a", "b", "c"], [0.3, 0.5, 0.2])
    total = np.array([1.7, 0.4, 3.1])
    scale = np.array([1.0, 0.6, 1.8])
    econ = Economy(space, [make(scale)] * n_agents, np.tile(total / n_agents, (n_agents, 1)))
    cert = solve(econ)
    assert np.max(np.abs(cert.w - 1.0 / n_agents)) <= 1e-12
    # exact up to the rounding of total / M itself
    assert np.max(np.abs(cert.allocation - total / n_agents)) <= 2 * np.finfo(float).eps * total.max()


@criterion(4, "Walras identity")
def test_walras_identity():
    rng = np.random.default_rng(4)
    count = 0
    for econ in mixed_economies():
        for w in random_simplex(rng, econ.n_agents, 200):
            alloc, lam = pareto_allocation(w, econ)
            scale = econ.expect(lam * econ.endowment)
            assert abs(np.sum(excess_value(w, econ))) <= 1e-10 * scale
            count += 1
    assert count == 1000


@criterion(5, "boundary sign")
def test_boundary_sign():
    rng = np.random.default_rng(5)
    for econ in mixed_economies():
        for _ in range(100):
            w = rng.dirichlet(np.ones(econ.n_agents))
            zero = rng.choice(econ.n_agents, size=rng.integers(1, econ.n_agents), replace=False)
            w[zero] = 0.0
            w /= w.sum()
            f = excess_value(w, econ)
            assert np.all(f[zero] < 0)


@criterion(6, "fixed-point consistency")
def test_fixed_point_consistency():
    for econ, cert in solved_equilibria():
        assert np.max(np.abs(fixed_point_map(cert.w, econ) - cert.w)) <= 1e-9


@criterion(7, "first-order conditions")
def test_first_order_conditions():
    for econ, cert in solved_equilibria():
        s_idx = np.arange(econ.n_states)
        for m, fld in enumerate(econ.fields):
            ratio = fld.du(cert.allocation[m], s_idx) / cert.zeta
            assert (ratio.max() - ratio.min()) / ratio.mean() <= 1e-8
            np.testing.assert_allclose(ratio, 1.0 / (cert.z * cert.w[m]), rtol=1e-8)


def _probe_fields(rng, n_agents):
    gammas = rng.choice([0.4, 0.8, 1.0, 1.5, 3.0, 6.0], n_agents)
    return [LogUtility() if g == 1.0 else CRRA(g) for g in gammas]


@criterion(8, "planner properties: homogeneity, monotonicity, injectivity")
def test_planner_properties():
    rng = np.random.default_rng(8)
    econ = mixed_economies()[3]
    for w in random_simplex(rng, econ.n_agents, 50):
        base, lam = pareto_allocation(w, econ)
        for y in (0.5, 2.0, 10.0):
            alloc, lam_y = pareto_allocation(y * w, econ)
            np.testing.assert_allclose(alloc, base, rtol=1e-10, atol=0)
            np.testing.assert_allclose(lam_y, y * lam, rtol=1e-10)
    for _ in range(200):
        n = int(rng.integers(2, 5))
        fields = _probe_fields(rng, n)
        w = rng.dirichlet(np.ones(n))
        c = float(np.exp(rng.uniform(-3, 3)))
        m = int(rng.integers(n))
        before = split_state(w, c, 0, fields).shares
        w2 = w.copy()
        w2[m] *= 1.0 + rng.uniform(0.01, 1.0)
        after = split_state(w2, c, 0, fields).shares
        others = np.arange(n) != m
        assert after[m] > before[m]
        assert np.all(after[others] < before[others])
    for _ in range(200):
        n = int(rng.integers(2, 5))
        fields = _probe_fields(rng, n)
        w1, w2 = rng.dirichlet(np.ones(n), 2)
        c = float(np.exp(rng.uniform(-3, 3)))
        gap = np.max(np.abs(split_state(w1, c, 0, fields).shares - split_state(w2, c, 0, fields).shares))
        assert gap > 0


def _two_agent_economies():
    rng = np.random.default_rng(9)
    out = []
    for n_states in (1, 2, 3):
        space = StateSpace([f"s{i}" for i in range(n_states)], rng.uniform(0.5, 1.5, n_states))
        init = rng.uniform(0.2, 2.0, (2, n_states))
        out.append(Economy(space, [LogUtility(), CRRA(2.0)], init))
        out.append(Economy(space, [CRRA(0.5), CRRA(3.0, rng.uniform(0.5, 2, n_states))], init))
    return out


def _non_proportional_log_allocations():
    rng = np.random.default_rng(10)
    out = []
    for k in range(10):
        n_states = 2 + k % 2
        space = StateSpace([f"s{i}" for i in range(n_states)], rng.uniform(0.5, 1.5, n_states))
        total = rng.uniform(0.5, 3.0, n_states)
        econ = Economy(space, [LogUtility(), LogUtility()], np.vstack([total / 2, total / 2]))
        # shares of agent 1 spread at least 0.4 apart across states
        share = np.linspace(0.15, 0.85, n_states)
        rng.shuffle(share)
        out.append((econ, np.vstack([share * total, (1 - share) * total])))
    return out


@criterion(9, "Pareto dominance oracle, both directions")
def test_pareto_oracle():
    rng = np.random.default_rng(99)
    econs = _two_agent_economies()
    for k in range(20):
        econ = econs[k % len(econs)]
        w = rng.dirichlet([1.0, 1.0])
        w = 0.05 + 0.9 * w  # keep the weights interior
        alloc, _ = pareto_allocation(w / w.sum(), econ)
        assert not dominance_oracle(alloc, econ, 60).dominated
    for econ, cand in _non_proportional_log_allocations():
        verdict = dominance_oracle(cand, econ, 60)
        assert verdict.dominated
        assert np.all(verdict.gains >= 0) and np.any(verdict.gains > 0)


def _compliant_economies():
    space2 = StateSpace(["lo", "hi"], [0.5, 0.5])
    space3 = StateSpace(["x", "y", "z"], [0.2, 0.5, 0.3])
    return [
        Economy(space2, [CRRA(5, [0.97, 0.03]), CRRA(0.5, [0.03, 0.97])],
                [[0.95, 0.05], [0.05, 0.95]]),
        Economy(space2, [LogUtility(), CRRA(8.0)], [[0.01, 3.0], [2.0, 0.02]]),
        Economy(space3, [CRRA(0.3, [2, 1, 0.5]), CRRA(4.0)], [[1, 0, 2], [0.1, 1, 0.3]]),
        Economy(space3, [LogUtility([1, 3, 0.2]), CRRA(0.6), CRRA(2.5)],
                [[1, 0, 0.5], [0, 2, 0.1], [0.3, 0.3, 0.3]]),
    ]


@criterion(10, "gross-substitute classification and uniqueness")
def test_gross_substitutes():
    passing = [CRRA(g) for g in (0.1, 0.3, 0.5, 0.75, 0.9, 0.99, 1 - 1e-6)]
    passing += [CRRA(0.5, [1.0, 7.0]), LogUtility(), LogUtility([0.2, 5.0])]
    failing = [CRRA(g) for g in (1 + 1e-6, 1.01, 1.5, 2.0, 4.0, 10.0)] + [CRRA(3.0, [1.0, 0.1])]
    for fld in passing:
        assert all(marginal_times_c_monotone(fld, DEFAULT_GRID, n_states=fld.n_states).values())
    for fld in failing:
        assert not any(marginal_times_c_monotone(fld, DEFAULT_GRID, n_states=fld.n_states).values())
    for econ in _compliant_economies():
        assert check_uniqueness_preconditions(econ, DEFAULT_GRID).guaranteed
        scan = 2000 if econ.n_agents == 2 else None
        result = probe_multiplicity(econ, n_starts=32, scan_n=scan)
        assert len(result.roots) == 1, [r.w for r in result.roots]


@criterion(11, "concavity inequality")
def test_concavity_inequality():
    fields = [CRRA(g) for g in (0.1, 0.5, 0.9, 1.1, 2.0, 3.0, 6.0, 20.0)]
    fields += [LogUtility(), CRRA(2.0, [0.5, 3.0]), LogUtility([4.0, 0.1])]
    for fld in fields:
        assert concavity_bound_check(fld, DEFAULT_GRID, n_states=fld.n_states).passed


@criterion(12, "deterministic reports")
@pytest.mark.parametrize("config", CONFIGS, ids=lambda p: p.stem)
def test_determinism(config, tmp_path):
    runs = []
    for k in range(2):
        out, table = tmp_path / f"run{k}.json", tmp_path / f"run{k}.csv"
        assert cmd_solve(str(config), str(out), str(table)) == 0
        runs.append((out, table))
    assert filecmp.cmp(runs[0][0], runs[1][0], shallow=False)
    assert filecmp.cmp(runs[0][1], runs[1][1], shallow=False)


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q"]))
