import numpy as np
import pytest

from negishi import CRRA, CustomField, LogUtility, concavity_bound_check, marginal_times_c_monotone, validate_field
from negishi.utility import DEFAULT_GRID, field_from_dict

BUILT_IN = [CRRA(0.5), CRRA(2.0), CRRA(4.0), CRRA(0.8, [0.5, 2.0]), LogUtility(), LogUtility([3.0, 0.1])]


def capped_field():
    """Log utility whose marginal is capped at 10, so Inada fails at zero."""
    def u(c, s):
        c = np.asarray(c, dtype=float)
        return np.where(c < 0.1, 10 * c + np.log(0.1) - 1.0, np.log(np.maximum(c, 0.1)))

    def du(c, s):
        return np.minimum(1.0 / np.asarray(c, dtype=float), 10.0)

    def inv_du(y, s):
        return 1.0 / np.asarray(y, dtype=float)

    return CustomField(u, du, inv_du, np.log(0.1) - 1.0, name="capped log")


@pytest.mark.parametrize("fld", [CRRA(2.0), CRRA(4.0), CRRA(0.5), LogUtility(), CRRA(3.0, [1.0, 0.2, 5.0])])
def test_validator_accepts_analytic_families(fld):
    report = validate_field(fld, n_states=fld.n_states)
    assert report.passed, report.failures()


def test_log_reports_minus_infinity_at_zero():
    report = validate_field(LogUtility())
    assert report.passed and report.states[0].u_at_zero == -np.inf
    assert validate_field(CRRA(0.5)).states[0].u_at_zero == 0.0
    assert validate_field(CRRA(2.0)).states[0].u_at_zero == -np.inf


def test_validator_flags_capped_marginal():
    report = validate_field(capped_field())
    assert not report.passed
    (msgs,) = report.failures().values()
    assert "Inada condition at zero fails" in msgs
    assert "Inada condition at infinity fails" not in msgs


def test_validator_flags_non_concave_field():
    convex = CustomField(lambda c, s: c ** 2, lambda c, s: 2 * c, lambda y, s: y / 2, 0.0)
    msgs = validate_field(convex).failures()[None]
    assert "marginal utility not strictly decreasing" in msgs


def test_validator_needs_six_decades():
    with pytest.raises(ValueError):
        validate_field(LogUtility(), np.logspace(-2, 2, 50))


@pytest.mark.parametrize("fld", BUILT_IN)
def test_inverse_marginal_round_trip(fld):
    c = np.logspace(-6, 6, 241)
    for s in range(fld.n_states or 1):
        s = s if fld.n_states else None
        np.testing.assert_allclose(fld.inv_du(fld.du(c, s), s), c, rtol=1e-12)


@pytest.mark.parametrize("fld", BUILT_IN)
def test_marginal_matches_central_difference(fld):
    c = np.logspace(-6, 6, 121)
    h = 1e-5 * c
    for s in range(fld.n_states or 1):
        s = s if fld.n_states else None
        fd = (fld.u(c + h, s) - fld.u(c - h, s)) / (2 * h)
        np.testing.assert_allclose(fd, fld.du(c, s), rtol=1e-6)


def test_crra_rejects_log_alias_and_bad_gamma():
    for g in (1.0, 0.0, -2.0):
        with pytest.raises(ValueError):
            CRRA(g)
    with pytest.raises(ValueError):
        CRRA(2.0, [1.0, -1.0])


def test_scale_multiplies_utility_per_state():
    fld = CRRA(2.0, [2.0, 0.5])
    np.testing.assert_allclose(fld.u(np.array([2.0, 2.0]), np.array([0, 1])), [-1.0, -0.25])
    np.testing.assert_allclose(fld.du(4.0, 1), 0.5 / 16)


def test_concavity_bound_examples():
    assert 1.0 <= 2 * (0 - np.log(0.5))
    log = LogUtility()
    assert float(1.0 * log.du(1.0)) == 1.0
    assert 2 * (log.u(1.0) - log.u(0.5)) == pytest.approx(2 * np.log(2))
    root = CRRA(0.5)
    assert float(4 * root.du(4.0)) == pytest.approx(2.0)
    assert 2 * (root.u(4.0) - root.u(2.0)) == pytest.approx(2 * (4 - 2 * np.sqrt(2)))
    cube = CRRA(3.0)
    assert 2 * (cube.u(1.0) - cube.u(0.5)) == pytest.approx(3.0)
    for fld in (log, root, cube):
        report = concavity_bound_check(fld)
        assert report.passed and report.worst_slack[None] >= 0


def test_concavity_check_catches_convex_utility():
    convex = CustomField(lambda c, s: c ** 2, lambda c, s: 2 * c, lambda y, s: y / 2, 0.0)
    assert not concavity_bound_check(convex).passed


def test_marginal_times_c_examples():
    assert marginal_times_c_monotone(CRRA(0.5)) == {None: True}
    assert marginal_times_c_monotone(LogUtility()) == {None: True}
    assert marginal_times_c_monotone(CRRA(2.0)) == {None: False}
    assert marginal_times_c_monotone(CRRA(2.0, [1.0, 3.0]), n_states=2) == {0: False, 1: False}


def test_field_from_dict():
    assert isinstance(field_from_dict({"family": "log"}), LogUtility)
    fld = field_from_dict({"family": "crra", "gamma": 3, "scale": [1, 2]}, n_states=2)
    assert fld.gamma == 3 and fld.n_states == 2
    for bad in ({"family": "crra"}, {"family": "exp"}, {"family": "crra", "gamma": 1}):
        with pytest.raises(ValueError):
            field_from_dict(bad)
    with pytest.raises(ValueError):
        field_from_dict({"family": "log", "scale": [1, 2, 3]}, n_states=2)


def test_default_grid_spans_eighteen_decades():
    assert DEFAULT_GRID[0] == pytest.approx(1e-9) and DEFAULT_GRID[-1] == pytest.approx(1e9)
