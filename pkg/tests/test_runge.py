import json
import math

import pytest
from hypothesis import given, strategies as st

from siegel_runge import igusa, runge, thetanum
from siegel_runge.runge import T_MIN

NINE_PRIMES = math.prod([2, 3, 5, 7, 11, 13, 17, 19, 23])


def test_counts_small_n():
    assert runge.divisor_count(2) == 10 and runge.my(2) == 1
    assert runge.divisor_count(4) == 130 and runge.my(4) == 13
    p = runge.RungeParams(6)
    assert (p.r, p.m_Y) == (6**4 // 2 + 2, 33)


def test_singular_couples_n2():
    got = {"".join(map(str, a + b)) for a, b in runge.singular_couples(2)}
    assert got == {"0101", "1010", "1101", "1110", "1011", "0111"}
    assert runge.is_regular((0, 0), (0, 0), 2)
    assert not runge.is_regular((1, 1), (1, 0), 2)


@pytest.mark.parametrize("n", [3, 0, -2])
def test_odd_or_small_n_rejected(n):
    with pytest.raises(ValueError):
        runge.divisor_count(n)
    with pytest.raises(ValueError):
        runge.torsion_counts(n)


@pytest.mark.parametrize("n", [2, 4, 6])
def test_divisor_count_matches_enumeration(n):
    assert runge.regular_classes_bruteforce(n) == runge.divisor_count(n)


def test_torsion_counts():
    a, b, c = runge.torsion_counts(2)
    assert (a, b) == (7, 0) and c <= 6.157
    a, b, c = runge.torsion_counts(4)
    assert (a, b) == (7, 24) and c <= 23.13
    for n in (2, 4, 6, 8):
        assert runge.my(n) == runge.torsion_counts(n)[1] // 2 + 1


def test_runge_condition_tables():
    assert [runge.tubular_runge_condition(2, s) for s in range(1, 21)] == [s < 10 for s in range(1, 21)]
    assert runge.tubular_runge_condition(4, 9) and not runge.tubular_runge_condition(4, 10)
    assert runge.curve_runge_condition(1, 2)
    assert not runge.curve_runge_condition(2, 2)
    with pytest.raises(ValueError):
        runge.tubular_runge_condition(2, 0)


def test_bound_values():
    a = runge.bound_case_a()
    assert abs(a.value - 10.748) < 1e-3 and a.value <= a.display == 10.75
    b = runge.bound_case_b(1)
    assert abs(b.display - (4 * math.pi + 6.14)) < 1e-12
    assert abs(b.display - 18.71) < 1e-2 and abs(b.value - b.display) < 1e-2
    assert abs(runge.bound_case_b(T_MIN).value - 17.02) < 1e-2
    assert runge.faltings_bound("a") == 1070
    assert math.isclose(runge.faltings_bound("b", 1), 2 * math.pi + 535 * math.log(2 * math.pi + 9))
    with pytest.raises(ValueError):
        runge.bound_case_b(0.8)
    with pytest.raises(ValueError):
        runge.faltings_bound("b", 0.5)


def test_conservative_constant():
    b = runge.bound_case_b(1, runge.C_B_CONSERVATIVE)
    assert abs((b.value - 4 * math.pi) - 6.49) < 1e-2
    assert b.constant == runge.C_B_CONSERVATIVE


ts = st.floats(T_MIN, 50)


@given(ts, ts)
def test_case_b_slack_is_constant(s, t):
    ds = runge.bound_case_b(s).value - 4 * math.pi * s
    dt = runge.bound_case_b(t).value - 4 * math.pi * t
    assert math.isclose(ds, dt, abs_tol=1e-9)


@given(ts, ts)
def test_faltings_monotone(s, t):
    if s < t:
        assert runge.faltings_bound("b", s) < runge.faltings_bound("b", t)


def test_audit_trivial_j():
    r = runge.audit(igusa.JInvariants(1, 0, 0, 0, 1), "a")
    assert r.s_P == 0 and r.verdict is True
    assert r.bound["display"] == 10.75


def test_audit_mode_b_boundary():
    r = runge.audit(igusa.JInvariants(1, 0, 0, 0, NINE_PRIMES), "b")
    assert r.s_P == 9
    assert r.condition["lhs"] == 10 and r.verdict is False
    ra = runge.audit(igusa.JInvariants(1, 0, 0, 0, NINE_PRIMES), "a")
    assert ra.verdict is False


def test_audit_diagonal_point_warns(fixtures):
    tau = thetanum.SiegelPoint.from_json(json.loads((fixtures / "tau_diag.json").read_text()))
    r = runge.audit(igusa.JInvariants(1, 0, 0, 0, 1), "a", taus=[tau])
    assert r.h_psi is not None and r.h_psi["within_bound"]
    assert any("x_1111" in w and "theta divisor" in w for w in r.warnings)


def test_audit_rejects_extra_taus(fixtures):
    tau = thetanum.SiegelPoint.from_json(json.loads((fixtures / "tau_diag.json").read_text()))
    with pytest.raises(ValueError):
        runge.audit(igusa.JInvariants(1, 0, 0, 0, 1), "a", taus=[tau, tau])
    with pytest.raises(ValueError):
        runge.audit(igusa.JInvariants(1, 0, 0, 0, 1), "c")


def test_audit_general_n():
    r = runge.audit(igusa.JInvariants(1, 0, 0, 0, 1), "b", n=4)
    assert r.verdict is None
    assert r.condition["classification"] == "unavailable for n > 2"


def test_audit_deterministic(fixtures):
    tau = thetanum.SiegelPoint.from_json(json.loads((fixtures / "tau_diag.json").read_text()))
    J = igusa.JInvariants(2, 1, 1, 1, 1)
    dumps = {json.dumps(runge.audit(J, "b", taus=[tau], t=1.5).to_json()) for _ in range(3)}
    assert len(dumps) == 1
