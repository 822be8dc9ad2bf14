from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from siegel_runge import qseries as qs
from siegel_runge.characteristics import EVEN_CHARS, ODD_CHARS
from siegel_runge.h6sign import FROZEN_SIGNS, derive_syzygous_signs
from siegel_runge.characteristics import syzygous_triples
from siegel_runge.identities import SIGMA_CORRECTED, SIGMA_PRINTED, unbalanced_terms, weight

ORDER = 12

keys = st.tuples(st.integers(0, 8), st.integers(-6, 6), st.integers(0, 8))
coeffs = st.fractions(min_value=-5, max_value=5, max_denominator=6)
series = st.dictionaries(keys, coeffs, max_size=8).map(lambda d: qs.QSeries(d, ORDER))


@given(series, series)
def test_mul_commutes(a, b):
    assert a * b == b * a


@given(series, series, series)
def test_ring_laws(a, b, c):
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert (a + b) - b == a
    assert a * qs.QSeries.one(ORDER) == a


@given(series, series)
def test_truncation_is_a_ring_map(a, b):
    assert (a * b).truncate(6) == a.truncate(6) * b.truncate(6)


@given(series)
def test_pow_matches_repeated_product(a):
    assert a**3 == a * a * a
    assert a**0 == qs.QSeries.one(ORDER)


@given(series)
def test_serialization_roundtrip(a):
    assert qs.QSeries.loads(a.dumps(), ORDER) == a


def test_negative_u_exponent_rejected():
    with pytest.raises(ValueError):
        qs.QSeries({(-1, 0, 0): 1}, 4)


@pytest.mark.parametrize("order", [8, 16, 33])
def test_theta_matches_lattice_oracle(order):
    for m in EVEN_CHARS:
        assert qs.theta_qexp(m, order) == qs.lattice_theta(m, order)


def test_theta_truncation_consistent():
    for m in EVEN_CHARS:
        assert qs.theta_qexp(m, 20).truncate(12) == qs.theta_qexp(m, 12)


def test_odd_thetas_vanish():
    for m in ODD_CHARS:
        assert qs.theta_qexp(m, 24, allow_odd=True).is_zero()
    with pytest.raises(ValueError):
        qs.theta_qexp(ODD_CHARS[0], 8)


def test_swap_symmetry():
    for m in EVEN_CHARS:
        assert qs.theta_qexp(m, 16).swap_uq() == qs.theta_qexp(m.swapped(), 16)
    for h in qs.hforms_qexp(16):
        assert h.swap_uq() == h


def test_hforms_leading_terms():
    h4, h6, h10, h12 = qs.hforms_qexp(16)
    assert h4.constant_term() == 2
    assert h4[(8, 0, 0)] == 480 and h4[(0, 0, 8)] == 480
    assert h6.constant_term() == 4
    assert h6[(0, 0, 8)] == -2016
    lowest = min(k[0] + k[2] for k, _ in h10.items())
    assert lowest == 16
    assert h10[(8, -4, 8)] == 8192


def test_golden_h10_against_lattice_oracle(fixtures):
    golden = qs.QSeries.loads((fixtures / "h10_order24.txt").read_text(), 24)
    prod = qs.QSeries.one(24)
    for m in EVEN_CHARS:
        t = qs.lattice_theta(m, 24)
        prod = prod * t * t
    assert golden == prod * 2
    assert golden == qs.hforms_qexp(24)[2]


def test_golden_h4_against_lattice_oracle(fixtures):
    golden = qs.QSeries.loads((fixtures / "h4_order24.txt").read_text(), 24)
    total = qs.QSeries.zero(24)
    for m in EVEN_CHARS:
        total = total + qs.lattice_theta(m, 24) ** 8
    assert golden == total / 2


def test_h6_signs_rederived():
    derived = derive_syzygous_signs()
    frozen = qs.h6_signs()
    assert derived == frozen
    assert sum(FROZEN_SIGNS) == sum(1 for t in syzygous_triples() if frozen[t] > 0)


def test_identity_tables_weights():
    for i, table in SIGMA_CORRECTED.items():
        assert all(weight(e) == 4 * i for _, e in table)
        assert unbalanced_terms(i, SIGMA_CORRECTED) == []
    assert [e for _, e in unbalanced_terms(7, SIGMA_PRINTED)] == [(2, 0, 0, 1)]


def test_corrected_sigma_identities_hold():
    res = qs.verify_sigma_identities(32, table="corrected")
    assert [e["status"] for e in res] == ["pass"] * 10
    assert all(e["order"] == 32 for e in res)


def test_printed_sigma3_and_sigma7_fail_at_a_frozen_monomial():
    res = {e["identity"]: e for e in qs.verify_sigma_identities(16, table="printed")}
    bad = sorted(k for k, e in res.items() if e["status"] == "fail")
    assert bad == ["Sigma_3", "Sigma_7"]
    d = res["Sigma_3"]["first_difference"]
    assert d["monomial"] == [8, -4, 8]
    assert Fraction(d["series"]) == 237056
    assert Fraction(d["formula"]) == Fraction(449024, 3)
    assert res["Sigma_7"]["weight_unbalanced_terms"] == [[2, 0, 0, 1]]


def test_printed_sigma3_coefficient_is_off_by_the_h12_term():
    # the difference at the first bad monomial is exactly (c - 11/2) * h12 there
    _, _, _, h12 = qs.hforms_qexp(16)
    res = {e["identity"]: e for e in qs.verify_sigma_identities(16, table="printed")}
    d = res["Sigma_3"]["first_difference"]
    gap = Fraction(d["formula"]) - Fraction(d["series"])
    assert gap == (Fraction(1, 6) - Fraction(11, 2)) * h12[(8, -4, 8)]


def test_embedding_relations():
    res = {e["relation"]: e for e in qs.verify_vdg_relations(12)}
    for k in ("linear_1", "linear_2", "linear_4", "linear_5", "quartic", "linear_3_corrected"):
        assert res[k]["status"] == "pass", k
    assert res["linear_3"]["status"] == "fail"
    assert res["linear_1_sign_flipped"]["status"] == "pass"
    assert res["linear_1_sign_flipped"]["expect_zero"] is False


def test_characteristic_classification():
    res = qs.verify_char_classification(8)
    assert res["status"] == "pass"
    assert res["proportional_even_pairs"] == []


def test_truncation_bound_decreases():
    b = [qs.theta_truncation_bound(n, 0.5) for n in (16, 64, 256)]
    assert b[0] > b[1] > b[2] > 0
