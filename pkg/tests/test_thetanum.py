import math
import random

import numpy as np
import pytest
from hypothesis import given, strategies as st

from siegel_runge import qseries as qs
from siegel_runge import thetanum as tn
from siegel_runge.characteristics import EVEN_CHARS, ODD_CHARS, char

TAU_A = tn.SiegelPoint(0.21 + 1.13j, 0.17 + 0.31j, -0.08 + 1.29j)
TAU_B = tn.SiegelPoint(-0.4 + 0.9j, 0.3 + 0.1j, 0.25 + 1.7j)


def test_siegel_point_validation():
    with pytest.raises(ValueError):
        tn.SiegelPoint(1j, 2j, 1j)  # Im tau not positive definite
    p = tn.SiegelPoint.from_json(TAU_A.to_json())
    assert p == TAU_A
    with pytest.raises(ValueError):
        tn.SiegelPoint.from_json({"tau1": [0, 1]})


def test_symplectic_generators():
    for g in (tn.J_MATRIX, tn.translation([[1, 0], [0, 0]]), tn.gl2_embed([[1, 1], [0, 1]])):
        assert g @ g.inverse() == tn.IDENTITY
    with pytest.raises(ValueError):
        tn.SymplecticMatrix.from_array(np.diag([2, 1, 1, 1]))


def test_action_is_a_group_action():
    rng = random.Random(3)
    for _ in range(10):
        g, h = tn.random_symplectic(rng), tn.random_symplectic(rng)
        lhs, _ = tn.symplectic_act(g @ h, TAU_A)
        inner, _ = tn.symplectic_act(h, TAU_A)
        rhs, _ = tn.symplectic_act(g, inner)
        assert np.allclose(lhs.matrix, rhs.matrix, atol=1e-9)


def test_cocycle_of_j():
    t, j = tn.symplectic_act(tn.J_MATRIX, TAU_A)
    assert abs(j - np.linalg.det(TAU_A.matrix)) < 1e-12
    assert np.allclose(t.matrix, -np.linalg.inv(TAU_A.matrix))


@pytest.mark.parametrize("tau", [TAU_A, TAU_B, tn.I_TAU])
def test_float_and_mpmath_backends_agree(tau):
    for m in EVEN_CHARS:
        a = tn.eval_theta(m, tau, 1e-12)
        b = tn.eval_theta(m, tau, 1e-14, backend="mpmath")
        assert abs(a - b) < 2e-12


def test_numeric_matches_series():
    lam = TAU_A.lambda_min()
    bound = qs.theta_truncation_bound(200, lam) + 1e-12
    for m in EVEN_CHARS:
        s = qs.theta_qexp(m, 200)
        assert abs(s.evaluate(TAU_A.tau1, TAU_A.tau2, TAU_A.tau4) - tn.eval_theta(m, TAU_A)) < bound + 1e-13


def test_odd_thetas_vanish_numerically():
    for m in ODD_CHARS:
        assert abs(tn.eval_theta(m, TAU_B)) < 1e-12


def test_eps_guard():
    with pytest.raises(ValueError):
        tn.eval_theta("0000", TAU_A, 1e-15)
    with pytest.raises(ValueError):
        tn.eval_theta("0000", TAU_A, 0)


def test_tail_bound_monotone():
    vals = [tn.tail_bound(0.5, R) for R in range(1, 8)]
    assert all(a > b for a, b in zip(vals, vals[1:]))
    R = tn.truncation_radius(0.5, 1e-12)
    assert tn.tail_bound(0.5, R) <= 5e-13 < tn.tail_bound(0.5, R - 1)


def test_diagonal_point_has_one_vanishing_theta():
    vec = tn.theta_vector(tn.I_TAU)
    zeros = [m for m, v in vec.values.items() if abs(v) < 1e-12]
    assert zeros == [char("1111")]
    assert tn.count_small(vec, 1e-6) == 1


def test_count_small():
    assert tn.count_small([1, 0.5, 0.1], 0.42) == 1
    assert tn.count_small([1, 1, 1], 0.42) == 0
    with pytest.raises(ValueError):
        tn.count_small([0, 0], 0.5)


def _ratio_multiset(tau):
    return tn.theta_vector(tau).ratios()


def test_ratio_multiset_invariance():
    rng = random.Random(11)
    ref = _ratio_multiset(TAU_B)
    for _ in range(20):
        g = tn.random_symplectic(rng, 5)
        t, _ = tn.symplectic_act(g, TAU_B)
        if t.lambda_min() < 0.05:
            continue
        assert np.allclose(_ratio_multiset(t), ref, atol=1e-8)


def test_reduction_certificate():
    rng = random.Random(5)
    for _ in range(30):
        g = tn.random_symplectic(rng, 8)
        t, _ = tn.symplectic_act(g, TAU_A)
        red, gamma = tn.reduce_to_F2(t)
        assert tn.is_in_F2(red)
        back, _ = tn.symplectic_act(gamma, t)
        assert np.allclose(back.matrix, red.matrix, atol=1e-9)
        assert np.allclose(_ratio_multiset(red), _ratio_multiset(TAU_A), atol=1e-8)


@given(st.floats(-3, 3), st.floats(-3, 3), st.floats(-3, 3),
       st.floats(0.2, 3), st.floats(-0.9, 0.9), st.floats(0.2, 3))
def test_reduction_lands_in_F2(x1, x2, x4, y1, c, y4):
    y2 = c * math.sqrt(y1 * y4)
    tau = tn.SiegelPoint(complex(x1, y1), complex(x2, y2), complex(x4, y4))
    red, _ = tn.reduce_to_F2(tau)
    assert tn.is_in_F2(red)


def test_reduced_point_is_fixed():
    red, _ = tn.reduce_to_F2(TAU_B)
    again, gamma = tn.reduce_to_F2(red)
    assert np.allclose(again.matrix, red.matrix, atol=1e-12)


def test_streng_bounds_on_samples():
    rng = random.Random(2024)
    for _ in range(60):
        assert tn.check_streng_bounds(tn.sample_F2(rng))


def test_streng_check_rejects_unreduced_input():
    with pytest.raises(ValueError):
        tn.check_streng_bounds(tn.SiegelPoint(0.9 + 0.2j, 0j, 1j))


def test_psi_point_error_bound():
    coords, err = tn.psi_point(TAU_A)
    assert len(coords) == 10 and 0 < err < 1e-9
