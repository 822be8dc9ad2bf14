"""One test per acceptance criterion; each records a PASS/FAIL line shown in the pytest summary."""
import math
import random
from fractions import Fraction as F

import numpy as np
import sympy as sp

from conftest import ACCEPTANCE_LINES
from siegel_runge import igusa, padic, qseries, runge, thetanum
from siegel_runge.characteristics import EVEN_CHARS, char
from siegel_runge.igusa import CurveSextic, JInvariants


def report(n, ok, detail):
    line = f"criterion {n}: {'PASS' if ok else 'FAIL'} - {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


def test_criterion_1_sigma_identities():
    res = qseries.verify_sigma_identities(64, table="printed")
    bad = [e["identity"] for e in res if e["status"] != "pass"]
    report(1, not bad, f"order 64, printed table; failing: {bad or 'none'}")


def test_criterion_2_embedding_relations():
    res = {e["relation"]: e for e in qseries.verify_vdg_relations(16)}
    printed = [f"linear_{k}" for k in range(1, 6)] + ["quartic"]
    bad = [k for k in printed if res[k]["status"] != "pass"]
    flip = res["linear_1_sign_flipped"]["nonzero_terms"] > 0
    report(2, not bad and flip, f"order 16; failing: {bad or 'none'}; sign flip on x1111 nonzero: {flip}")


def test_criterion_3_characteristics():
    res = qseries.verify_char_classification(8)
    report(3, res["status"] == "pass",
           f"six singular series zero: {res['zero_series']}; proportional even pairs: {res['proportional_even_pairs']}")


def test_criterion_4_numeric_vs_series():
    rng = random.Random(404)
    order = 256
    series = {m: qseries.theta_qexp(m, order) for m in EVEN_CHARS}
    worst, worst_bound = 0.0, 0.0
    ok = True
    for _ in range(20):
        tau = thetanum.sample_F2(rng, 2.0)
        bound = qseries.theta_truncation_bound(order, tau.lambda_min()) + 1e-12
        worst_bound = max(worst_bound, bound)
        for m in EVEN_CHARS:
            d = abs(series[m].evaluate(tau.tau1, tau.tau2, tau.tau4) - thetanum.eval_theta(m, tau, 1e-12))
            worst = max(worst, d)
            ok &= d <= bound
    ok &= worst_bound <= 1e-10
    report(4, ok, f"20 points, max |diff| {worst:.2e}, max combined bound {worst_bound:.2e}")


def test_criterion_5_diagonal():
    coords, err = thetanum.psi_point(thetanum.I_TAU)
    top = max(abs(c) for c in coords)
    zeros = [str(m) for m, c in zip(EVEN_CHARS, coords) if abs(c) <= max(err, 1e-12 * top)]
    report(5, zeros == [str(char("1111"))], f"vanishing psi coordinates at i*I2: {zeros}")


def test_criterion_6_archimedean():
    rng = random.Random(606)
    samples = [thetanum.sample_F2(rng, 2.5) for _ in range(1000)]
    samples += [thetanum.sample_F2(rng, t) for t in (1.0, 2.0) for _ in range(100)]
    vecs = [thetanum.theta_vector(s) for s in samples]
    worst_a = max(thetanum.count_small(v, 0.42) for v in vecs)
    worst_b = {}
    for t in (math.sqrt(3) / 2, 1.0, 2.0):
        sel = [v for s, v in zip(samples, vecs) if s.tau4.imag <= t]
        worst_b[round(t, 3)] = (len(sel), max((thetanum.count_small(v, 1.22 * math.exp(-math.pi * t)) for v in sel),
                                              default=0))
    # tightest admissible t for every sample: t = y4
    tight = max(thetanum.count_small(v, 1.22 * math.exp(-math.pi * s.tau4.imag)) for s, v in zip(samples, vecs))
    inv = 0.0
    for k in range(100):
        tau = samples[k]
        g = thetanum.random_symplectic(rng, 6)
        img, _ = thetanum.symplectic_act(g, tau)
        inv = max(inv, float(np.max(np.abs(np.array(thetanum.theta_vector(img).ratios())
                                           - np.array(vecs[k].ratios())))))
    ok = worst_a <= 6 and all(c <= 1 for _, c in worst_b.values()) and tight <= 1 and inv <= 1e-8
    report(6, ok, f"{len(samples)} samples; max count(0.42) {worst_a}; by t (n, max count) {worst_b}; "
                  f"t = y4 max {tight}; Sp4 ratio drift {inv:.1e}")


def test_criterion_7_newton_polygons():
    rng = random.Random(707)
    hull_ok = True
    for _ in range(400):
        k = rng.randint(2, 12)
        xs = rng.sample(range(25), k)
        pts = [(x, F(rng.randint(-40, 40), rng.randint(1, 5))) for x in xs]
        hull_ok &= padic.newton_polygon(pts).vertices == padic.newton_polygon_bruteforce(pts)
    a = padic.theta8_ratio_derivation("jacobian")
    b = padic.theta8_ratio_derivation("product")
    slope_ok = (a["lowest_slope_bound"], a["highest_slope_bound"]) == ("-34/5", "26/5")
    exp_ok = padic.theta8_ratio_bound("jacobian", 1) == 12 and padic.theta8_ratio_bound("product", 1) == 21
    exp_ok &= a["certified"] and b["certified"]
    bad = [f"{d['table']}[{d['i']}] published {d['published']} recomputed {d['recomputed']}"
           for d in padic.lambda_discrepancies("printed") if not d["agree"]]
    report(7, hull_ok and slope_ok and exp_ok and not bad,
           f"hull oracle {hull_ok}; case a slopes {slope_ok}; exponents 12/21 {exp_ok}; "
           f"lambda disagreements: {bad or 'none'}")


def test_criterion_8_bounds():
    a = runge.bound_case_a()
    ok = abs(a.value - (-4 * math.log(0.42) + 10.5 * math.log(2))) < 1e-12 and a.value <= 10.75
    for t in (math.sqrt(3) / 2, 1.0, 2.0, 5.0):
        b = runge.bound_case_b(t)
        ok &= abs(round(b.value - 4 * math.pi * t, 2) - 6.14) < 1e-3  # tolerance applies to the displayed rounding
        ok &= abs(b.display - (4 * math.pi * t + 6.14)) < 1e-12
        ok &= math.isclose(runge.faltings_bound("b", t), 2 * math.pi * t + 535 * math.log(2 * math.pi * t + 9))
    ok &= runge.faltings_bound("a") == 1070
    slack = runge.bound_case_b(1).value - 4 * math.pi
    report(8, ok, f"case a {a.value:.4f} <= 10.75; case b slack {slack:.4f} displayed 6.14; Faltings 1070 and closed form")


def _random_sextic(rng):
    cs = [rng.randint(-9, 9) for _ in range(6)] + [rng.choice([-3, -2, -1, 1, 2, 3])]
    return cs


def test_criterion_9_igusa_pipeline():
    rng = random.Random(909)
    x = sp.symbols("x")
    ratios = set()
    done = 0
    while done < 50:
        cs = _random_sextic(rng)
        f = sp.Poly(list(reversed(cs)), x)
        res = sp.resultant(f.as_expr(), sp.diff(f.as_expr(), x), x)
        if res == 0:
            continue
        I10 = igusa.igusa_clebsch(CurveSextic(cs))[3]
        ratios.add(F(I10) / F(int(res)) * cs[6])
        done += 1
    prop_ok = len(ratios) == 1
    ser = igusa.series_h_identities(108, include_i12=True)
    ser_ok = ser["I4"] and ser["I12"] and ser["I12_nonvacuous"]
    fx_ok = all(igusa.good_jacobian_test(JInvariants(1, 0, 0, 0, 1), p)[0] for p in (2, 3, 5, 7))
    fx_ok &= not igusa.good_jacobian_test(JInvariants(1, 0, 0, 0, 2), 2)[0]
    fx_ok &= igusa.good_jacobian_test(JInvariants(2, 1, 1, 1, 1), 2) == (True, (5, 0, 0, 0))
    report(9, prop_ok and ser_ok and fx_ok,
           f"I10 / (res(f,f')/a6) constant on 50 sextics: {sorted(ratios)}; series I4, I12 at order 108: {ser_ok}; "
           f"fixtures {fx_ok}")


def test_criterion_10_condition_tables():
    ok = [runge.tubular_runge_condition(2, s) for s in range(1, 21)] == [s < 10 for s in range(1, 21)]
    ok &= runge.tubular_runge_condition(4, 9) and not runge.tubular_runge_condition(4, 10)
    ok &= runge.curve_runge_condition(1, 2)
    ok &= all(runge.regular_classes_bruteforce(n) == runge.divisor_count(n) for n in (2, 4))
    ok &= runge.audit(JInvariants(1, 0, 0, 0, 1), "a").verdict is True
    report(10, ok, "headline finiteness not reproducible at desk scale; condition truth tables and divisor counts hold")
