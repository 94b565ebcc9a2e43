"""Acceptance criteria, one test per criterion.

Each test prints a PASS/FAIL line and records it for the terminal summary.
"""
import random
import time
from fractions import Fraction

import pytest
import sympy

from conftest import ACCEPTANCE_RESULTS
from eulercl.cl import (
    canonical_lift_digitwise,
    cl_test,
    eval_modpoly,
    exhaustive_cl_solutions,
    kronecker_check,
    shipped_modular_poly,
)
from eulercl.ec import (
    CM_J_INVARIANTS,
    INFINITY,
    QuarticModel,
    c4,
    discriminant_1728,
    discriminant_ace,
    hasse_invariant,
    is_supersingular_j,
    j_invariant,
    quartic_to_weierstrass,
)
from eulercl.eulertop import (
    EulerParams,
    FiberParam,
    euler_field_check,
    fiber_counts_agree,
    isogeny_map,
    j_limit_probe,
    n_poly,
    quartic_F,
    remark_family,
    remark_j_rational_function,
    remark_weierstrass,
    space_model_points,
)
from eulercl.ff import FieldContext
from eulercl.padic import PadicContext, sigma_power, teichmuller
from eulercl.survey import SurveyConfig, oracle_recount, survey_run


def report(key, label, ok, started=None, limit=None):
    elapsed = "" if started is None else f" ({time.perf_counter() - started:.1f}s"
    if started is not None:
        elapsed += f", limit {limit}s)" if limit else ")"
    status = "PASS" if ok else "FAIL"
    ACCEPTANCE_RESULTS[key] = (status, label + elapsed)
    print(f"ACCEPTANCE {key} {label}: {status}{elapsed}")
    return ok


def test_1_formula_identities():
    t0 = time.perf_counter()
    rng = random.Random(1)
    ok = True
    for _ in range(200):
        A, C, E = (Fraction(rng.randint(-10 ** 4, 10 ** 4), rng.randint(1, 500)) for _ in range(3))
        q = QuarticModel(A, C, E)
        w = quartic_to_weierstrass(q)
        delta = discriminant_1728(w)
        ok &= 1728 * delta == (16 * C * C + 192 * A * E) ** 3 - (64 * C ** 3 - 2304 * A * C * E) ** 2
        ok &= delta == discriminant_ace(q)
        if delta != 0:
            ok &= j_invariant(w) * delta == (16 * C * C + 192 * A * E) ** 3
    assert report("1", "formula identities (200 random rational A, C, E)", ok, t0, 1)


def test_2_prime_integrals():
    t0 = time.perf_counter()
    res = euler_field_check()
    ok = res["delta_H1"] == 0 and res["delta_H2"] == 0
    assert report("2", "prime integrals delta H1 = delta H2 = 0 symbolically", ok, t0, 1)


def test_3_one_parameter_family():
    t0 = time.perf_counter()
    m, x = sympy.symbols("m x")
    F = quartic_F(EulerParams(2, 0, m), FiberParam(1, 1))
    ok = sympy.expand(sum(c * x ** i for i, c in enumerate(F)) - (m * (2 - m) * x ** 4 - 2 * x ** 2 + 1)) == 0
    w = quartic_to_weierstrass(QuarticModel(F[4], F[2], F[0]))
    wr = remark_weierstrass(m)
    ok &= all(sympy.expand(u - v) == 0 for u, v in ((w.A2, wr.A2), (w.A4, wr.A4), (w.A6, wr.A6)))
    ok &= sympy.expand(wr.A4 + 4 * m * (2 - m)) == 0 and sympy.expand(wr.A6 - 8 * m * (2 - m)) == 0
    j, P6, P4, _ = remark_j_rational_function()
    num, _den = sympy.fraction(sympy.cancel(j))
    ok &= sympy.degree(num, m) == 6 and sympy.degree(P6, m) == 6 and sympy.degree(P4, m) == 4
    checked = 0
    for mm in range(3, 13):
        rep = remark_family(mm, 100, 8)
        ok &= rep.j not in CM_J_INVARIANTS and not rep.is_cm
        ok &= rep.j == Fraction(str(j.subs(m, mm)))
        for r in rep.primes:
            if (mm * (mm - 2)) % r.p == 0:
                # a_i collide mod p, so the fibre has bad reduction: Delta = 0 mod p
                qm = QuarticModel(Fraction(F[4].subs(m, mm)), -2, 1)
                ok &= discriminant_ace(qm) % r.p == 0 and r.verdict == "bad reduction"
                continue
            if r.qualifies:
                checked += 1
                ok &= r.verdict == "not CL" and r.residual_valuation < 8
    ok &= checked > 100
    assert report("3", f"family a=(2,0,m), c=(1,1), m=3..12, p<=100 ({checked} qualifying (m, p) pairs not CL)", ok, t0, 30)


def test_4_modular_polynomial_integrity():
    t0 = time.perf_counter()
    ok = all(kronecker_check(shipped_modular_poly(level)) for level in (2, 3, 5, 7, 11, 13))
    phi2 = shipped_modular_poly(2)
    ok &= eval_modpoly(phi2, 1728, 287496) == 0 and eval_modpoly(phi2, 0, 54000) == 0
    mp = shipped_modular_poly(7)
    coeffs = dict(mp.coeffs)
    coeffs[(3, 2)] = coeffs.get((3, 2), 0) + 1
    coeffs[(2, 3)] = coeffs[(3, 2)]
    ok &= not kronecker_check(type(mp)(7, coeffs))
    assert report("4", "modular polynomial integrity and perturbed negative control", ok, t0, 5)


def test_5a_cl_positive_controls():
    t0 = time.perf_counter()
    v5 = cl_test(PadicContext(5, 1, 8)(1728), shipped_modular_poly(5))
    v7 = cl_test(PadicContext(7, 1, 8)(0), shipped_modular_poly(7))
    ok = v5.is_cl_candidate and v5.residual_valuation >= 8 and v7.is_cl_candidate and v7.residual_valuation >= 8
    assert report("5.a", "CL positive controls (5, 1728) and (7, 0) saturate at N=8", ok, t0, 1)


def test_5b_cl_negative_control_not_candidate():
    v = cl_test(PadicContext(5, 1, 8)(8), shipped_modular_poly(5))
    ok = v.ordinary and not v.is_cl_candidate and v.residual_valuation < 8
    assert report("5.b", f"CL negative control (5, 8) is not a candidate (residual {v.residual_valuation})", ok)


@pytest.mark.xfail(strict=True, reason="residual of (5, 8) is exactly 2: both Kronecker factors vanish for j in Z_p")
def test_5c_cl_negative_control_residual_at_most_one():
    v = cl_test(PadicContext(5, 1, 8)(8), shipped_modular_poly(5))
    ok = v.residual_valuation <= 1
    report("5.c", f"CL negative control residual <= 1 (observed {v.residual_valuation})", ok)
    assert ok


def test_6_oracle_equivalence():
    t0 = time.perf_counter()
    ok = True
    for p in (5, 7, 11, 13):
        ctx = PadicContext(p, 1, 4)
        mp = shipped_modular_poly(p)
        exhaustive = exhaustive_cl_solutions(ctx, mp)
        by_residue = {}
        for x in exhaustive:
            by_residue.setdefault(x.residue(), set()).add(x)
        for jbar in ctx.residue.elements():
            if is_supersingular_j(jbar):
                continue
            ok &= set(canonical_lift_digitwise(jbar, ctx, mp)) == by_residue.get(jbar, set())
    assert report("6", "digitwise oracle equals exhaustive enumeration, p in {5,7,11,13}, N=4", ok, t0, 120)


def test_7_isogeny_invariance():
    t0 = time.perf_counter()
    ok = True
    for p in (11, 13):
        F = FieldContext(p)
        a = EulerParams(2, 0, 5).over(F)
        fibers = [
            FiberParam(F(c1), F(c2))
            for c2 in range(1, p)
            for c1 in range(p)
            if not n_poly(EulerParams(2, 0, 5).over(F), FiberParam(F(c1), F(c2))).is_zero()
        ][:20]
        ok &= len(fibers) == 20
        for c in fibers:
            ok &= fiber_counts_agree(a, c)
            for pt in space_model_points(a, c):
                isogeny_map(a, c, pt)
    assert report("7", "space and quartic point counts agree on 20 smooth fibres over F_11 and F_13", ok, t0, 60)


def test_8_degeneration():
    t0 = time.perf_counter()
    a = EulerParams(2, 0, 5)
    rows = j_limit_probe(a, 1, 6)
    pairs = list(zip(rows, rows[1:]))
    ok = all(abs(b.E) < abs(x.E) and abs(b.delta) < abs(x.delta) and abs(b.j) > abs(x.j) for x, b in pairs)
    ok &= all(abs(b.C - 6) < abs(x.C - 6) for x, b in pairs)
    c1 = sympy.symbols("c1")
    C_expr = (0 - 5) * (2 * 1 - c1) + (5 - 2) * (c1 - 0)
    ok &= C_expr.subs(c1, 2) == 6
    ok &= rows[0].E == Fraction(-21, 100)
    assert report("8", "j limit probe: |E|, |Delta| decrease, C -> 6, |j| increases", ok, t0, 1)


def test_9_survey_determinism_and_scarcity():
    t0 = time.perf_counter()
    runs = [survey_run(SurveyConfig(13, 2, 6, (2, 0, 5), 0, workers=w)) for w in (1, 1, 1, 8, 8, 8)]
    texts = {r.csv_text() for r in runs}
    ok = len(texts) == 1
    report9 = runs[0]
    counts = report9.counts()
    oracle, disagreements = oracle_recount(report9.config, report9.records)
    ok &= oracle == counts["CLCandidate"] and not disagreements
    ok &= counts["CLCandidate"] == 2  # frozen from the digit-oracle recount
    ok &= counts["OrdinaryNotCL"] >= 0.9 * len(report9.records)
    ok &= len(report9.records) == 168
    label = (
        f"survey (13, 2, 6): byte-identical over 3 runs at widths 1 and 8, CLCandidate {counts['CLCandidate']} = oracle {oracle}, "
        f"OrdinaryNotCL {counts['OrdinaryNotCL']}/168"
    )
    assert report("9", label, ok, t0, 180)


def test_10_teichmuller_frobenius():
    t0 = time.perf_counter()
    ok = True
    rng = random.Random(10)
    for p, f in ((5, 1), (7, 1), (11, 1), (13, 1), (5, 2), (7, 2)):
        ctx = PadicContext(p, f, 8)
        q = p ** f
        for xbar in ctx.residue.elements():
            if not xbar.is_zero():
                ok &= teichmuller(xbar, ctx) ** (q - 1) == 1
        for _ in range(500):
            x = ctx([rng.randrange(ctx.pN) for _ in range(f)])
            ok &= sigma_power(x, f) == x
    assert report("10", "Teichmuller roots of unity and sigma^f = id, q in {5,7,11,13,25,49}", ok, t0, 30)
