import random

import pytest
from hypothesis import given, strategies as st

from eulercl.cl import (
    LiftSet,
    ModularPolynomialError,
    canonical_lift_digitwise,
    cl_test,
    cm_spot_checks,
    eval_modpoly,
    exhaustive_cl_solutions,
    kronecker_check,
    load_modular_poly,
    parse_modular_poly,
    phi_sigma_residual,
    shipped_levels,
    shipped_modular_poly,
    two_isogeny_related,
)
from eulercl.ec import is_supersingular_j
from eulercl.ff import FieldContext
from eulercl.padic import PadicContext, frobenius_sigma

PHI2 = {
    (3, 0): 1,
    (2, 2): -1,
    (2, 1): 1488,
    (2, 0): -162000,
    (1, 1): 40773375,
    (1, 0): 8748000000,
    (0, 0): -157464000000000,
}


def phi2_reference(x, y):
    total = 0
    for (i, k), c in PHI2.items():
        total += c * x ** i * y ** k
        if i != k:
            total += c * x ** k * y ** i
    return total


def test_phi2_matches_classical_coefficients():
    mp = shipped_modular_poly(2)
    expected = {}
    for (i, k), c in PHI2.items():
        expected[(i, k)] = expected[(k, i)] = c
    assert mp.coeffs == expected


def test_shipped_levels_include_small_primes():
    assert {2, 3, 5, 7, 11, 13} <= set(shipped_levels())


@pytest.mark.parametrize("level", [2, 3, 5, 7, 11, 13, 17, 53, 97])
def test_kronecker_and_cm_checks(level):
    mp = shipped_modular_poly(level)
    assert kronecker_check(mp)
    checks = cm_spot_checks(mp)
    assert checks and all(ok for _, _, ok in checks)
    assert mp.degree == level + 1


def test_kronecker_negative_control():
    mp = shipped_modular_poly(5)
    coeffs = dict(mp.coeffs)
    coeffs[(5, 5)] += 1
    bad = type(mp)(5, coeffs)
    assert not kronecker_check(bad)


def test_exact_evaluations():
    mp = shipped_modular_poly(2)
    assert eval_modpoly(mp, 1728, 287496) == 0
    assert eval_modpoly(mp, 0, 54000) == 0
    assert eval_modpoly(mp, 0, 1) != 0
    assert eval_modpoly(mp, 0, 0) == -157464000000000
    assert eval_modpoly(shipped_modular_poly(5), 1728, 1728) == 0
    assert eval_modpoly(shipped_modular_poly(7), 0, 0) == 0
    assert two_isogeny_related(1728, 287496)
    assert not two_isogeny_related(0, 0)


@given(st.integers(-10 ** 6, 10 ** 6), st.integers(-10 ** 6, 10 ** 6))
def test_phi2_evaluation_matches_reference(x, y):
    assert eval_modpoly(shipped_modular_poly(2), x, y) == phi2_reference(x, y)


@given(st.integers(0, 7 ** 6 - 1), st.integers(0, 7 ** 6 - 1))
def test_zq_evaluation_matches_exact(x, y):
    ctx = PadicContext(7, 1, 6)
    mp = shipped_modular_poly(7)
    assert eval_modpoly(mp, ctx(x), ctx(y)) == ctx(eval_modpoly(mp, x, y))


def test_reduced_table_refuses_exact_or_high_precision():
    mp = shipped_modular_poly(17)
    assert mp.modulus == 17 ** 20
    with pytest.raises(ModularPolynomialError):
        eval_modpoly(mp, 1, 2)
    with pytest.raises(ModularPolynomialError):
        eval_modpoly(mp, PadicContext(17, 1, 21)(1), PadicContext(17, 1, 21)(1))


def test_parse_errors(tmp_path):
    with pytest.raises(ModularPolynomialError, match="empty"):
        parse_modular_poly("")
    with pytest.raises(ModularPolynomialError, match=":2:"):
        parse_modular_poly("p 2\n[3,0 1\n")
    with pytest.raises(ModularPolynomialError, match="asymmetric"):
        parse_modular_poly("p 2\n[3,0] 1\n[2,1] 5\n[1,2] 6\n")
    with pytest.raises(ModularPolynomialError, match="degree"):
        parse_modular_poly("p 3\n[3,0] 1\n")
    mirror_only = "p 2\n# comment\n[3,0] 1\n[1,2] 7\n"
    mp = parse_modular_poly(mirror_only)
    assert mp.coeffs[(2, 1)] == mp.coeffs[(1, 2)] == 7
    path = tmp_path / "phi.txt"
    path.write_text(mirror_only)
    assert load_modular_poly(path).coeffs == mp.coeffs


def test_positive_and_negative_controls():
    mp5 = shipped_modular_poly(5)
    ctx = PadicContext(5, 1, 8)
    v = cl_test(ctx(1728), mp5)
    assert v.ordinary and v.is_cl_candidate and v.residual_valuation == 8 and v.special_j
    v = cl_test(PadicContext(7, 1, 8)(0), shipped_modular_poly(7))
    assert v.is_cl_candidate
    v = cl_test(ctx(8), mp5)
    assert v.ordinary and not v.is_cl_candidate
    # both Kronecker factors vanish at any j in Z_p, so the residual is at least 2
    assert v.residual_valuation == 2


def test_supersingular_verdict():
    ctx = PadicContext(5, 1, 6)
    v = cl_test(ctx(0), shipped_modular_poly(5))
    assert not v.ordinary and not v.is_cl_candidate
    assert "supersingular" in v.describe()


@pytest.mark.parametrize("p,f", [(5, 2), (7, 2), (13, 2)])
def test_sigma_symmetry(p, f):
    ctx = PadicContext(p, f, 5)
    mp = shipped_modular_poly(p)
    rng = random.Random(p)
    for _ in range(10):
        j = ctx([rng.randrange(ctx.pN) for _ in range(f)])
        sj = frobenius_sigma(j)
        assert eval_modpoly(mp, j, sj).valuation() == eval_modpoly(mp, sj, j).valuation()


def test_residual_monotone_in_precision():
    mp = shipped_modular_poly(11)
    rng = random.Random(5)
    for _ in range(40):
        x = rng.randrange(11 ** 8)
        hi = phi_sigma_residual(mp, PadicContext(11, 1, 8)(x)).valuation()
        lo = phi_sigma_residual(mp, PadicContext(11, 1, 4)(x)).valuation()
        assert lo == min(hi, 4)


def test_digitwise_contains_1728():
    ctx = PadicContext(5, 1, 4)
    sols = canonical_lift_digitwise(FieldContext(5)(3), ctx, shipped_modular_poly(5))
    assert ctx(478) in sols
    assert cl_test(ctx(478), shipped_modular_poly(5)).is_cl_candidate


@pytest.mark.parametrize("p", [5, 7])
def test_digitwise_equals_exhaustive(p):
    ctx = PadicContext(p, 1, 4)
    mp = shipped_modular_poly(p)
    exhaustive = exhaustive_cl_solutions(ctx, mp)
    for jbar in ctx.residue.elements():
        if is_supersingular_j(jbar):
            continue
        sols = canonical_lift_digitwise(jbar, ctx, mp)
        assert set(sols) == {x for x in exhaustive if x.residue() == jbar}
        assert len(sols) == len(set(sols))


@pytest.mark.parametrize("p,f,N", [(5, 2, 3), (5, 2, 4), (7, 2, 3), (5, 3, 2)])
def test_shortcut_agrees_with_plain_search(p, f, N):
    ctx = PadicContext(p, f, N)
    mp = shipped_modular_poly(p)
    for jbar in list(ctx.residue.elements())[:10]:
        if is_supersingular_j(jbar):
            continue
        fast = canonical_lift_digitwise(jbar, ctx, mp)
        slow = canonical_lift_digitwise(jbar, ctx, mp, shortcut=False)
        assert set(fast) == set(slow)
        for x in list(fast)[:5]:
            assert x in fast and phi_sigma_residual(mp, x).valuation() == N


def test_liftset_behaviour():
    ctx = PadicContext(13, 2, 6)
    mp = shipped_modular_poly(13)
    jbar = ctx.residue((1, 1))
    sols = canonical_lift_digitwise(jbar, ctx, mp)
    assert isinstance(sols, LiftSet)
    assert len(sols) % ctx.residue.q == 0
    assert "nonsense" not in sols


def test_digitwise_rejects_supersingular():
    ctx = PadicContext(5, 1, 3)
    with pytest.raises(ValueError):
        canonical_lift_digitwise(ctx.residue(0), ctx, shipped_modular_poly(5))
