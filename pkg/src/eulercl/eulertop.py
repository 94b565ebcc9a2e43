"""Euler top: prime integrals, the fibre quartic and its elliptic invariants.

The invariant curves are E_c: H1 = c1, H2 = c2 with H1 = sum a_i x_i^2 and
H2 = sum x_i^2. Each is 2-isogenous to the quartic E'_c: y^2 = F(c1, c2, x).
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction

from .ec import (
    INFINITY,
    QuarticModel,
    WeierstrassCurve,
    c4,
    c6,
    discriminant_ace,
    hasse_invariant,
    is_rational_cm_j,
    is_zero,
    j_invariant,
    legendre,
    quartic_point_count,
    quartic_to_weierstrass,
)
from .ff import FieldContext, FqElement, is_prime
from .padic import PadicContext


def _coerce(x, ring):
    if ring is None:
        return x
    if isinstance(ring, FieldContext):
        return ring.from_rational(x) if isinstance(x, (int, Fraction)) else ring(x)
    return ring(x)


@dataclass(frozen=True)
class EulerParams:
    a1: object
    a2: object
    a3: object

    def __post_init__(self):
        a1, a2, a3 = self.a1, self.a2, self.a3
        if is_zero(a1 - a2) or is_zero(a2 - a3) or is_zero(a3 - a1):
            raise ValueError("a1, a2, a3 must be pairwise distinct")
        if is_zero(a1):
            raise ValueError("a1 must be non-zero")

    def as_tuple(self) -> tuple:
        return (self.a1, self.a2, self.a3)

    def over(self, ring) -> "EulerParams":
        """Map rational parameters into an F_q or Z_q context."""
        return EulerParams(*(_coerce(x, ring) for x in self.as_tuple()))


@dataclass(frozen=True)
class FiberParam:
    c1: object
    c2: object

    def over(self, ring) -> "FiberParam":
        return FiberParam(_coerce(self.c1, ring), _coerce(self.c2, ring))


@dataclass(frozen=True)
class SpaceModel:
    """The affine curve H1 - c1 = H2 - c2 = 0 in 3-space."""

    a: EulerParams
    c: FiberParam

    def residuals(self, x) -> tuple:
        x1, x2, x3 = x
        a1, a2, a3 = self.a.as_tuple()
        h1 = a1 * x1 * x1 + a2 * x2 * x2 + a3 * x3 * x3
        h2 = x1 * x1 + x2 * x2 + x3 * x3
        return h1 - self.c.c1, h2 - self.c.c2

    def contains(self, x) -> bool:
        return all(is_zero(r) for r in self.residuals(x))


@dataclass(frozen=True)
class FiberModels:
    quartic: QuarticModel
    space_model: SpaceModel


def fiber_models(a: EulerParams, c: FiberParam) -> FiberModels:
    return FiberModels(ace_coeffs(a, c), SpaceModel(a, c))


def euler_field_check(a: EulerParams | None = None) -> dict:
    """Apply the Euler derivation to H1 and H2 with exact polynomial arithmetic.

    With ``a`` None the parameters stay symbolic.
    """
    import sympy

    x1, x2, x3 = sympy.symbols("x1 x2 x3")
    if a is None:
        a1, a2, a3 = sympy.symbols("a1 a2 a3")
    else:
        a1, a2, a3 = (sympy.Rational(str(Fraction(v))) for v in a.as_tuple())

    def delta(h):
        return sympy.expand(
            (a2 - a3) * x2 * x3 * sympy.diff(h, x1)
            + (a3 - a1) * x3 * x1 * sympy.diff(h, x2)
            + (a1 - a2) * x1 * x2 * sympy.diff(h, x3)
        )

    H1 = a1 * x1 ** 2 + a2 * x2 ** 2 + a3 * x3 ** 2
    H2 = x1 ** 2 + x2 ** 2 + x3 ** 2
    d1, d2 = delta(H1), delta(H2)
    return {"delta_H1": d1, "delta_H2": d2, "delta_x1x2x3": delta(x1 * x2 * x3), "ok": d1 == 0 and d2 == 0}


def n_poly(a: EulerParams, c: FiberParam):
    """N(c) = prod (c1 - a_i c2)."""
    out = 1
    for ai in a.as_tuple():
        out = out * (c.c1 - ai * c.c2)
    return out


def quartic_F(a: EulerParams, c: FiberParam) -> list:
    """Coefficients of F(c1, c2, x), low degree first, from expanding the two factors."""
    a1, a2, a3 = a.as_tuple()
    c1, c2 = c.c1, c.c2
    p = [c1 - a2 * c2, 0, a2 - a3]
    r = [-c1 + a1 * c2, 0, a3 - a1]
    out = [0] * 5
    for i, u in enumerate(p):
        for k, v in enumerate(r):
            out[i + k] = out[i + k] + u * v
    return out


def ace_coeffs(a: EulerParams, c: FiberParam) -> QuarticModel:
    a1, a2, a3 = a.as_tuple()
    c1, c2 = c.c1, c.c2
    A = (a2 - a3) * (a3 - a1)
    C = (a2 - a3) * (a1 * c2 - c1) + (a3 - a1) * (c1 - a2 * c2)
    E = (c1 - a2 * c2) * (a1 * c2 - c1)
    return QuarticModel(A, C, E)


def fiber_j(a: EulerParams, c: FiberParam):
    return j_invariant(quartic_to_weierstrass(ace_coeffs(a, c)))


def isogeny_map(a: EulerParams, c: FiberParam, point) -> tuple:
    """(x1, x2, x3) on E_c to (x, y) = (x3, (a1 - a2) x1 x2) on E'_c."""
    if not SpaceModel(a, c).contains(point):
        raise ValueError("point not on E_c")
    x1, x2, x3 = point
    x, y = x3, (a.a1 - a.a2) * x1 * x2
    F = quartic_F(a, c)
    assert is_zero(y * y - sum(coef * x ** i for i, coef in enumerate(F))), "image off E'_c"
    return x, y


# -- point counts over F_q ----------------------------------------------------

def _field_of(a: EulerParams, c: FiberParam) -> FieldContext:
    for v in a.as_tuple() + (c.c1, c.c2):
        if isinstance(v, FqElement):
            return v.ctx
    raise TypeError("parameters must be F_q elements")


def space_model_points(a: EulerParams, c: FiberParam):
    """Affine F_q-points of E_c by exhaustive scan of F_q^3."""
    ctx = _field_of(a, c)
    model = SpaceModel(a, c)
    elems = list(ctx.elements())
    for x in itertools.product(elems, repeat=3):
        if model.contains(x):
            yield x


def space_model_count(a: EulerParams, c: FiberParam) -> int:
    """Points of the smooth projective model of E_c over F_q.

    Affine part: for each x3 the conditions fix x1^2 and x2^2 linearly.
    Points at infinity: projective solutions of sum a_i t_i^2 = sum t_i^2 = 0.
    """
    ctx = _field_of(a, c)
    a1, a2, a3 = (ctx(v) for v in a.as_tuple())
    c1, c2 = ctx(c.c1), ctx(c.c2)
    inv = (a1 - a2).inverse()
    total = 0
    for x3 in ctx.elements():
        s = x3 * x3
        s1 = ((a2 - a3) * s + c1 - a2 * c2) * inv
        s2 = ((a3 - a1) * s - c1 + a1 * c2) * inv
        total += (1 + legendre(s1)) * (1 + legendre(s2))
    elems = list(ctx.elements())
    reps = [(ctx.one, y, z) for y in elems for z in elems]
    reps += [(ctx.zero, ctx.one, z) for z in elems] + [(ctx.zero, ctx.zero, ctx.one)]
    for t1, t2, t3 in reps:
        sq = (t1 * t1, t2 * t2, t3 * t3)
        if (a1 * sq[0] + a2 * sq[1] + a3 * sq[2]).is_zero() and (sq[0] + sq[1] + sq[2]).is_zero():
            total += 1
    return total


def fiber_point_counts(a: EulerParams, c: FiberParam) -> tuple[int, int]:
    if is_zero(n_poly(a, c)):
        raise ValueError("singular fiber")
    return space_model_count(a, c), quartic_point_count(ace_coeffs(a, c))


def fiber_counts_agree(a: EulerParams, c: FiberParam) -> bool:
    space, quartic = fiber_point_counts(a, c)
    return space == quartic


# -- Hasse family ---------------------------------------------------------------

def hasse_family(a: EulerParams, p: int) -> dict[tuple[int, int], int]:
    """Coefficient of x^(p-1) in F(z1, z2, x)^((p-1)/2) as {(e1, e2): c mod p}.

    The result is homogeneous of degree (p-1)/2 in (z1, z2).
    """
    import sympy

    if p == 2 or not is_prime(p):
        raise ValueError("p must be an odd prime")
    red = []
    for v in a.as_tuple():
        v = Fraction(v)
        if v.denominator % p == 0:
            raise ValueError(f"{v} is not {p}-integral")
        red.append(v.numerator * pow(v.denominator, -1, p) % p)
    if len(set(red)) < 3:
        raise ValueError("parameters degenerate at p")
    z1, z2, x = sympy.symbols("z1 z2 x")
    F = quartic_F(EulerParams(*red), FiberParam(z1, z2))
    Fx = sympy.Poly(sum(coef * x ** i for i, coef in enumerate(F)), x, z1, z2, modulus=p)
    power = Fx ** ((p - 1) // 2)
    out = {}
    for (ex, e1, e2), coef in power.terms():
        if ex == p - 1:
            out[(e1, e2)] = int(coef) % p
    return out


def eval_hasse_family(poly: dict, z1, z2):
    total = 0
    for (e1, e2), coef in poly.items():
        total = total + coef * z1 ** e1 * z2 ** e2
    return total


# -- degeneration probe ---------------------------------------------------------

@dataclass(frozen=True)
class LimitRow:
    k: int
    eps: Fraction
    E: Fraction
    C: Fraction
    delta: Fraction
    j: Fraction


def j_limit_probe(a: EulerParams, c2, steps: int = 6) -> list[LimitRow]:
    """Approach the singular fibre c1 = a1 c2 along c1 = c2 (a1 + 10^-k)."""
    if steps < 3:
        raise ValueError("steps must be at least 3")
    a = EulerParams(*(Fraction(v) for v in a.as_tuple()))
    c2 = Fraction(c2)
    if c2 == 0:
        raise ValueError("degenerate: c2 = 0")
    rows = []
    for k in range(1, steps + 1):
        eps = Fraction(1, 10 ** k)
        qm = ace_coeffs(a, FiberParam(c2 * (a.a1 + eps), c2))
        delta = discriminant_ace(qm)
        j = fiber_j(a, FiberParam(c2 * (a.a1 + eps), c2))
        if j is INFINITY:
            raise ValueError("degenerate parameters: singular fibre along the probe")
        rows.append(LimitRow(k, eps, qm.E, qm.C, delta, j))
    c_limit = (a.a3 - a.a1) * (a.a1 - a.a2) * c2
    if ace_coeffs(a, FiberParam(a.a1 * c2, c2)).C != c_limit:
        raise AssertionError("C limit mismatch")
    for prev, cur in zip(rows, rows[1:]):
        assert abs(cur.E) < abs(prev.E), "|E| not decreasing"
        assert abs(cur.delta) < abs(prev.delta), "|Delta| not decreasing"
        assert abs(cur.C - c_limit) < abs(prev.C - c_limit), "C not approaching its limit"
        assert abs(cur.j) > abs(prev.j), "|j| not increasing"
    return rows


def c_limit(a: EulerParams, c2) -> Fraction:
    return (Fraction(a.a3) - Fraction(a.a1)) * (Fraction(a.a1) - Fraction(a.a2)) * Fraction(c2)


# -- the one-parameter family a = (2, 0, m), c = (1, 1) ------------------------------

def remark_weierstrass(m) -> WeierstrassCurve:
    """y^2 = x^3 - 2x^2 - 4m(2-m)x + 8m(2-m)."""
    return WeierstrassCurve(-2, -4 * m * (2 - m), 8 * m * (2 - m))


def cubic_j(a2, a4, a6) -> Fraction:
    """j of y^2 = x^3 + a2 x^2 + a4 x + a6 from the cubic's discriminant."""
    disc = a2 * a2 * a4 * a4 - 4 * a4 ** 3 - 4 * a2 ** 3 * a6 - 27 * a6 * a6 + 18 * a2 * a4 * a6
    return Fraction(256 * (a2 * a2 - 3 * a4) ** 3, disc)


def remark_j_rational_function():
    """(j, P6, P4) as sympy objects in m, with j = 1728 P6 / (P6 - P4)."""
    import sympy

    m = sympy.symbols("m")
    w = remark_weierstrass(m)
    P6 = sympy.expand(c4(w) ** 3)
    P4 = sympy.expand(c6(w) ** 2)
    j = sympy.cancel(1728 * P6 / (P6 - P4))
    return j, P6, P4, m


@dataclass(frozen=True)
class RemarkPrime:
    p: int
    n_unit: bool
    hasse_unit: bool | None
    verdict: str
    residual_valuation: int | None = None

    @property
    def qualifies(self) -> bool:
        return self.n_unit and bool(self.hasse_unit)


@dataclass
class RemarkReport:
    m: int
    quartic: list
    weierstrass: WeierstrassCurve
    j: Fraction
    is_cm: bool
    primes: list[RemarkPrime] = field(default_factory=list)

    def qualifying(self) -> list[RemarkPrime]:
        return [r for r in self.primes if r.qualifies]


def remark_family(m: int, p_bound: int = 100, N: int = 8) -> RemarkReport:
    """a = (2, 0, m), c = (1, 1): j, CM lookup, and per-prime ordinary/CL verdicts.

    Primes 2 and 3 are skipped. Primes dividing m(m-2) give bad reduction.
    """
    from .cl import cl_test, shipped_levels, shipped_modular_poly

    if m in (0, 2):
        raise ValueError("m must differ from 0 and 2")
    a = EulerParams(2, 0, m)
    c = FiberParam(1, 1)
    F = quartic_F(a, c)
    j = fiber_j(a, c)
    report = RemarkReport(m, F, remark_weierstrass(m), j, is_rational_cm_j(j))
    levels = set(shipped_levels())
    for p in range(5, p_bound + 1):
        if not is_prime(p):
            continue
        n_unit = (m - 1) % p != 0
        if (m * (m - 2)) % p == 0:
            report.primes.append(RemarkPrime(p, n_unit, None, "bad reduction"))
            continue
        h = hasse_invariant([x % p for x in F], p)
        hasse_unit = h % p != 0
        if not (n_unit and hasse_unit):
            verdict = "supersingular" if not hasse_unit else "N not a unit"
            report.primes.append(RemarkPrime(p, n_unit, hasse_unit, verdict))
            continue
        if p not in levels:
            report.primes.append(RemarkPrime(p, n_unit, hasse_unit, "no modular polynomial"))
            continue
        ctx = PadicContext(p, 1, N)
        v = cl_test(ctx.from_rational(j), shipped_modular_poly(p), ordinary=True)
        verdict = "CL candidate" if v.is_cl_candidate else "not CL"
        report.primes.append(RemarkPrime(p, n_unit, hasse_unit, verdict, v.residual_valuation))
    return report


def scale_params(a: EulerParams, c: FiberParam, lam, mu=1) -> tuple[EulerParams, FiberParam]:
    """a -> lam a, c1 -> lam mu c1, c2 -> mu c2.

    A, C, E pick up lam^2, lam^2 mu and lam^2 mu^2, a Weierstrass rescaling,
    so j is unchanged. N(c) only scales when c1 and a_i c2 move together.
    """
    return (
        EulerParams(*(lam * v for v in a.as_tuple())),
        FiberParam(lam * mu * c.c1, mu * c.c2),
    )

