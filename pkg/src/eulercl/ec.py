"""Genus-one models: biquadratic quartics, short Weierstrass cubics, invariants.

All formulas are ring-generic. They work on ints, Fractions, F_q and Z_q
elements and on sympy expressions, using only +, -, * and an exact division
helper.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .ff import FieldContext, FqElement, legendre, poly_mul, sqrt_fq
from .padic import ZqElement


class _Infinity:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INFINITY"

    def __str__(self):
        return "inf"

    def __reduce__(self):
        return (_Infinity, ())


INFINITY = _Infinity()


class NonIntegralJ(ArithmeticError):
    """Delta is a non-zero non-unit, so j is not integral at the working precision."""


@dataclass(frozen=True)
class QuarticModel:
    """y^2 = A x^4 + C x^2 + E."""

    A: object
    C: object
    E: object

    def rhs(self) -> list:
        return [self.E, 0, self.C, 0, self.A]


@dataclass(frozen=True)
class WeierstrassCurve:
    """v^2 = u^3 + A2 u^2 + A4 u + A6."""

    A2: object
    A4: object
    A6: object

    def rhs(self) -> list:
        return [self.A6, self.A4, self.A2, 1]


def is_zero(x) -> bool:
    if isinstance(x, (int, Fraction)):
        return x == 0
    if isinstance(x, (FqElement, ZqElement)):
        return x.is_zero()
    import sympy

    return sympy.expand(x) == 0


def _exact_div(x, d: int):
    if isinstance(x, int):
        if x % d:
            raise ArithmeticError(f"formula violation: {x} not divisible by {d}")
        return x // d
    if isinstance(x, (FqElement, ZqElement)):
        return x * x.ctx(d).inverse()
    return x / d


def quartic_to_weierstrass(q: QuarticModel) -> WeierstrassCurve:
    return WeierstrassCurve(q.C, -4 * q.A * q.E, -4 * q.A * q.C * q.E)


def c4(w: WeierstrassCurve):
    return 16 * w.A2 * w.A2 - 48 * w.A4


def c6(w: WeierstrassCurve):
    """Sign-normalised so that c4^3 - c6^2 = 1728 * Delta."""
    return 64 * w.A2 ** 3 - 288 * w.A2 * w.A4 + 864 * w.A6


def discriminant_1728(w: WeierstrassCurve):
    """Delta from 1728 Delta = c4^3 - c6^2, divided exactly."""
    return _exact_div(c4(w) ** 3 - c6(w) ** 2, 1728)


def discriminant_ace(q: QuarticModel):
    """Same Delta written directly in A, C, E."""
    A, C, E = q.A, q.C, q.E
    return _exact_div((16 * C * C + 192 * A * E) ** 3 - (64 * C ** 3 - 2304 * A * C * E) ** 2, 1728)


def j_invariant(w: WeierstrassCurve):
    """c4^3 / Delta, or INFINITY when Delta vanishes.

    Over Z_q a Delta that is non-zero but not a unit raises NonIntegralJ.
    """
    delta = discriminant_1728(w)
    num = c4(w) ** 3
    if is_zero(delta):
        return INFINITY
    if isinstance(delta, (int, Fraction)):
        return Fraction(num) / Fraction(delta)
    if isinstance(delta, ZqElement):
        if not delta.is_unit():
            raise NonIntegralJ("j not integral at working precision")
        return num * delta.inverse()
    if isinstance(delta, FqElement):
        return num * delta.inverse()
    import sympy

    return sympy.cancel(num / delta)


def hasse_invariant(fpoly: list, p: int | None = None):
    """Coefficient of x^(p-1) in f(x)^((p-1)/2) for y^2 = f(x).

    ``fpoly`` is a low-degree-first coefficient list of F_q elements, or of
    ints together with ``p`` (the result is then an int mod p).
    """
    elems = [c for c in fpoly if isinstance(c, FqElement)]
    if elems:
        ctx = elems[0].ctx
        p = ctx.p
        coeffs = [ctx(c) for c in fpoly]
    else:
        if p is None:
            raise ValueError("p required for integer coefficients")
        coeffs = [int(c) % p for c in fpoly]
    if p == 2:
        raise ValueError("characteristic 2 unsupported")
    while len(coeffs) > 1 and is_zero(coeffs[-1]):
        coeffs.pop()
    if len(coeffs) - 1 not in (3, 4):
        raise ValueError("expected a cubic or quartic right-hand side")
    power = [1]
    for _ in range((p - 1) // 2):
        power = poly_mul(power, coeffs)
        if not elems:
            power = [c % p for c in power]
    return power[p - 1] if p - 1 < len(power) else (coeffs[0] * 0)


def _require_smooth(w: WeierstrassCurve):
    if is_zero(discriminant_1728(w)):
        raise ValueError("singular curve")


def point_count(w: WeierstrassCurve) -> int:
    """#E(F_q) including the point at infinity, by an exhaustive x-scan."""
    _require_smooth(w)
    ctx: FieldContext = next(c.ctx for c in (w.A2, w.A4, w.A6) if isinstance(c, FqElement))
    a2, a4, a6 = ctx(w.A2), ctx(w.A4), ctx(w.A6)
    total = 1
    for x in ctx.elements():
        total += 1 + legendre(((x + a2) * x + a4) * x + a6)
    return total


def quartic_point_count(qm: QuarticModel) -> int:
    """Points on the smooth projective model of y^2 = A x^4 + C x^2 + E over F_q."""
    ctx = next(c.ctx for c in (qm.A, qm.C, qm.E) if isinstance(c, FqElement))
    A, C, E = ctx(qm.A), ctx(qm.C), ctx(qm.E)
    if A.is_zero():
        raise ValueError("leading coefficient vanishes")
    _require_smooth(quartic_to_weierstrass(QuarticModel(A, C, E)))
    total = 1 + legendre(A)  # two points above infinity iff A is a square
    for x in ctx.elements():
        x2 = x * x
        total += 1 + legendre((A * x2 + C) * x2 + E)
    return total


def _sqrt_exact(x):
    if isinstance(x, FqElement):
        return sqrt_fq(x)
    x = Fraction(x)
    if x < 0:
        return None
    n, d = math.isqrt(x.numerator), math.isqrt(x.denominator)
    if n * n == x.numerator and d * d == x.denominator:
        return Fraction(n, d)
    return None


def quartic_cubic_point_transfer(qm: QuarticModel, point):
    """Map (u, v) on the Weierstrass model to (x, y) on the quartic.

    x = 2 sqrt(E) (u + C) / v and y = -sqrt(E) + x^2 u / (2 sqrt(E)).
    """
    u, v = point
    if is_zero(qm.E):
        raise ValueError("transfer undefined over base field")
    s = _sqrt_exact(qm.E)
    if s is None:
        raise ValueError("transfer undefined over base field")
    if is_zero(v):
        raise ValueError("pole of the map")
    x = 2 * s * (u + qm.C) / v
    y = -s + x * x * u / (2 * s)
    if not is_zero(y * y - (qm.A * x ** 4 + qm.C * x * x + qm.E)):
        raise AssertionError("transferred point is off the quartic")
    return x, y


# j-invariants of the 13 imaginary quadratic orders of class number one,
# keyed by discriminant.
CM_J_BY_DISCRIMINANT = {
    -3: 0,
    -4: 1728,
    -7: -3375,
    -8: 8000,
    -11: -32768,
    -12: 54000,
    -16: 287496,
    -19: -884736,
    -27: -12288000,
    -28: 16581375,
    -43: -884736000,
    -67: -147197952000,
    -163: -262537412640768000,
}
CM_J_INVARIANTS = frozenset(CM_J_BY_DISCRIMINANT.values())


def is_rational_cm_j(j) -> bool:
    if j is INFINITY:
        return False
    return Fraction(j) in CM_J_INVARIANTS


def curve_with_j(jbar: FqElement) -> WeierstrassCurve:
    """Some short Weierstrass curve over F_q (p > 3) with the given j."""
    ctx = jbar.ctx
    if jbar.is_zero():
        return WeierstrassCurve(ctx.zero, ctx.zero, ctx.one)
    if jbar == 1728:
        return WeierstrassCurve(ctx.zero, ctx.one, ctx.zero)
    k = jbar / (1728 - jbar)
    return WeierstrassCurve(ctx.zero, 3 * k, 2 * k)


def is_supersingular_j(jbar: FqElement) -> bool:
    w = curve_with_j(jbar)
    return hasse_invariant(w.rhs()).is_zero()
