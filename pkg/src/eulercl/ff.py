"""Finite fields F_p and F_q = F_p[t]/(u(t)) with small q.

Elements carry their context so the generic curve formulas elsewhere in the
package can use ordinary operators on them.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property

MAX_DEGREE = 4


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


# -- polynomials over F_p, coefficient lists low degree first ---------------

def _trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _pmod(a: list[int], m: list[int], p: int) -> list[int]:
    a = [c % p for c in a]
    _trim(a)
    inv = pow(m[-1], -1, p)
    dm = len(m) - 1
    while len(a) - 1 >= dm:
        c = a[-1] * inv % p
        shift = len(a) - 1 - dm
        for i, mc in enumerate(m):
            a[shift + i] = (a[shift + i] - c * mc) % p
        _trim(a)
    return a


def _pmulmod(a: list[int], b: list[int], m: list[int], p: int) -> list[int]:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for k, y in enumerate(b):
                out[i + k] += x * y
    return _pmod(out, m, p)


def _pgcd(a: list[int], b: list[int], p: int) -> list[int]:
    a, b = _trim([c % p for c in a]), _trim([c % p for c in b])
    while b:
        a, b = b, _pmod(a, b, p)
    return a


def _x_power_mod(e: int, m: list[int], p: int) -> list[int]:
    result, base = [1], _pmod([0, 1], m, p)
    while e:
        if e & 1:
            result = _pmulmod(result, base, m, p)
        base = _pmulmod(base, base, m, p)
        e >>= 1
    return result


def is_irreducible(poly: tuple[int, ...] | list[int], p: int) -> bool:
    """Rabin-style test for a monic polynomial over F_p (coefficients low degree first)."""
    m = _trim([c % p for c in poly])
    n = len(m) - 1
    if n <= 0:
        return False
    if n == 1:
        return True
    for k in range(1, n // 2 + 1):
        h = _x_power_mod(p ** k, m, p)
        h = h + [0] * (2 - len(h)) if len(h) < 2 else list(h)
        h[1] = (h[1] - 1) % p
        if len(_pgcd(m, _trim(h), p)) > 1:
            return False
    return True


def choose_modulus(p: int, f: int) -> tuple[int, ...]:
    """Smallest monic irreducible polynomial of degree ``f`` over F_p.

    Candidates are scanned in increasing order of sum(c_i p^i), i.e. the
    higher-degree coefficients are the more significant ones, so for p = 5
    the quadratic is x^2 + 2. For f = 1 the result is x.
    """
    if not is_prime(p):
        raise ValueError("composite characteristic")
    if not 1 <= f <= MAX_DEGREE:
        raise ValueError(f"extension degree must be in 1..{MAX_DEGREE}, got {f}")
    if f == 1:
        return (0, 1)
    for n in range(p ** f):
        coeffs = [(n // p ** i) % p for i in range(f)]
        if coeffs[0] == 0:
            continue
        cand = tuple(coeffs) + (1,)
        if is_irreducible(cand, p):
            return cand
    raise AssertionError("no irreducible polynomial found")  # pragma: no cover


@dataclass(frozen=True)
class FieldContext:
    """F_q with q = p**f, realised as F_p[t]/(modulus)."""

    p: int
    f: int = 1
    modulus: tuple[int, ...] = field(default=(), repr=False)

    def __post_init__(self):
        if not self.modulus:
            object.__setattr__(self, "modulus", choose_modulus(self.p, self.f))
        elif len(self.modulus) != self.f + 1 or self.modulus[-1] != 1:
            raise ValueError("modulus must be monic of degree f")

    @property
    def q(self) -> int:
        return self.p ** self.f

    def __call__(self, value) -> "FqElement":
        if isinstance(value, FqElement):
            return value
        if isinstance(value, int):
            return FqElement(self, (value % self.p,) + (0,) * (self.f - 1))
        coeffs = tuple(int(c) % self.p for c in value)
        if len(coeffs) > self.f:
            raise ValueError("too many coefficients")
        return FqElement(self, coeffs + (0,) * (self.f - len(coeffs)))

    def from_rational(self, x) -> "FqElement":
        """Reduce an int or Fraction with denominator prime to p."""
        x = Fraction(x)
        if x.denominator % self.p == 0:
            raise ValueError(f"{x} is not {self.p}-integral")
        return self(x.numerator * pow(x.denominator, -1, self.p))

    @property
    def zero(self) -> "FqElement":
        return self(0)

    @property
    def one(self) -> "FqElement":
        return self(1)

    @property
    def gen(self) -> "FqElement":
        """The class of t (equal to 0 when f = 1)."""
        return self((0, 1)) if self.f > 1 else self(0)

    def elements(self):
        """All q elements; coefficient tuples in lexicographic order."""
        for coeffs in itertools.product(range(self.p), repeat=self.f):
            yield FqElement(self, coeffs)

    @cached_property
    def _nonresidue(self) -> "FqElement":
        half = (self.q - 1) // 2
        for x in self.elements():
            if not x.is_zero() and x ** half != self.one:
                return x
        raise AssertionError("no non-residue")  # pragma: no cover

    @cached_property
    def primitive_element(self) -> "FqElement":
        """First generator of F_q^x in :meth:`elements` order."""
        n = self.q - 1
        primes = [d for d in range(2, n + 1) if n % d == 0 and is_prime(d)]
        for x in self.elements():
            if x.is_zero():
                continue
            if all(x ** (n // r) != self.one for r in primes):
                return x
        raise AssertionError("no primitive element")  # pragma: no cover


@dataclass(frozen=True)
class FqElement:
    ctx: FieldContext
    coeffs: tuple[int, ...]

    def _coerce(self, other) -> "FqElement | None":
        if isinstance(other, FqElement):
            if other.ctx is not self.ctx and other.ctx != self.ctx:
                raise ValueError("elements of different fields")
            return other
        if isinstance(other, int):
            return self.ctx(other)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        p = self.ctx.p
        return FqElement(self.ctx, tuple((a + b) % p for a, b in zip(self.coeffs, o.coeffs)))

    __radd__ = __add__

    def __neg__(self):
        p = self.ctx.p
        return FqElement(self.ctx, tuple(-a % p for a in self.coeffs))

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        ctx = self.ctx
        if ctx.f == 1:
            return FqElement(ctx, (self.coeffs[0] * o.coeffs[0] % ctx.p,))
        prod = _pmulmod(list(self.coeffs), list(o.coeffs), list(ctx.modulus), ctx.p)
        return ctx(prod)

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        result, base = self.ctx.one, self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def inverse(self) -> "FqElement":
        if self.is_zero():
            raise ZeroDivisionError("division by zero in F_q")
        return self ** (self.ctx.q - 2)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __eq__(self, other):
        if isinstance(other, int):
            other = self.ctx(other)
        if not isinstance(other, FqElement):
            return NotImplemented
        return self.coeffs == other.coeffs and self.ctx == other.ctx

    def __hash__(self):
        return hash((self.ctx.p, self.ctx.f, self.coeffs))

    def __lt__(self, other: "FqElement") -> bool:
        return self.coeffs < other.coeffs

    def __repr__(self):
        if self.ctx.f == 1:
            return f"F{self.ctx.p}({self.coeffs[0]})"
        return f"F{self.ctx.p}^{self.ctx.f}{self.coeffs}"

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def frobenius(self) -> "FqElement":
        return self ** self.ctx.p

    def is_square(self) -> bool:
        return self.is_zero() or self ** ((self.ctx.q - 1) // 2) == self.ctx.one

    def to_int(self) -> int:
        """Index of the element as sum(c_i p^i); the identity on F_p."""
        return sum(c * self.ctx.p ** i for i, c in enumerate(self.coeffs))


def legendre(x: FqElement) -> int:
    """Quadratic character on F_q: 0, 1 or -1."""
    if x.is_zero():
        return 0
    return 1 if x ** ((x.ctx.q - 1) // 2) == x.ctx.one else -1


def sqrt_fq(x: FqElement) -> FqElement | None:
    """Square root by Tonelli-Shanks, or None for a non-square.

    Of the two roots the one with the lexicographically smaller coefficient
    tuple is returned.
    """
    ctx = x.ctx
    if x.is_zero():
        return ctx.zero
    if not x.is_square():
        return None
    q = ctx.q
    s, t = 0, q - 1
    while t % 2 == 0:
        s, t = s + 1, t // 2
    z = ctx._nonresidue
    m, c, r, u = s, z ** t, x ** ((t + 1) // 2), x ** t
    while u != ctx.one:
        i, u2 = 0, u
        while u2 != ctx.one:
            u2, i = u2 * u2, i + 1
        b = c ** (2 ** (m - i - 1))
        m, c = i, b * b
        r, u = r * b, u * b * b
    assert r * r == x
    return min(r, -r)


def poly_mul(a: list, b: list) -> list:
    """Product of dense coefficient lists over any ring."""
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for k, y in enumerate(b):
            out[i + k] = out[i + k] + x * y
    return out


def poly_eval(coeffs: list, x):
    acc = 0
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc
