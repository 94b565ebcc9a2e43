"""Fixed-precision arithmetic in Z_q, the unramified degree-f extension of Z_p.

Z_q is modelled as (Z/p^N)[t]/(u(t)) where u is the residue-field modulus
lifted coefficient-wise. The Frobenius lift sigma sends t to the root of u
congruent to t^p, found by Newton iteration.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .ff import FieldContext, FqElement, is_prime

DEFAULT_PRECISION = 8


@dataclass(frozen=True)
class PadicContext:
    p: int
    f: int = 1
    N: int = DEFAULT_PRECISION
    residue: FieldContext = field(init=False, repr=False, compare=False)
    pN: int = field(init=False, repr=False, compare=False)
    lifted_modulus: tuple[int, ...] = field(init=False, repr=False, compare=False)
    sigma_image: tuple[int, ...] = field(init=False, repr=False, compare=False)
    _sigma_powers: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not is_prime(self.p):
            raise ValueError("composite characteristic")
        if self.f < 1 or self.N < 1:
            raise ValueError("need f >= 1 and N >= 1")
        res = FieldContext(self.p, self.f)
        set_ = object.__setattr__
        set_(self, "residue", res)
        set_(self, "pN", self.p ** self.N)
        set_(self, "lifted_modulus", tuple(res.modulus))
        set_(self, "sigma_image", self._hensel_sigma())
        powers = [self.one]
        s = ZqElement(self, self.sigma_image)
        for _ in range(1, self.f):
            powers.append(powers[-1] * s)
        set_(self, "_sigma_powers", tuple(pw.coeffs for pw in powers))

    def _hensel_sigma(self) -> tuple[int, ...]:
        if self.f == 1:
            return (0,)
        u = self.lifted_modulus
        du = [i * c for i, c in enumerate(u)][1:]
        z = self.gen ** self.p
        for _ in range(self.N.bit_length() + 2):
            uz = _horner(u, z, self)
            if uz.is_zero():
                break
            duz = _horner(du, z, self)
            if duz.valuation() != 0:
                raise ArithmeticError("modulus derivative is not a unit")
            z = z - uz * duz.inverse()
        assert _horner(u, z, self).is_zero()
        return z.coeffs

    # constructors

    def __call__(self, value) -> "ZqElement":
        if isinstance(value, ZqElement):
            return value
        if isinstance(value, FqElement):
            return ZqElement(self, value.coeffs)
        if isinstance(value, Fraction):
            return self.from_rational(value)
        if isinstance(value, int):
            return ZqElement(self, (value % self.pN,) + (0,) * (self.f - 1))
        coeffs = tuple(int(c) % self.pN for c in value)
        if len(coeffs) > self.f:
            raise ValueError("too many coefficients")
        return ZqElement(self, coeffs + (0,) * (self.f - len(coeffs)))

    def from_rational(self, x) -> "ZqElement":
        x = Fraction(x)
        if x.denominator % self.p == 0:
            raise ValueError(f"{x} is not {self.p}-integral")
        return self(x.numerator * pow(x.denominator, -1, self.pN))

    @property
    def zero(self) -> "ZqElement":
        return self(0)

    @property
    def one(self) -> "ZqElement":
        return self(1)

    @property
    def gen(self) -> "ZqElement":
        return self((0, 1)) if self.f > 1 else self(0)

    def reduce(self, x: "ZqElement") -> FqElement:
        return self.residue(x.coeffs)


def build_context(p: int, f: int = 1, N: int = DEFAULT_PRECISION) -> PadicContext:
    return PadicContext(p, f, N)


def _horner(coeffs, x: "ZqElement", ctx: PadicContext) -> "ZqElement":
    acc = ctx.zero
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def _vp(n: int, p: int, cap: int) -> int:
    if n == 0:
        return cap
    v = 0
    while n % p == 0 and v < cap:
        n //= p
        v += 1
    return v


@dataclass(frozen=True)
class ZqElement:
    ctx: PadicContext
    coeffs: tuple[int, ...]

    def _coerce(self, other) -> "ZqElement | None":
        if isinstance(other, ZqElement):
            if other.ctx is not self.ctx and other.ctx != self.ctx:
                raise ValueError("elements of different rings")
            return other
        if isinstance(other, (int, Fraction)):
            return self.ctx(other)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        m = self.ctx.pN
        return ZqElement(self.ctx, tuple((a + b) % m for a, b in zip(self.coeffs, o.coeffs)))

    __radd__ = __add__

    def __neg__(self):
        m = self.ctx.pN
        return ZqElement(self.ctx, tuple(-a % m for a in self.coeffs))

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        m = self.ctx.pN
        return ZqElement(self.ctx, tuple((a - b) % m for a, b in zip(self.coeffs, o.coeffs)))

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        if isinstance(other, int):
            m = self.ctx.pN
            return ZqElement(self.ctx, tuple(a * other % m for a in self.coeffs))
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        ctx = self.ctx
        m, f = ctx.pN, ctx.f
        if f == 1:
            return ZqElement(ctx, (self.coeffs[0] * o.coeffs[0] % m,))
        prod = [0] * (2 * f - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for k, b in enumerate(o.coeffs):
                    prod[i + k] += a * b
        u = ctx.lifted_modulus
        for i in range(2 * f - 2, f - 1, -1):
            c = prod[i] % m
            if c:
                for k in range(f):
                    prod[i - f + k] -= c * u[k]
        return ZqElement(ctx, tuple(c % m for c in prod[:f]))

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

    def valuation(self) -> int:
        """p-adic valuation; N means zero at working precision (v >= N)."""
        N, p = self.ctx.N, self.ctx.p
        return min(_vp(c, p, N) for c in self.coeffs)

    val = valuation

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def is_unit(self) -> bool:
        return any(c % self.ctx.p for c in self.coeffs)

    def inverse(self) -> "ZqElement":
        if not self.is_unit():
            raise ZeroDivisionError("non-unit in Z_q")
        ctx = self.ctx
        y = ctx(ctx.reduce(self).inverse().coeffs)
        prec = 1
        while prec < ctx.N:
            y = y * (2 - self * y)
            prec *= 2
        return y

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
        if isinstance(other, (int, Fraction)):
            other = self.ctx(other)
        if not isinstance(other, ZqElement):
            return NotImplemented
        return self.coeffs == other.coeffs and self.ctx == other.ctx

    def __hash__(self):
        return hash((self.ctx.p, self.ctx.f, self.ctx.N, self.coeffs))

    def __repr__(self):
        if self.ctx.f == 1:
            return f"Z{self.ctx.p}({self.coeffs[0]} mod {self.ctx.p}^{self.ctx.N})"
        return f"Z{self.ctx.p}^{self.ctx.f}({self.coeffs} mod {self.ctx.p}^{self.ctx.N})"

    def residue(self) -> FqElement:
        return self.ctx.reduce(self)

    def truncate(self, k: int) -> "ZqElement":
        """Reduce the coefficients mod p^k (k <= N)."""
        m = self.ctx.p ** k
        return ZqElement(self.ctx, tuple(c % m for c in self.coeffs))

    def digits(self) -> str:
        """Little-endian base-p digits per coordinate: '.' between digits, ';' between coordinates."""
        p, N = self.ctx.p, self.ctx.N
        parts = []
        for c in self.coeffs:
            ds = []
            for _ in range(N):
                c, d = divmod(c, p)
                ds.append(str(d))
            parts.append(".".join(ds))
        return ";".join(parts)


def from_digits(text: str, ctx: PadicContext) -> ZqElement:
    """Inverse of :meth:`ZqElement.digits`; missing high digits are zero."""
    coords = text.strip().split(";")
    if len(coords) > ctx.f:
        raise ValueError(f"expected at most {ctx.f} coordinates")
    vals = []
    for coord in coords:
        digits = [int(d) for d in coord.split(".") if d != ""]
        if any(not 0 <= d < ctx.p for d in digits):
            raise ValueError(f"digit out of range for p={ctx.p}: {coord!r}")
        vals.append(sum(d * ctx.p ** i for i, d in enumerate(digits)))
    return ctx(vals)


def teichmuller(xbar: FqElement | int, ctx: PadicContext) -> ZqElement:
    """The (q-1)-th root of unity (or 0) reducing to ``xbar``."""
    if isinstance(xbar, int):
        xbar = ctx.residue(xbar)
    z = ctx(xbar.coeffs)
    if z.is_zero():
        return z
    q = ctx.residue.q
    for _ in range(ctx.N + 1):
        nxt = z ** q
        if nxt == z:
            return z
        z = nxt
    raise AssertionError("Teichmuller iteration did not stabilise")  # pragma: no cover


def frobenius_sigma(x: ZqElement) -> ZqElement:
    """Apply the Frobenius lift: t -> sigma_image, acting trivially on Z_p."""
    ctx = x.ctx
    if ctx.f == 1:
        return x
    m, f = ctx.pN, ctx.f
    out = [0] * f
    for c, img in zip(x.coeffs, ctx._sigma_powers):
        if c:
            for k in range(f):
                out[k] += c * img[k]
    return ZqElement(ctx, tuple(v % m for v in out))


def sigma_power(x: ZqElement, k: int) -> ZqElement:
    for _ in range(k % x.ctx.f):
        x = frobenius_sigma(x)
    return x
