"""Canonical lifts at finite p-adic precision via classical modular polynomials.

A curve over Z_q with ordinary reduction is treated as a canonical-lift
candidate at precision N when its j-invariant satisfies
Phi_p(j, sigma(j)) = 0 mod p^N.
"""
from __future__ import annotations

import itertools
import math
import re
from collections.abc import Set
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from importlib import resources
from pathlib import Path

import numpy as np

from .ec import is_supersingular_j
from .ff import FqElement
from .padic import PadicContext, ZqElement, frobenius_sigma


class ModularPolynomialError(ValueError):
    pass


_TERM = re.compile(r"^\[\s*(\d+)\s*,\s*(\d+)\s*\]\s+(-?\d+)$")


@dataclass(eq=False)
class ModularPolynomial:
    """Phi_level(X, Y) as a symmetric table {(i, k): c}.

    ``modulus`` is None for exact integer coefficients, otherwise the
    integer the coefficients were reduced by (a power of the level).
    """

    level: int
    coeffs: dict[tuple[int, int], int]
    modulus: int | None = None
    _cache: dict = field(default_factory=dict, repr=False)

    @property
    def degree(self) -> int:
        return max(i for i, _ in self.coeffs)

    def stored_terms(self) -> list[tuple[int, int, int]]:
        return sorted(((i, k, c) for (i, k), c in self.coeffs.items() if i >= k), reverse=True)

    def supports_precision(self, p: int, N: int) -> bool:
        return self.modulus is None or self.modulus % (p ** N) == 0

    def _rows(self, m: int) -> list[list[tuple[int, int]]]:
        key = ("rows", m)
        if key not in self._cache:
            rows: list[list[tuple[int, int]]] = [[] for _ in range(self.degree + 1)]
            for (i, k), c in self.coeffs.items():
                c %= m
                if c:
                    rows[i].append((k, c))
            self._cache[key] = rows
        return self._cache[key]

    def diagonal(self, m: int) -> list[int]:
        """Coefficients of Phi(X, X) mod m, low degree first."""
        key = ("diag", m)
        if key not in self._cache:
            out = [0] * (2 * self.degree + 1)
            for (i, k), c in self.coeffs.items():
                out[i + k] += c
            self._cache[key] = [c % m for c in out]
        return self._cache[key]


def parse_modular_poly(text: str, source: str = "<string>") -> ModularPolynomial:
    level = None
    modulus = None
    coeffs: dict[tuple[int, int], int] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if level is None:
            parts = line.split()
            if len(parts) != 2 or parts[0] != "p" or not parts[1].isdigit():
                raise ModularPolynomialError(f"{source}:{lineno}: expected header 'p <level>'")
            level = int(parts[1])
            continue
        if line.startswith("mod"):
            parts = line.split()
            if modulus is not None or coeffs or len(parts) != 2 or not parts[1].isdigit():
                raise ModularPolynomialError(f"{source}:{lineno}: malformed 'mod' line")
            modulus = int(parts[1])
            continue
        m = _TERM.match(line)
        if not m:
            raise ModularPolynomialError(f"{source}:{lineno}: malformed term {raw.strip()!r}")
        i, k, c = int(m.group(1)), int(m.group(2)), int(m.group(3))
        for key in {(i, k), (k, i)}:
            if key in coeffs and coeffs[key] != c:
                raise ModularPolynomialError(f"{source}:{lineno}: asymmetric or repeated entry {key}")
            coeffs[key] = c
    if level is None:
        raise ModularPolynomialError(f"{source}: empty modular polynomial file")
    if not coeffs:
        raise ModularPolynomialError(f"{source}: no coefficients")
    if modulus is not None and (modulus < 2 or modulus % level):
        raise ModularPolynomialError(f"{source}: modulus must be a power of the level")
    degree = max(i for i, _ in coeffs)
    if degree != level + 1 or coeffs.get((level + 1, 0)) != 1:
        raise ModularPolynomialError(
            f"{source}: wrong degree {degree} for level {level} (expected monic of degree {level + 1})"
        )
    if modulus is not None:
        coeffs = {key: c % modulus for key, c in coeffs.items() if c % modulus}
    return ModularPolynomial(level, coeffs, modulus)


def load_modular_poly(source: str | Path) -> ModularPolynomial:
    path = Path(source)
    return parse_modular_poly(path.read_text(), str(path))


def shipped_levels() -> list[int]:
    names = resources.files("eulercl").joinpath("data", "modpoly").iterdir()
    return sorted(int(n.name[4:-4]) for n in names if n.name.startswith("phi_") and n.name.endswith(".txt"))


@lru_cache(maxsize=None)
def shipped_modular_poly(level: int) -> ModularPolynomial:
    res = resources.files("eulercl").joinpath("data", "modpoly", f"phi_{level}.txt")
    if not res.is_file():
        raise FileNotFoundError(f"no shipped modular polynomial of level {level}; supply one with a file")
    return parse_modular_poly(res.read_text(), f"phi_{level}.txt")


def kronecker_check(mp: ModularPolynomial) -> bool:
    """Phi_p = (X^p - Y)(X - Y^p) mod p, as polynomials over F_p."""
    p = mp.level
    expected = {(p + 1, 0): 1, (0, p + 1): 1, (p, p): p - 1, (1, 1): p - 1}
    reduced = {key: c % p for key, c in mp.coeffs.items() if c % p}
    return reduced == expected


def eval_modpoly(mp: ModularPolynomial, x, y):
    """Phi(x, y) for ints, Fractions, F_q or Z_q elements."""
    if isinstance(x, ZqElement) or isinstance(y, ZqElement):
        ctx = x.ctx if isinstance(x, ZqElement) else y.ctx
        if not mp.supports_precision(ctx.p, ctx.N):
            raise ModularPolynomialError(
                f"table of level {mp.level} is only known mod {mp.modulus}, not mod {ctx.p}^{ctx.N}"
            )
        return _eval_zq(mp, ctx(x), ctx(y))
    if isinstance(x, FqElement) or isinstance(y, FqElement):
        ctx = x.ctx if isinstance(x, FqElement) else y.ctx
        x, y = ctx(x), ctx(y)
        if mp.modulus is not None and mp.modulus % ctx.p:
            raise ModularPolynomialError("table modulus incompatible with the field")
        rows = mp._rows(ctx.p)
        ypow = [ctx.one]
        for _ in range(mp.degree):
            ypow.append(ypow[-1] * y)
        acc = ctx.zero
        for row in reversed(rows):
            inner = ctx.zero
            for k, c in row:
                inner = inner + c * ypow[k]
            acc = acc * x + inner
        return acc
    if mp.modulus is not None:
        raise ModularPolynomialError("exact evaluation needs an exact table")
    x, y = Fraction(x), Fraction(y)
    total = sum(c * x ** i * y ** k for (i, k), c in mp.coeffs.items())
    return total.numerator if total.denominator == 1 else total


def _eval_zq(mp: ModularPolynomial, x: ZqElement, y: ZqElement) -> ZqElement:
    ctx = x.ctx
    m, f = ctx.pN, ctx.f
    rows = mp._rows(m)
    if f == 1:
        xv, yv = x.coeffs[0], y.coeffs[0]
        ypow = [1]
        for _ in range(mp.degree):
            ypow.append(ypow[-1] * yv % m)
        acc = 0
        for row in reversed(rows):
            acc = (acc * xv + sum(c * ypow[k] for k, c in row)) % m
        return ZqElement(ctx, (acc,))
    ypow = [ctx.one.coeffs]
    for _ in range(mp.degree):
        ypow.append((ZqElement(ctx, ypow[-1]) * y).coeffs)
    acc = ctx.zero
    for row in reversed(rows):
        inner = [0] * f
        for k, c in row:
            yk = ypow[k]
            for t in range(f):
                inner[t] += c * yk[t]
        acc = acc * x + ZqElement(ctx, tuple(v % m for v in inner))
    return acc


def phi_sigma_residual(mp: ModularPolynomial, j: ZqElement) -> ZqElement:
    """Phi_p(j, sigma(j)) in Z_q."""
    ctx = j.ctx
    if ctx.f == 1:
        m = ctx.pN
        acc = 0
        for c in reversed(mp.diagonal(m)):
            acc = (acc * j.coeffs[0] + c) % m
        return ZqElement(ctx, (acc,))
    return _eval_zq(mp, j, frobenius_sigma(j))


@dataclass(frozen=True)
class CLVerdict:
    ordinary: bool
    residual_valuation: int
    precision: int
    is_cl_candidate: bool
    special_j: bool = False

    def describe(self) -> str:
        if not self.ordinary:
            return "supersingular reduction: not CL"
        v = self.residual_valuation
        shown = f">={v}" if v >= self.precision else str(v)
        verdict = "CL candidate" if self.is_cl_candidate else "not CL"
        flag = " (j = 0 or 1728 mod p)" if self.special_j else ""
        return f"residual valuation {shown} at precision {self.precision}: {verdict}{flag}"


def cl_test(j: ZqElement, mp: ModularPolynomial, ordinary: bool | None = None) -> CLVerdict:
    """Residual valuation of Phi_p(j, sigma j); a candidate needs ordinary reduction and saturation."""
    ctx = j.ctx
    if mp.level != ctx.p:
        raise ValueError(f"modular polynomial level {mp.level} does not match p = {ctx.p}")
    jbar = j.residue()
    if ordinary is None:
        ordinary = not is_supersingular_j(jbar)
    special = jbar.is_zero() or jbar == 1728
    if not ordinary:
        return CLVerdict(False, phi_sigma_residual(mp, j).valuation(), ctx.N, False, special)
    v = phi_sigma_residual(mp, j).valuation()
    return CLVerdict(True, v, ctx.N, v >= ctx.N, special)


class LiftSet(Set):
    """Solutions mod p^N stored as cylinders: all x with x = prefix mod p^depth.

    Iteration expands the cylinders, so only iterate small sets.
    """

    def __init__(self, ctx: PadicContext, cylinders: dict[int, frozenset[tuple[int, ...]]]):
        self.ctx = ctx
        self._cylinders = {d: pre for d, pre in cylinders.items() if pre}

    def __contains__(self, x) -> bool:
        if not isinstance(x, ZqElement):
            return False
        for depth, prefixes in self._cylinders.items():
            m = self.ctx.p ** depth
            if tuple(c % m for c in x.coeffs) in prefixes:
                return True
        return False

    def __len__(self) -> int:
        q, N = self.ctx.residue.q, self.ctx.N
        return sum(len(pre) * q ** (N - d) for d, pre in self._cylinders.items())

    def __iter__(self):
        ctx = self.ctx
        for depth, prefixes in self._cylinders.items():
            pk = ctx.p ** depth
            tails = list(itertools.product(range(ctx.p ** (ctx.N - depth)), repeat=ctx.f))
            for pre in sorted(prefixes):
                for tail in tails:
                    yield ZqElement(ctx, tuple(a + pk * b for a, b in zip(pre, tail)))

    def __repr__(self):
        return f"LiftSet({len(self)} elements mod {self.ctx.p}^{self.ctx.N})"


def _int64_safe(ctx: PadicContext) -> bool:
    return ctx.pN < 2 ** 29


class _BatchEvaluator:
    """Phi_p(x, sigma x) for many Z_q elements at once (rows of an (n, f) array)."""

    def __init__(self, mp: ModularPolynomial, ctx: PadicContext):
        self.ctx = ctx
        self.m = ctx.pN
        self.dtype = np.int64 if _int64_safe(ctx) else object
        self.rows = mp._rows(self.m)
        self.degree = mp.degree
        self.sigma = np.array(ctx._sigma_powers, dtype=self.dtype)
        self.modulus = [int(c) for c in ctx.lifted_modulus]

    def mul(self, a, b):
        f, m = self.ctx.f, self.m
        if f == 1:
            return a * b % m
        prod = [None] * (2 * f - 1)
        for i in range(f):
            for k in range(f):
                t = a[:, i] * b[:, k] % m
                prod[i + k] = t if prod[i + k] is None else (prod[i + k] + t) % m
        for i in range(2 * f - 2, f - 1, -1):
            c = prod[i]
            for k in range(f):
                prod[i - f + k] = (prod[i - f + k] - c * self.modulus[k]) % m
        return np.stack(prod[:f], axis=1)

    def __call__(self, xs):
        m = self.m
        ys = (xs @ self.sigma) % m if self.ctx.f > 1 else xs
        ypow = [np.zeros_like(xs)]
        ypow[0][:, 0] = 1
        for _ in range(self.degree):
            ypow.append(self.mul(ypow[-1], ys))
        acc = np.zeros_like(xs)
        for row in reversed(self.rows):
            inner = np.zeros_like(xs)
            for k, c in row:
                inner = (inner + c * ypow[k]) % m
            acc = (self.mul(acc, xs) + inner) % m
        return acc


def _divisible(values, pk: int):
    return np.all(values % pk == 0, axis=1)


def canonical_lift_digitwise(jbar, ctx: PadicContext, mp: ModularPolynomial, shortcut: bool = True) -> LiftSet:
    """All x mod p^N with x = jbar mod p and Phi_p(x, sigma x) = 0 mod p^N.

    Breadth-first over p-adic digits: each solution mod p^k is extended by the
    q residue digits and kept when the congruence holds mod p^(k+1).

    With ``shortcut`` and jbar in F_(p^2) both partial derivatives of Phi_p
    vanish mod p at (x, sigma x), so for k >= 1 the congruence mod p^(k+1)
    does not depend on the new digit: one evaluation decides all q children.
    """
    jbar = ctx.residue(jbar.coeffs) if isinstance(jbar, FqElement) else ctx.residue(jbar)
    if is_supersingular_j(jbar):
        raise ValueError("digit search requires ordinary reduction")
    if mp.level != ctx.p or not mp.supports_precision(ctx.p, ctx.N):
        raise ModularPolynomialError(f"table of level {mp.level} unusable mod {ctx.p}^{ctx.N}")
    p, f, q = ctx.p, ctx.f, ctx.residue.q
    degenerate = shortcut and jbar ** (p * p) == jbar
    evaluate = _BatchEvaluator(mp, ctx)
    dtype = evaluate.dtype
    digits = np.array(list(itertools.product(range(p), repeat=f)), dtype=dtype)

    frontier = np.array([jbar.coeffs], dtype=dtype)
    frontier = frontier[_divisible(evaluate(frontier), p)]
    for k in range(1, ctx.N):
        pk = p ** k
        if len(frontier) == 0:
            break
        if degenerate:
            alive = frontier[_divisible(evaluate(frontier), pk * p)]
            if k + 1 == ctx.N:
                return LiftSet(ctx, {k: frozenset(tuple(int(c) for c in row) for row in alive)})
            frontier = (alive[:, None, :] + pk * digits[None, :, :]).reshape(-1, f)
        else:
            cand = (frontier[:, None, :] + pk * digits[None, :, :]).reshape(-1, f)
            frontier = cand[_divisible(evaluate(cand), pk * p)]
    return LiftSet(ctx, {ctx.N: frozenset(tuple(int(c) for c in row) for row in frontier)})


def exhaustive_cl_solutions(ctx: PadicContext, mp: ModularPolynomial) -> set[ZqElement]:
    """Brute force over all of Z/p^N (f = 1 only): x with Phi_p(x, x) = 0 mod p^N."""
    if ctx.f != 1:
        raise ValueError("exhaustive enumeration is for f = 1")
    m = ctx.pN
    diag = mp.diagonal(m)
    out = set()
    for x in range(m):
        acc = 0
        for c in reversed(diag):
            acc = (acc * x + c) % m
        if acc == 0:
            out.add(ZqElement(ctx, (x,)))
    return out


def two_isogeny_related(j1, j2, phi2: ModularPolynomial | None = None) -> bool:
    phi2 = phi2 or shipped_modular_poly(2)
    value = eval_modpoly(phi2, j1, j2)
    if isinstance(value, (ZqElement, FqElement)):
        return value.is_zero()
    return value == 0


def _principal_form_represents(D: int, n: int) -> bool:
    """Is n the norm of an element of the imaginary quadratic order of discriminant D?"""
    b = D % 2
    c = (b * b - D) // 4
    y = 0
    while c * y * y <= 4 * n:
        # x^2 + b x y + c y^2 = n
        disc = (b * y) ** 2 - 4 * (c * y * y - n)
        if disc >= 0:
            s = math.isqrt(disc)
            if s * s == disc and (s - b * y) % 2 == 0:
                return True
        y += 1
    return False


def cm_spot_checks(mp: ModularPolynomial) -> list[tuple[int, int, bool]]:
    """Phi_l(j, j) = 0 for CM j of discriminant D when l is a norm from that order.

    Returns (D, j, ok) for every class-number-one D where the check applies.
    """
    from .ec import CM_J_BY_DISCRIMINANT

    out = []
    for D, j in sorted(CM_J_BY_DISCRIMINANT.items(), reverse=True):
        if not _principal_form_represents(D, mp.level):
            continue
        if mp.modulus is None:
            ok = eval_modpoly(mp, j, j) == 0
        else:
            m = mp.modulus
            ok = sum(c * pow(j, i, m) * pow(j, k, m) for (i, k), c in mp.coeffs.items()) % m == 0
        out.append((D, j, ok))
    return out
