#!/usr/bin/env python3
"""Generate classical modular polynomial tables from q-expansions.

Dev tool, not part of the installed package. For a prime level l the
l + 1 roots of Phi_l(X, j(q)) are j(q^l) and the conjugates j(zeta^k q^(1/l)).
The elementary symmetric functions s_r of the l conjugates are computed by
Newton's identities from the power sums l * U_l(j^i); they have a pole of
order at most 1, so only a short q-precision is needed on that side. Then
e_r = s_r + j(q^l) s_(r-1), and each e_r is rewritten as a polynomial in j by
peeling leading terms.

Tables are exact for small levels and reduced mod l^K for large ones:

    python tools/gen_modpoly.py 2 3 5 7 11 13
    python tools/gen_modpoly.py --reduce 20 17 19 23 ... 97
"""
from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

try:
    import gmpy2
except ImportError:  # pragma: no cover
    gmpy2 = None

DEFAULT_OUT = Path(__file__).resolve().parents[1] / "src" / "eulercl" / "data" / "modpoly"


def _pack(coeffs: list[int], nbytes: int) -> int:
    return int.from_bytes(b"".join(c.to_bytes(nbytes, "little") for c in coeffs), "little")


def series_mul(a: list[int], b: list[int], n: int, mod: int | None) -> list[int]:
    """First n coefficients of a*b for non-negative coefficient lists (Kronecker substitution)."""
    a, b = a[:n], b[:n]
    if not a or not b:
        return [0] * n
    bits = max(a).bit_length() + max(b).bit_length() + min(len(a), len(b)).bit_length() + 1
    nbytes = (bits + 7) // 8
    x, y = _pack(a, nbytes), _pack(b, nbytes)
    z = int(gmpy2.mpz(x) * gmpy2.mpz(y)) if gmpy2 is not None else x * y
    raw = z.to_bytes((len(a) + len(b)) * nbytes, "little")
    out = []
    for i in range(n):
        c = int.from_bytes(raw[i * nbytes:(i + 1) * nbytes], "little")
        out.append(c % mod if mod else c)
    return out


def j_series(prec: int, mod: int | None) -> list[int]:
    """Coefficients of j(q) from q^-1 through q^prec (index 0 is q^-1)."""
    n = prec + 2
    # partition numbers: 1 / prod(1 - q^k)
    part = [0] * n
    part[0] = 1
    for m in range(1, n):
        total, k = 0, 1
        while True:
            g1 = k * (3 * k - 1) // 2
            if g1 > m:
                break
            sign = 1 if k % 2 else -1
            total += sign * part[m - g1]
            g2 = k * (3 * k + 1) // 2
            if g2 <= m:
                total += sign * part[m - g2]
            k += 1
        part[m] = total % mod if mod else total
    # prod(1 - q^k)^-24
    p2 = series_mul(part, part, n, mod)
    p4 = series_mul(p2, p2, n, mod)
    p8 = series_mul(p4, p4, n, mod)
    p16 = series_mul(p8, p8, n, mod)
    inv_eta24 = series_mul(p16, p8, n, mod)
    sigma3 = [0] * n
    for d in range(1, n):
        for m in range(d, n, d):
            sigma3[m] += d ** 3
    e4 = [1] + [(240 * s) % mod if mod else 240 * s for s in sigma3[1:]]
    e4sq = series_mul(e4, e4, n, mod)
    e4cube = series_mul(e4sq, e4, n, mod)
    # j = E4^3 / Delta and Delta = q * prod(1 - q^k)^24
    return series_mul(e4cube, inv_eta24, n, mod)


def _lmul(a: list[int], b: list[int], n: int) -> list[int]:
    """Schoolbook product of signed short series, truncated to n terms."""
    out = [0] * n
    for i, x in enumerate(a[:n]):
        if x:
            for k, y in enumerate(b[: n - i]):
                out[i + k] += x * y
    return out


def modular_polynomial(level: int, reduce_exp: int | None = None) -> dict[tuple[int, int], int]:
    """Return {(i, k): c} with Phi_level = sum c X^i Y^k (all pairs, zeros dropped)."""
    l = level
    mod = l ** (reduce_exp + 1) if reduce_exp else None
    final_mod = l ** reduce_exp if reduce_exp else None
    prec = l * (l + 3)
    jc = j_series(prec, mod)

    # powers of j; J[i][t] is the coefficient of q^(t - i)
    length = prec + 2
    J = [[1] + [0] * (length - 1)]
    for i in range(1, l + 2):
        J.append(series_mul(J[-1], jc, length, mod))

    # sigma series live on indices -1..L-2 (offset 1)
    L = l + 4

    def red(c: int) -> int:
        return c % mod if mod else c

    power_sums = [None]
    for i in range(1, l + 1):
        ps = [0] * L
        for t in range(L):
            n = t - 1
            idx = l * n + i
            if 0 <= idx < length:
                ps[t] = red(l * J[i][idx])
        power_sums.append(ps)

    one = [0] * L
    one[1] = 1
    sig = [one]
    for r in range(1, l + 1):
        acc = [0] * L
        for i in range(1, r + 1):
            # both operands have offset 1; the product has offset 2
            prod = _lmul(sig[r - i], power_sums[i], L + 1)
            sign = 1 if i % 2 else -1
            for t in range(L):
                acc[t] += sign * prod[t + 1]
        if mod:
            if r % l == 0:
                assert all(c % l == 0 for c in acc), "non-integral symmetric function"
                acc = [(c // l) % (mod // l) for c in acc]
            else:
                inv = pow(r, -1, mod)
                acc = [(c * inv) % mod for c in acc]
        else:
            assert all(c % r == 0 for c in acc), "non-integral symmetric function"
            acc = [c // r for c in acc]
        sig.append(acc)
    sig.append([0] * L)

    # e_r on q-indices -(l+1)..0, stored at offset l+1
    W = l + 2
    poly: dict[tuple[int, int], int] = {}
    for r in range(0, l + 2):
        e = [0] * W
        if r == 0:
            e[W - 1] = 1
        else:
            for n in range(-(l + 1), 1):
                total = 0
                si = n + 1
                if 0 <= si < L:
                    total += sig[r][si]
                for m in (-1, 0, 1):
                    t = n - l * m + 1
                    if 0 <= t < L:
                        total += jc[m + 1] * sig[r - 1][t]
                e[n + l + 1] = total
        for k in range(l + 1, -1, -1):
            a = e[l + 1 - k]
            if mod:
                a %= mod
            if a:
                for n in range(-k, 1):
                    e[n + l + 1] -= a * J[k][n + k]
                i = l + 1 - r
                c = (-1) ** r * a
                if final_mod:
                    c %= final_mod
                if c:
                    poly[(i, k)] = c
        if mod:
            assert all(c % (mod // l) == 0 for c in e), f"peeling failed for e_{r}"
        else:
            assert not any(e), f"peeling failed for e_{r}"
    for (i, k), c in poly.items():
        assert poly.get((k, i)) == c, f"asymmetric coefficient at {(i, k)}"
    return poly


def write_table(path: Path, level: int, poly: dict, reduce_exp: int | None) -> None:
    lines = [f"p {level}"]
    if reduce_exp:
        lines.append(f"# classical modular polynomial of level {level}, coefficients reduced mod {level}^{reduce_exp}")
        lines.append(f"mod {level ** reduce_exp}")
    else:
        lines.append(f"# classical modular polynomial of level {level}, exact integer coefficients")
    for (i, k) in sorted(poly, reverse=True):
        if i >= k:
            lines.append(f"[{i},{k}] {poly[(i, k)]}")
    path.write_text("\n".join(lines) + "\n")


def main(argv: list[str] | None = None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("levels", type=int, nargs="+")
    ap.add_argument("--reduce", type=int, default=None, metavar="K",
                    help="store coefficients mod level^K instead of exactly")
    ap.add_argument("--out", type=Path, default=DEFAULT_OUT)
    args = ap.parse_args(argv)
    args.out.mkdir(parents=True, exist_ok=True)
    for level in args.levels:
        t0 = time.perf_counter()
        poly = modular_polynomial(level, args.reduce)
        write_table(args.out / f"phi_{level}.txt", level, poly, args.reduce)
        print(f"level {level}: {sum(1 for i, k in poly if i >= k)} stored terms, "
              f"{time.perf_counter() - t0:.1f}s", file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
