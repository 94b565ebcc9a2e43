"""Command line entry point: ``eulercl <subcommand> ...``.

Exit status is 0 on success, 1 when a verification fails and 2 on usage errors.
"""
from __future__ import annotations

import argparse
import sys
from fractions import Fraction
from pathlib import Path

from . import cl, eulertop, survey
from .ec import INFINITY, NonIntegralJ, discriminant_1728, hasse_invariant, quartic_to_weierstrass
from .padic import PadicContext, from_digits

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _triple(text: str) -> tuple[Fraction, ...]:
    try:
        vals = tuple(Fraction(part) for part in text.split(","))
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"bad rational triple {text!r}") from exc
    if len(vals) != 3:
        raise argparse.ArgumentTypeError("expected three comma-separated rationals")
    return vals


def _modpoly(p: int, path: Path | None) -> cl.ModularPolynomial:
    try:
        mp = cl.load_modular_poly(path) if path else cl.shipped_modular_poly(p)
    except FileNotFoundError as exc:
        raise UsageError(str(exc)) from exc
    if mp.level != p:
        raise UsageError(f"modular polynomial has level {mp.level}, expected {p}")
    return mp


def _fmt(x) -> str:
    if x is INFINITY:
        return "inf"
    if hasattr(x, "digits"):
        return x.digits()
    return str(x)


def cmd_survey(args) -> int:
    cfg = survey.SurveyConfig(
        args.p, args.f, args.N, args.a, args.c2_exponent, args.output, args.workers
    )
    _modpoly(args.p, None)
    report = survey.survey_run(cfg, verify=args.verify)
    sys.stdout.write(report.summary_text())
    if args.output is None:
        sys.stdout.write(report.csv_text())
    return EXIT_FAIL if report.verified is False else EXIT_OK


def cmd_fiber(args) -> int:
    cfg = survey.SurveyConfig(args.p, args.f, args.N, args.a, args.c2)
    _modpoly(args.p, None)
    a, c = survey.fiber_params(cfg, args.c1)
    qm = eulertop.ace_coeffs(a, c)
    w = quartic_to_weierstrass(qm)
    print(f"c1: {_fmt(c.c1)}")
    print(f"c2: {_fmt(c.c2)}")
    print(f"N(c): {_fmt(eulertop.n_poly(a, c))}")
    print(f"A: {_fmt(qm.A)}")
    print(f"C: {_fmt(qm.C)}")
    print(f"E: {_fmt(qm.E)}")
    print(f"Delta: {_fmt(discriminant_1728(w))}")
    try:
        print(f"j: {_fmt(eulertop.fiber_j(a, c))}")
    except NonIntegralJ:
        print("j: not integral")
    residue = [x.residue() for x in qm.rhs() if hasattr(x, "residue")]
    if len(residue) == 3:
        E, C, A = residue
        print(f"hasse: {hasse_invariant([E, 0, C, 0, A]).to_int()}")
    rec = survey.classify_fiber(cfg, args.c1)
    rv = "" if rec.residual_valuation is None else rec.residual_valuation
    print(f"residual_valuation: {rv}")
    print(f"classification: {rec.classification}")
    return EXIT_OK


def cmd_cl_test(args) -> int:
    ctx = PadicContext(args.p, args.f, args.N)
    try:
        j = from_digits(args.j, ctx)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    mp = _modpoly(args.p, args.modpoly)
    if not mp.supports_precision(args.p, args.N):
        raise UsageError(f"table only known mod {mp.modulus}; lower --N")
    verdict = cl.cl_test(j, mp)
    print(f"j: {j.digits()}")
    print(verdict.describe())
    return EXIT_OK


def cmd_remark(args) -> int:
    if args.m_from > args.m_to:
        raise UsageError("--m-from must not exceed --m-to")
    failures = 0
    print("m,p,n_unit,hasse_unit,verdict,residual_valuation")
    for m in range(args.m_from, args.m_to + 1):
        if m in (0, 2):
            continue
        rep = eulertop.remark_family(m, args.p_bound, args.N)
        print(f"# m={m} j={rep.j} cm={'yes' if rep.is_cm else 'no'}")
        for r in rep.primes:
            hu = "" if r.hasse_unit is None else int(r.hasse_unit)
            rv = "" if r.residual_valuation is None else r.residual_valuation
            print(f"{m},{r.p},{int(r.n_unit)},{hu},{r.verdict},{rv}")
            if not rep.is_cm and r.qualifies and r.verdict != "not CL":
                failures += 1
    return EXIT_FAIL if failures else EXIT_OK


def cmd_modpoly_verify(args) -> int:
    if args.file is None and args.level is None:
        raise UsageError("give --file or --level")
    try:
        mp = cl.load_modular_poly(args.file) if args.file else cl.shipped_modular_poly(args.level)
    except FileNotFoundError as exc:
        raise UsageError(str(exc)) from exc
    ok = cl.kronecker_check(mp)
    print(f"level: {mp.level}")
    print(f"coefficients: {'exact' if mp.modulus is None else f'mod {mp.modulus}'}")
    print(f"kronecker: {'pass' if ok else 'FAIL'}")
    for D, j, good in cl.cm_spot_checks(mp):
        print(f"cm D={D} j={j}: {'pass' if good else 'FAIL'}")
        ok &= good
    print("result: " + ("pass" if ok else "FAIL"))
    return EXIT_OK if ok else EXIT_FAIL


def cmd_limits(args) -> int:
    try:
        rows = eulertop.j_limit_probe(eulertop.EulerParams(*args.a), args.c2, args.steps)
    except AssertionError as exc:
        print(f"probe failed: {exc}", file=sys.stderr)
        return EXIT_FAIL
    print("k,eps,E,C,Delta,j")
    for r in rows:
        print(f"{r.k},{r.eps},{r.E},{r.C},{r.delta},{r.j}")
    print(f"# C limit: {eulertop.c_limit(eulertop.EulerParams(*args.a), args.c2)}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="eulercl", description="Canonical-lift survey of Euler-top fibres.")
    sub = ap.add_subparsers(dest="command", required=True)

    def field_args(sp, N_default=8):
        sp.add_argument("--p", type=int, required=True)
        sp.add_argument("--f", type=int, default=1)
        sp.add_argument("--N", type=int, default=N_default)

    sp = sub.add_parser("survey", help="classify all torsion fibres c1 in mu_(q-1)")
    field_args(sp)
    sp.add_argument("--a", type=_triple, default=(2, 0, 5), help="a1,a2,a3 as rationals")
    sp.add_argument("--c2-exponent", type=int, default=0)
    sp.add_argument("--output", type=Path, default=None, help="CSV path; summary goes next to it")
    sp.add_argument("--workers", type=int, default=1)
    sp.add_argument("--verify", action="store_true", help="recount CL candidates with the digit oracle")
    sp.set_defaults(func=cmd_survey)

    sp = sub.add_parser("fiber", help="classify one fibre with an intermediate dump")
    field_args(sp)
    sp.add_argument("--a", type=_triple, default=(2, 0, 5))
    sp.add_argument("--c1", type=int, required=True, help="exponent of c1 in mu_(q-1)")
    sp.add_argument("--c2", type=int, default=0, help="exponent of c2 in mu_(q-1)")
    sp.set_defaults(func=cmd_fiber)

    sp = sub.add_parser("cl-test", help="CL test on a j given by base-p digits")
    field_args(sp)
    sp.add_argument("--j", required=True, help="little-endian digits, e.g. 3.1.4 or 1.2;0.4 for f=2")
    sp.add_argument("--modpoly", type=Path, default=None)
    sp.set_defaults(func=cmd_cl_test)

    sp = sub.add_parser("remark", help="a=(2,0,m), c=(1,1) over a range of m")
    sp.add_argument("--m-from", type=int, required=True)
    sp.add_argument("--m-to", type=int, required=True)
    sp.add_argument("--p-bound", type=int, default=100)
    sp.add_argument("--N", type=int, default=8)
    sp.set_defaults(func=cmd_remark)

    sp = sub.add_parser("modpoly-verify", help="Kronecker congruence and CM checks for a table")
    sp.add_argument("--file", type=Path, default=None)
    sp.add_argument("--level", type=int, default=None)
    sp.set_defaults(func=cmd_modpoly_verify)

    sp = sub.add_parser("limits", help="approach the singular fibre c1 = a1 c2")
    sp.add_argument("--a", type=_triple, default=(2, 0, 5))
    sp.add_argument("--c2", type=Fraction, default=Fraction(1))
    sp.add_argument("--steps", type=int, default=6)
    sp.set_defaults(func=cmd_limits)
    return ap


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, cl.ModularPolynomialError, ValueError) as exc:
        print(f"eulercl {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except survey.VerificationError as exc:
        print(f"eulercl {args.command}: verification failed: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except OSError as exc:
        print(f"eulercl {args.command}: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
