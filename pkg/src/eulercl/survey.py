"""Batch classification of torsion fibres c = (c1, c2) of the Euler top over Z_q."""
from __future__ import annotations

import csv
import io
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from pathlib import Path

from .cl import canonical_lift_digitwise, cl_test, shipped_modular_poly
from .ec import INFINITY, NonIntegralJ, QuarticModel, hasse_invariant, quartic_point_count
from .eulertop import EulerParams, FiberParam, ace_coeffs, fiber_j, n_poly
from .padic import PadicContext, ZqElement, teichmuller

CLASSES = ("Singular", "Supersingular", "OrdinaryNotCL", "CLCandidate")
CSV_COLUMNS = (
    "c1_index",
    "c1_digits",
    "n_unit",
    "hasse_unit",
    "classification",
    "residual_valuation",
    "j_mod_p",
)


class VerificationError(AssertionError):
    pass


@dataclass(frozen=True)
class SurveyConfig:
    p: int
    f: int = 1
    N: int = 8
    a: tuple = (2, 0, 5)
    c2_exponent: int = 0
    output: Path | None = None
    workers: int = 1

    def __post_init__(self):
        if self.p in (2, 3):
            raise ValueError("p must be at least 5")
        a = tuple(Fraction(x) for x in self.a)
        if len(a) != 3:
            raise ValueError("need exactly three parameters a1, a2, a3")
        for x in a:
            if x.denominator % self.p == 0:
                raise ValueError(f"a_i = {x} is not {self.p}-integral")
        red = {x.numerator * pow(x.denominator, -1, self.p) % self.p for x in a}
        if len(red) < 3:
            raise ValueError("a1, a2, a3 must be distinct mod p")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "workers", max(1, int(self.workers)))

    @property
    def q(self) -> int:
        return self.p ** self.f

    def context(self) -> PadicContext:
        return _context(self.p, self.f, self.N)


@lru_cache(maxsize=None)
def _context(p: int, f: int, N: int) -> PadicContext:
    return PadicContext(p, f, N)


@dataclass(frozen=True)
class FiberRecord:
    c1_index: int
    c1_digits: str
    n_unit: bool
    hasse_unit: bool | None
    classification: str
    residual_valuation: int | None
    j_mod_p: int | None
    j: ZqElement | None = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        assert (self.classification == "Singular") == (not self.n_unit)
        assert self.classification in CLASSES

    def csv_row(self) -> list[str]:
        def b(v):
            return "" if v is None else str(int(v))

        return [
            str(self.c1_index),
            self.c1_digits,
            b(self.n_unit),
            b(self.hasse_unit),
            self.classification,
            "" if self.residual_valuation is None else str(self.residual_valuation),
            "" if self.j_mod_p is None else str(self.j_mod_p),
        ]


def torsion_element(ctx: PadicContext, index: int) -> ZqElement:
    """Teichmuller lift of g^index for the first generator g of F_q^x."""
    g = ctx.residue.primitive_element
    return teichmuller(g ** (index % (ctx.residue.q - 1)), ctx)


def fiber_params(cfg: SurveyConfig, c1_index: int) -> tuple[EulerParams, FiberParam]:
    ctx = cfg.context()
    a = EulerParams(*(ctx.from_rational(x) for x in cfg.a))
    c = FiberParam(torsion_element(ctx, c1_index), torsion_element(ctx, cfg.c2_exponent))
    return a, c


def classify_fiber(cfg: SurveyConfig, c1_index: int) -> FiberRecord:
    """Singular, then Supersingular, then the CL test on j over Z_q."""
    ctx = cfg.context()
    a, c = fiber_params(cfg, c1_index)
    digits = c.c1.digits()
    if not n_poly(a, c).is_unit():
        return FiberRecord(c1_index, digits, False, None, "Singular", None, None)
    qm = ace_coeffs(a, c)
    res = QuarticModel(qm.A.residue(), qm.C.residue(), qm.E.residue())
    hasse = hasse_invariant(res.rhs())
    try:
        j = fiber_j(a, c)
    except NonIntegralJ as exc:  # pragma: no cover - excluded by distinct a_i mod p
        raise AssertionError(f"non-integral j at c1_index {c1_index} with N(c) a unit") from exc
    assert j is not INFINITY
    jbar = j.residue().to_int()
    if hasse.is_zero():
        return FiberRecord(c1_index, digits, True, False, "Supersingular", None, jbar, j)
    verdict = cl_test(j, shipped_modular_poly(cfg.p), ordinary=True)
    cls = "CLCandidate" if verdict.is_cl_candidate else "OrdinaryNotCL"
    assert cls != "CLCandidate" or verdict.residual_valuation >= cfg.N
    return FiberRecord(c1_index, digits, True, True, cls, verdict.residual_valuation, jbar, j)


def _classify_task(args):
    return classify_fiber(*args)


@dataclass
class SurveyReport:
    config: SurveyConfig
    records: list[FiberRecord]
    verified: bool | None = None
    oracle_count: int | None = None

    def counts(self) -> dict[str, int]:
        c = Counter(r.classification for r in self.records)
        return {k: c.get(k, 0) for k in CLASSES}

    def structural_bound(self) -> int:
        # zeros of N(z1, 1) plus zeros of the Hasse family on the line z2 = 1
        return 3 + (self.config.p - 1) // 2

    def csv_text(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for r in self.records:
            w.writerow(r.csv_row())
        return buf.getvalue()

    def summary_text(self) -> str:
        cfg = self.config
        lines = [
            f"p: {cfg.p}",
            f"f: {cfg.f}",
            f"N: {cfg.N}",
            f"a: {','.join(str(x) for x in cfg.a)}",
            f"c2_exponent: {cfg.c2_exponent}",
            f"rows: {len(self.records)}",
        ]
        lines += [f"{k}: {v}" for k, v in self.counts().items()]
        lines.append(f"structural_bound: {self.structural_bound()}")
        if self.verified is not None:
            lines.append(f"oracle_cl_count: {self.oracle_count}")
            lines.append(f"verified: {'yes' if self.verified else 'no'}")
        return "\n".join(lines) + "\n"

    def write(self, path: Path) -> tuple[Path, Path]:
        path = Path(path)
        summary = path.with_name(path.stem + ".summary.txt")
        try:
            path.write_text(self.csv_text(), newline="")
            summary.write_text(self.summary_text())
        except OSError as exc:
            raise OSError(f"cannot write survey output to {path}: {exc.strerror}") from exc
        return path, summary


def survey_run(cfg: SurveyConfig, verify: bool = False) -> SurveyReport:
    indices = range(cfg.q - 1)
    tasks = [(cfg, i) for i in indices]
    if cfg.workers == 1:
        records = [_classify_task(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            records = list(pool.map(_classify_task, tasks, chunksize=max(1, len(tasks) // (4 * cfg.workers))))
    report = SurveyReport(cfg, records)
    counts = report.counts()
    bad = counts["Singular"] + counts["Supersingular"]
    if bad > report.structural_bound():
        raise VerificationError(f"{bad} singular or supersingular rows exceed the bound {report.structural_bound()}")
    if verify:
        report.oracle_count, disagreements = oracle_recount(cfg, records)
        report.verified = not disagreements and pointcount_consistency(cfg, records)
    if cfg.output is not None:
        report.write(cfg.output)
    return report


def oracle_recount(cfg: SurveyConfig, records: list[FiberRecord]) -> tuple[int, list[int]]:
    """Count rows whose j lies in the digit-search solution set of its residue.

    Returns the count and the indices where the oracle disagrees with the
    classification.
    """
    ctx = cfg.context()
    mp = shipped_modular_poly(cfg.p)
    sets = {}
    count, disagreements = 0, []
    for r in records:
        if r.classification not in ("OrdinaryNotCL", "CLCandidate"):
            continue
        jbar = r.j.residue()
        if jbar not in sets:
            sets[jbar] = canonical_lift_digitwise(jbar, ctx, mp)
        member = r.j in sets[jbar]
        count += member
        if member != (r.classification == "CLCandidate"):
            disagreements.append(r.c1_index)
    return count, disagreements


def pointcount_consistency(cfg: SurveyConfig, records: list[FiberRecord], sample: int = 20) -> bool:
    """Supersingular iff the Frobenius trace of the quartic vanishes mod p, on a sample of rows."""
    rows = [r for r in records if r.n_unit]
    step = max(1, len(rows) // sample)
    ok = True
    for r in rows[::step][:sample]:
        a, c = fiber_params(cfg, r.c1_index)
        qm = ace_coeffs(a, c)
        res = QuarticModel(qm.A.residue(), qm.C.residue(), qm.E.residue())
        trace = cfg.q + 1 - quartic_point_count(res)
        ok &= (trace % cfg.p == 0) == (r.classification == "Supersingular")
    return ok
