"""Full-proof checking, connection-list reduction, and proof-matrix export."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Optional

from . import listops
from .errors import CapacityError, ParseError, PecrError
from .kernel import (
    Iep,
    IepStore,
    conclusion_storable,
    extract,
    induced_subst,
    iot_instances,
    sr1_rewrites,
    substitution_instance,
    verify_match,
)
from .matrix import label_code
from .model import AppSignature, AtomicProgram, validate_program
from .parsing import ProofDocument, ProofLine


@dataclass(frozen=True)
class LineReport:
    index: int
    ok: bool
    detail: str = ""


@dataclass(frozen=True)
class CheckReport:
    label: str
    accepted: bool
    lines: tuple[LineReport, ...]
    theorem: Optional[Iep] = None
    storable: bool = False
    notes: tuple[str, ...] = ()

    def first_failure(self) -> Optional[LineReport]:
        for line in self.lines:
            if not line.ok:
                return line
        return None


def _fail(doc: ProofDocument, reports: list[LineReport]) -> CheckReport:
    return CheckReport(doc.label, False, tuple(reports))


def check_proof(doc: ProofDocument, store: IepStore, sig: AppSignature) -> CheckReport:
    """Accept a proof iff its statements form a valid program list and every
    derived line is the cited rule's conclusion over an I/O-equivalent
    extraction of earlier lines (schemas iot/sr1/sr2 included).

    On acceptance the premise and final statement form a storable rule unless
    the conclusion mentions labels the premise does not provide; that case is
    reported as a note and the proof still stands.
    """
    reports: list[LineReport] = []
    program = doc.statements
    bad = validate_program(program, sig)
    if bad:
        reports.append(LineReport(0, False, f"statement list invalid: {bad[0]}"))
        return _fail(doc, reports)
    if doc.m > sig.mlst.nprem:
        reports.append(
            LineReport(0, False, f"premise length {doc.m} exceeds nprem {sig.mlst.nprem}")
        )
        return _fail(doc, reports)
    prefix = program[: doc.m]
    ok_all = True
    for line in doc.lines[doc.m :]:
        bad_refs = [r for r in line.clist if not 1 <= r < line.index]
        if bad_refs:
            reports.append(
                LineReport(
                    line.index,
                    False,
                    f"connection list references line {bad_refs[0]}, "
                    f"not below {line.index}",
                )
            )
            ok_all = False
            break
        report = _check_line(line, prefix, store, sig)
        reports.append(report)
        if not report.ok:
            ok_all = False
            break
        prefix = prefix + (line.stmt,)
    if not ok_all:
        return _fail(doc, reports)
    notes: list[str] = []
    storable = conclusion_storable(doc.premise, doc.conclusion, sig)
    theorem: Optional[Iep] = None
    if storable:
        theorem = Iep(doc.label, doc.premise, doc.conclusion, "theorem")
        if len(doc.premise) > sig.mlst.nprem:
            storable, theorem = False, None
            notes.append("premise exceeds nprem; not storable")
    else:
        notes.append("conclusion uses labels outside the premise; not storable")
    return CheckReport(doc.label, True, tuple(reports), theorem, storable, tuple(notes))


def _check_line(
    line: ProofLine, prefix, store: IepStore, sig: AppSignature
) -> LineReport:
    assert line.rule is not None and line.clist is not None
    idx = line.index
    try:
        if line.rule == "iot":
            return _check_iot(line, prefix, sig)
        if line.rule == "sr1":
            return _check_sr1(line, prefix, sig)
        if line.rule == "sr2":
            return _check_sr2(line, prefix, sig)
        if line.rule not in store:
            return LineReport(idx, False, f"unknown rule label {line.rule!r}")
        iep = store.get(line.rule)
        if len(line.clist) != len(iep.premise):
            return LineReport(
                idx,
                False,
                f"rule {line.rule!r} takes {len(iep.premise)} premise lines, "
                f"got {len(line.clist)}",
            )
        subst, res = verify_match(prefix, iep, line.clist, sig)
        if subst is None:
            return LineReport(idx, False, f"premise mismatch ({res.reason})")
        c = iep.conclusion
        want_x = tuple(l if l.is_cst else subst[l] for l in c.x)
        if line.stmt.pn != c.pn:
            return LineReport(
                idx,
                False,
                f"conclusion names {sig.decl(line.stmt.pn).name!r}, rule "
                f"{line.rule!r} concludes {sig.decl(c.pn).name!r}",
            )
        if line.stmt.x != want_x:
            want = sig.statement_text(AtomicProgram(c.pn, want_x, line.stmt.y))
            return LineReport(idx, False, f"conclusion mismatch, expected {want}")
        if len(line.stmt.y) != len(c.y):
            return LineReport(idx, False, "conclusion output arity mismatch")
        return LineReport(idx, True, line.rule)
    except PecrError as e:
        return LineReport(idx, False, str(e))


def _cited(prefix, clist, k):
    return prefix[clist[k] - 1]


def _check_iot(line: ProofLine, prefix, sig: AppSignature) -> LineReport:
    if len(line.clist) != 1:
        return LineReport(line.index, False, "iot cites exactly one line")
    source = _cited(prefix, line.clist, 0)
    instances, _skipped = iot_instances(source, sig)
    if line.stmt in instances:
        return LineReport(line.index, True, "iot")
    return LineReport(
        line.index,
        False,
        f"statement is not a type-check instance of line {line.clist[0]}",
    )


def _check_sr1(line: ProofLine, prefix, sig: AppSignature) -> LineReport:
    if len(line.clist) != 2:
        return LineReport(line.index, False, "sr1 cites [original equality]")
    original = _cited(prefix, line.clist, 0)
    equality = _cited(prefix, line.clist, 1)
    if line.stmt.pn != original.pn:
        return LineReport(line.index, False, "sr1 conclusion names a different program")
    if not sig.subst_eligible(original.pn):
        return LineReport(
            line.index,
            False,
            f"{sig.decl(original.pn).name!r} is not substitution-eligible",
        )
    try:
        rewrites = sr1_rewrites(original, equality, sig)
    except PecrError as e:
        return LineReport(line.index, False, str(e))
    if line.stmt.x not in rewrites:
        return LineReport(
            line.index,
            False,
            "inputs are not a single-slot rewrite of the original under the "
            "cited equality",
        )
    if len(line.stmt.y) != len(original.y):
        return LineReport(line.index, False, "sr1 output arity mismatch")
    return LineReport(line.index, True, "sr1")


def _check_sr2(line: ProofLine, prefix, sig: AppSignature) -> LineReport:
    if len(line.clist) != 3:
        return LineReport(line.index, False, "sr2 cites [original equality substituted]")
    original = _cited(prefix, line.clist, 0)
    equality = _cited(prefix, line.clist, 1)
    substituted = _cited(prefix, line.clist, 2)
    decl = sig.decl(original.pn)
    for j in range(1, decl.ny + 1):
        try:
            want = substitution_instance(
                original, equality, substituted, sig, out_slot=j
            )
        except PecrError:
            continue
        if line.stmt == want:
            return LineReport(line.index, True, "sr2")
    return LineReport(
        line.index,
        False,
        "statement does not equate an output pair of the cited statements",
    )


# -- connection-list reduction ------------------------------------------------


@dataclass(frozen=True)
class ReductionTrace:
    steps: tuple[tuple[int, ...], ...]
    final: tuple[int, ...]
    redundant_derived: tuple[int, ...]
    redundant_premise: tuple[int, ...]

    @property
    def clean(self) -> bool:
        return not self.redundant_derived and not self.redundant_premise


def reduce_connection_lists(doc: ProofDocument) -> ReductionTrace:
    """Trace the conclusion's connection list back to the premise.

    Walking line indices downward, each index present in the working list is
    replaced by that line's connection list (dedup + reorder); the trace keeps
    one entry per replacement.  Derived lines never absorbed and premise lines
    missing from the final list are reported as redundant.
    """
    n = len(doc.lines)
    m = doc.m
    clist_of = {l.index: list(l.clist) for l in doc.lines if l.derived}
    b = listops.order(listops.unique(clist_of[n]))
    steps = [tuple(b)]
    absorbed = set()
    for i in range(n - 1, m, -1):
        if i in b:
            absorbed.add(i)
            b = listops.minus(b, [i])
            b = listops.unique(listops.conclst(b, clist_of[i]))
            b = listops.order(b)
            steps.append(tuple(b))
    redundant_derived = tuple(i for i in range(m + 1, n) if i not in absorbed)
    redundant_premise = tuple(i for i in range(1, m + 1) if i not in b)
    return ReductionTrace(tuple(steps), tuple(b), redundant_derived, redundant_premise)


def prune_redundant(doc: ProofDocument) -> ProofDocument:
    """Drop derived lines the conclusion never depends on, renumbering."""
    trace = reduce_connection_lists(doc)
    keep = [l.index for l in doc.lines if l.index <= doc.m]
    keep += [
        i for i in range(doc.m + 1, len(doc.lines) + 1)
        if i not in trace.redundant_derived
    ]
    renum = {old: new for new, old in enumerate(keep, start=1)}
    lines = []
    for old in keep:
        line = doc.lines[old - 1]
        clist = tuple(renum[r] for r in line.clist) if line.derived else None
        lines.append(ProofLine(renum[old], line.stmt, line.rule, clist))
    return ProofDocument(doc.label, doc.m, tuple(lines))


# -- proof-matrix export --------------------------------------------------------


def export_proof_matrix(
    doc: ProofDocument,
    sig: AppSignature,
    rule_ids: Mapping[str, int],
    nvar: int = 26,
    nx: Optional[int] = None,
    ny: Optional[int] = None,
    nprem: Optional[int] = None,
) -> tuple[tuple[int, ...], ...]:
    """Rows [i, pn, x padded, y padded, rule id (0 on premise rows), clist
    padded to the premise bound]."""
    nx = sig.mlst.nx if nx is None else nx
    ny = sig.mlst.ny if ny is None else ny
    nprem = sig.mlst.nprem if nprem is None else nprem
    rows = []
    for line in doc.lines:
        stmt = line.stmt
        if len(stmt.x) > nx or len(stmt.y) > ny:
            raise CapacityError(f"line {line.index}: statement arity exceeds ({nx};{ny})")
        row = [line.index, stmt.pn]
        row += [label_code(l, nvar) for l in stmt.x] + [0] * (nx - len(stmt.x))
        row += [label_code(l, nvar) for l in stmt.y] + [0] * (ny - len(stmt.y))
        if line.derived:
            rid = rule_ids.get(line.rule)
            if rid is None:
                raise PecrError(f"no rule id for {line.rule!r}")
            if len(line.clist) > nprem:
                raise CapacityError(
                    f"line {line.index}: connection list longer than {nprem}"
                )
            row.append(rid)
            row += list(line.clist) + [0] * (nprem - len(line.clist))
        else:
            row += [0] * (1 + nprem)
        rows.append(tuple(row))
    return tuple(rows)


def parse_rule_ids(text: str) -> dict[str, int]:
    """``label id`` pairs, one per line."""
    out: dict[str, int] = {}
    for no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ParseError(f"expected 'label id', got {line!r}", no)
        label, sid = parts
        try:
            out[label] = int(sid)
        except ValueError:
            raise ParseError(f"bad rule id {sid!r}", no) from None
    return out


def theorems_match(a: Iep, b: Iep, sig: AppSignature) -> bool:
    """Premises mutually I/O-equivalent with matching conclusions: used to
    compare a checked proof against a separately stated theorem."""
    for left, right in ((a, b), (b, a)):
        sub = induced_subst(left.premise, right.premise)
        if sub is None:
            return False
        c1, c2 = left.conclusion, right.conclusion
        if c1.pn != c2.pn or len(c1.y) != len(c2.y):
            return False
        if tuple(l if l.is_cst else sub.get(l, l) for l in c1.x) != c2.x:
            return False
    return True
