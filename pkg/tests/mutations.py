"""Single-point proof corruptions; every corpus proof must reject them all."""

from __future__ import annotations

from pecr.model import AppSignature, AtomicProgram, Label, max_var_id, var
from pecr.parsing import ProofDocument, ProofLine


def _replace_line(doc: ProofDocument, idx: int, line: ProofLine) -> ProofDocument:
    lines = list(doc.lines)
    lines[idx - 1] = line
    return ProofDocument(doc.label, doc.m, tuple(lines))


def mutate_clist(doc: ProofDocument) -> ProofDocument | None:
    """Swap two distinct connection-list entries, or failing that move one
    entry to a different earlier line."""
    for line in doc.lines[doc.m :]:
        cl = list(line.clist)
        distinct = sorted(set(cl))
        if len(distinct) >= 2:
            a, b = distinct[0], distinct[1]
            swapped = [b if e == a else a if e == b else e for e in cl]
            return _replace_line(
                doc, line.index, ProofLine(line.index, line.stmt, line.rule, tuple(swapped))
            )
    for line in doc.lines[doc.m :]:
        cl = list(line.clist)
        if cl and line.index > 2:
            alt = 1 if cl[0] != 1 else 2
            if alt < line.index:
                cl[0] = alt
                return _replace_line(
                    doc, line.index, ProofLine(line.index, line.stmt, line.rule, tuple(cl))
                )
    return None


def mutate_output_clash(doc: ProofDocument, sig: AppSignature) -> ProofDocument | None:
    """Rename one derived output to collide with an earlier label; proofs
    without output-bearing derived lines get one derived input renamed to a
    variable nothing binds."""
    for line in doc.lines[doc.m :]:
        if not line.stmt.y:
            continue
        earlier: list[Label] = []
        for prev in doc.lines[: line.index - 1]:
            earlier += [l for l in list(prev.stmt.x) + list(prev.stmt.y) if l.is_var]
        if not earlier:
            continue
        y = (earlier[0],) + line.stmt.y[1:]
        stmt = AtomicProgram(line.stmt.pn, line.stmt.x, y)
        return _replace_line(
            doc, line.index, ProofLine(line.index, stmt, line.rule, line.clist)
        )
    fresh = var(max_var_id(doc.statements) + 1)
    for line in doc.lines[doc.m :]:
        if line.stmt.x:
            x = (fresh,) + line.stmt.x[1:]
            stmt = AtomicProgram(line.stmt.pn, x, line.stmt.y)
            return _replace_line(
                doc, line.index, ProofLine(line.index, stmt, line.rule, line.clist)
            )
    return None


def mutate_pn(doc: ProofDocument, sig: AppSignature) -> ProofDocument | None:
    """Rename the program of one derived statement, keeping arities."""
    for line in doc.lines[doc.m :]:
        decl = sig.decl(line.stmt.pn)
        for pn in range(1, len(sig.decls) + 1):
            other = sig.decl(pn)
            if pn == line.stmt.pn:
                continue
            if (other.nx, other.ny) == (decl.nx, decl.ny):
                stmt = AtomicProgram(pn, line.stmt.x, line.stmt.y)
                return _replace_line(
                    doc, line.index, ProofLine(line.index, stmt, line.rule, line.clist)
                )
    return None


def mutate_drop_premise(doc: ProofDocument) -> ProofDocument | None:
    """Remove the first premise line, shifting every later reference down."""
    if doc.m < 1 or len(doc.lines) < 3:
        return None
    lines = []
    for line in doc.lines[1:]:
        clist = None
        if line.derived:
            clist = tuple(max(1, r - 1) for r in line.clist)
        lines.append(ProofLine(line.index - 1, line.stmt, line.rule, clist))
    return ProofDocument(doc.label, doc.m - 1, tuple(lines))


def mutation_suite(doc: ProofDocument, sig: AppSignature):
    out = []
    for tag, mutant in (
        ("clist", mutate_clist(doc)),
        ("output-clash", mutate_output_clash(doc, sig)),
        ("pn-change", mutate_pn(doc, sig)),
        ("drop-premise", mutate_drop_premise(doc)),
    ):
        if mutant is not None:
            out.append((tag, mutant))
    return out
