"""Concrete grammar for application, theorem and proof files.

Everything is line oriented.  Tokens are whitespace separated; the characters
``[ ] ( ) ; = | +`` always split into their own tokens, ``#`` starts a comment
and a run of three or more dashes separates a premise from a conclusion.

Statements are written ``name [in ...] [out ...]``.  Proof lines carry a line
number, a statement and (for derived lines) a rule label plus bracketed
connection list.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .errors import ParseError, PecrError
from .kernel import Iep, IepStore, build_conjunction, build_disjunction, validate_iep
from .model import (
    ApDecl,
    AppSignature,
    AtomicProgram,
    CstDecl,
    MachineParams,
    Mlst,
    Program,
)

_PUNCT = re.compile(r"([\[\]();=|+])")
_DASHES = re.compile(r"^-{3,}$")


def tokenize_line(raw: str) -> list[str]:
    text = raw.split("#", 1)[0]
    if _DASHES.match(text.strip()):
        return ["-----"]
    return _PUNCT.sub(r" \1 ", text).split()


class _Tokens:
    def __init__(self, tokens: Sequence[str], line: int):
        self.toks = list(tokens)
        self.pos = 0
        self.line = line

    def peek(self) -> Optional[str]:
        return self.toks[self.pos] if self.pos < len(self.toks) else None

    def next(self) -> str:
        tok = self.peek()
        if tok is None:
            raise ParseError("unexpected end of line", self.line)
        self.pos += 1
        return tok

    def expect(self, tok: str) -> None:
        got = self.next()
        if got != tok:
            raise ParseError(f"expected {tok!r}, got {got!r}", self.line)

    def done(self) -> bool:
        return self.pos >= len(self.toks)

    def rest(self) -> list[str]:
        return self.toks[self.pos :]


def _parse_label_list(ts: _Tokens, sig: AppSignature) -> tuple:
    ts.expect("[")
    labels = []
    while ts.peek() != "]":
        tok = ts.next()
        try:
            labels.append(sig.resolve_label(tok))
        except PecrError as e:
            raise ParseError(str(e), ts.line) from None
    ts.expect("]")
    return tuple(labels)


def parse_statement_tokens(ts: _Tokens, sig: AppSignature) -> AtomicProgram:
    name = ts.next()
    if not sig.has_pn(name):
        raise ParseError(f"unknown program name {name!r}", ts.line)
    x = _parse_label_list(ts, sig)
    y = _parse_label_list(ts, sig)
    return AtomicProgram(sig.pn_of(name), x, y)


def parse_statement(text: str, sig: AppSignature, line: int = 0) -> AtomicProgram:
    ts = _Tokens(tokenize_line(text), line)
    ap = parse_statement_tokens(ts, sig)
    if not ts.done():
        raise ParseError(f"trailing tokens {ts.rest()!r}", line)
    return ap


def _parse_bracketed_program(ts: _Tokens, sig: AppSignature) -> Program:
    """``[pn [x] [y]]`` or ``[[pn [x] [y]] [pn [x] [y]] ...]``."""
    ts.expect("[")
    items: list[AtomicProgram] = []
    if ts.peek() == "[":
        while ts.peek() != "]":
            ts.expect("[")
            items.append(parse_statement_tokens(ts, sig))
            ts.expect("]")
    else:
        items.append(parse_statement_tokens(ts, sig))
    ts.expect("]")
    return tuple(items)


# -- application files ---------------------------------------------------------


@dataclass
class Application:
    sig: AppSignature
    axioms: list[Iep] = field(default_factory=list)
    axiom_labels: list[str] = field(default_factory=list)  # falsity included

    def store(self) -> IepStore:
        store = IepStore(self.sig)
        for iep in self.axioms:
            store.add(iep)
        return store


def _numbered_lines(text: str):
    for no, raw in enumerate(text.splitlines(), start=1):
        toks = tokenize_line(raw)
        if toks:
            yield no, toks


class _AppParser:
    """Sequential parser for application files: header sections (NAME, MACH,
    MLST, TYPES, CONSTANT, PROGRAM, OPERANDS, EQUALITY, TYPECHECK) followed
    by AXIOM blocks."""

    def __init__(self, text: str, defaults: MachineParams):
        self.lines = list(_numbered_lines(text))
        self.pos = 0
        self.name = "app"
        self.mach_fields = {
            "msym": defaults.msym,
            "mstr": defaults.mstr,
            "mnat": defaults.mnat,
        }
        self.mlst_fields = {
            "nprem": defaults.mlst.nprem,
            "npmax": defaults.mlst.npmax,
            "nx": defaults.mlst.nx,
            "ny": defaults.mlst.ny,
        }
        self.app: Optional[Application] = None
        self.pending_operands: list[_Tokens] = []

    def ensure_sig(self) -> AppSignature:
        if self.app is None:
            mach = MachineParams(mlst=Mlst(**self.mlst_fields), **self.mach_fields)
            self.app = Application(AppSignature(self.name, mach))
        return self.app.sig

    def run(self) -> Application:
        while self.pos < len(self.lines):
            no, toks = self.lines[self.pos]
            if toks[0] == "AXIOM":
                break
            ts = _Tokens(toks, no)
            try:
                self.declaration_line(ts)
            except ParseError:
                raise
            except PecrError as e:
                raise ParseError(str(e), no) from None
            self.pos += 1
        sig = self.ensure_sig()
        for ts in self.pending_operands:
            _parse_operands(ts, sig)
        while self.pos < len(self.lines):
            self.axiom_block()
        return self.app

    def declaration_line(self, ts: _Tokens) -> None:
        no = ts.line
        head = ts.next()
        if head in ("NAME", "MACH", "MLST"):
            if self.app is not None:
                raise ParseError(f"{head} must precede declarations", no)
            if head == "NAME":
                self.name = ts.next()
            elif head == "MACH":
                self.parse_kv(ts, self.mach_fields)
            else:
                self.parse_kv(ts, self.mlst_fields)
            return
        sig = self.ensure_sig()
        if head == "TYPES":
            while not ts.done():
                sig.add_type(ts.next())
        elif head == "CONSTANT":
            cname = ts.next()
            ts.expect(":")
            ctype = ts.next()
            ts.expect("=")
            sig.add_constant(CstDecl(cname, ctype, _parse_cst_value(ts, sig)))
        elif head == "PROGRAM":
            self.program_line(ts, sig)
        elif head == "OPERANDS":
            self.pending_operands.append(_Tokens(["OPERANDS"] + ts.rest(), no))
        elif head == "EQUALITY":
            t = ts.next()
            ts.expect("=")
            eq_name = ts.next()
            kind = ts.next()
            if kind not in ("equality", "equivalence"):
                raise ParseError(
                    f"equality kind must name its flavour, got {kind!r}", no
                )
            if t not in sig.tname:
                raise ParseError(f"unknown type {t!r}", no)
            if not sig.has_pn(eq_name):
                raise ParseError(f"unknown program {eq_name!r}", no)
            sig.eqx[t] = (eq_name, kind)
        elif head == "TYPECHECK":
            t = ts.next()
            ts.expect("=")
            checker = ts.next()
            if t not in sig.tname:
                raise ParseError(f"unknown type {t!r}", no)
            if not sig.has_pn(checker):
                raise ParseError(f"unknown program {checker!r}", no)
            sig.typex[t] = checker
        else:
            raise ParseError(f"unknown section {head!r}", no)

    def program_line(self, ts: _Tokens, sig: AppSignature) -> None:
        no = ts.line
        pname = ts.next()
        ts.expect("(")
        in_types, out_types = [], []
        target = in_types
        while ts.peek() != ")":
            tok = ts.next()
            if tok == ";":
                target = out_types
            else:
                target.append(tok)
        ts.expect(")")
        kind = ts.next() if not ts.done() else "fatm"
        subst = True
        if not ts.done():
            flag = ts.next()
            if flag != "nosubst":
                raise ParseError(f"unknown flag {flag!r}", no)
            subst = False
        if kind not in ("fatm", "dsj", "cnj"):
            raise ParseError(f"unknown program kind {kind!r}", no)
        sig.add_decl(ApDecl(pname, tuple(in_types), tuple(out_types), kind, subst))

    def parse_kv(self, ts: _Tokens, fields: dict) -> None:
        while not ts.done():
            key = ts.next()
            ts.expect("=")
            val = ts.next()
            if key not in fields:
                raise ParseError(f"unknown parameter {key!r}", ts.line)
            fields[key] = int(val)

    def axiom_block(self) -> None:
        sig = self.app.sig
        no, toks = self.lines[self.pos]
        ts = _Tokens(toks, no)
        head = ts.next()
        if head != "AXIOM":
            raise ParseError(f"expected AXIOM block, got {head!r}", no)
        label = ts.next()
        if label in self.app.axiom_labels:
            raise ParseError(f"duplicate axiom label {label!r}", no)
        self.pos += 1
        premise: list[AtomicProgram] = []
        seen_sep = False
        conclusion: Optional[AtomicProgram] = None
        is_false = False
        while self.pos < len(self.lines):
            no2, toks2 = self.lines[self.pos]
            if toks2[0] == "AXIOM":
                break
            if toks2 == ["-----"]:
                seen_sep = True
                self.pos += 1
                continue
            ts2 = _Tokens(toks2, no2)
            if not seen_sep:
                premise.append(parse_statement_tokens(ts2, sig))
            elif toks2 == ["false"]:
                is_false = True
            elif conclusion is None:
                conclusion = parse_statement_tokens(ts2, sig)
            else:
                raise ParseError("axiom conclusion must be a single statement", no2)
            self.pos += 1
        if not seen_sep:
            raise ParseError(f"axiom {label!r} lacks a premise separator", no)
        self.app.axiom_labels.append(label)
        if is_false:
            sig.false_programs[label] = tuple(premise)
            if "prgm" in sig.tname:
                sig.add_constant(CstDecl(label, "prgm", tuple(premise)))
        else:
            if conclusion is None:
                raise ParseError(f"axiom {label!r} lacks a conclusion", no)
            iep = Iep(label, tuple(premise), conclusion, "axiom")
            bad = validate_iep(iep, sig)
            if bad:
                raise ParseError(f"axiom {label!r}: {bad[0]}", no)
            self.app.axioms.append(iep)


def parse_application(
    text: str, mach_defaults: Optional[MachineParams] = None
) -> Application:
    return _AppParser(text, mach_defaults or MachineParams()).run()



def _parse_cst_value(ts: _Tokens, sig: AppSignature):
    tok = ts.peek()
    if tok == "[":
        # [] or a bracketed program
        if ts.toks[ts.pos : ts.pos + 2] == ["[", "]"]:
            ts.next(), ts.next()
            return ()
        return _parse_bracketed_program(ts, sig)
    tok = ts.next()
    if tok == "mnat":
        return sig.mach.mnat
    try:
        return int(tok)
    except ValueError:
        raise ParseError(f"bad constant value {tok!r}", ts.line) from None


def _parse_operands(ts: _Tokens, sig: AppSignature) -> None:
    ts.next()  # OPERANDS
    name = ts.next()
    ts.expect("=")
    first = _parse_bracketed_program(ts, sig)
    sep = ts.next()
    second = _parse_bracketed_program(ts, sig)
    if not ts.done():
        raise ParseError("trailing tokens after operands", ts.line)
    if not sig.has_pn(name):
        raise ParseError(f"operands for undeclared program {name!r}", ts.line)
    kind = sig.decl(sig.pn_of(name)).subtype
    try:
        if sep == "|":
            if kind != "dsj":
                raise PecrError(f"{name!r} is declared {kind}, not dsj")
            build_disjunction(first, second, name, sig)
        elif sep == "+":
            if kind != "cnj":
                raise PecrError(f"{name!r} is declared {kind}, not cnj")
            if len(first) != 1 or len(second) != 1:
                raise PecrError("conjunction operands must be single statements")
            build_conjunction(first[0], second[0], name, sig)
        else:
            raise PecrError(f"operand separator must be | or +, got {sep!r}")
    except PecrError as e:
        raise ParseError(str(e), ts.line) from None


def print_application(app: Application) -> str:
    sig = app.sig
    out: list[str] = [f"NAME {sig.name}"]
    m = sig.mach
    out.append(f"MACH msym={m.msym} mstr={m.mstr} mnat={m.mnat}")
    l = m.mlst
    out.append(f"MLST nprem={l.nprem} npmax={l.npmax} nx={l.nx} ny={l.ny}")
    out.append("TYPES " + " ".join(sig.tname))
    for c in sig.cst:
        if c.name in sig.false_programs:
            continue  # re-registered by its axiom block
        out.append(f"CONSTANT {c.name} : {c.type} = {_format_cst_value(c, sig)}")
    composites = []
    for decl in sig.decls:
        sig_txt = " ".join(decl.in_types) + " ; " + " ".join(decl.out_types)
        flag = "" if decl.subst else " nosubst"
        out.append(f"PROGRAM {decl.name} ( {sig_txt} ) {decl.subtype}{flag}")
        if decl.subtype in ("dsj", "cnj") and decl.operands:
            composites.append(decl)
    for decl in composites:
        if decl.subtype == "dsj":
            a, b = decl.operands
            out.append(
                f"OPERANDS {decl.name} = {_hprog(a, sig)} | {_hprog(b, sig)}"
            )
        else:
            (s,) = decl.operands
            out.append(
                f"OPERANDS {decl.name} = {_hprog(s[:1], sig)} + {_hprog(s[1:], sig)}"
            )
    for t, (eq_name, kind) in sig.eqx.items():
        out.append(f"EQUALITY {t} = {eq_name} {kind}")
    for t, checker in sig.typex.items():
        out.append(f"TYPECHECK {t} = {checker}")
    by_label = {a.label: a for a in app.axioms}
    for label in app.axiom_labels:
        out.append(f"AXIOM {label}")
        if label in sig.false_programs:
            for apgm in sig.false_programs[label]:
                out.append(sig.statement_text(apgm))
            out.append("-----")
            out.append("false")
        else:
            iep = by_label[label]
            for stmt in iep.premise:
                out.append(sig.statement_text(stmt))
            out.append("-----")
            out.append(sig.statement_text(iep.conclusion))
    return "\n".join(out) + "\n"


def _format_cst_value(c: CstDecl, sig: AppSignature) -> str:
    if isinstance(c.value, tuple):
        return _hprog(c.value, sig) if c.value else "[]"
    if c.value == sig.mach.mnat and c.name == "mnat":
        return "mnat"
    return str(c.value)


def _hprog(p: Program, sig: AppSignature) -> str:
    if len(p) == 1:
        return f"[{sig.statement_text(p[0])}]"
    return "[" + " ".join(f"[{sig.statement_text(ap)}]" for ap in p) + "]"


# -- theorem files ---------------------------------------------------------------


def parse_thm(text: str, sig: AppSignature, default_label: str = "theorem") -> Iep:
    label = default_label
    premise: list[AtomicProgram] = []
    conclusion: Optional[AtomicProgram] = None
    seen_sep = False
    for no, toks in _numbered_lines(text):
        if toks[0] == "theorem" and len(toks) == 2 and not premise and not seen_sep:
            label = toks[1]
            continue
        if toks == ["-----"]:
            seen_sep = True
            continue
        stmt = parse_statement_tokens(_Tokens(toks, no), sig)
        if seen_sep:
            if conclusion is not None:
                raise ParseError("theorem conclusion must be a single statement", no)
            conclusion = stmt
        else:
            premise.append(stmt)
    if conclusion is None:
        raise ParseError("theorem file lacks a conclusion")
    return Iep(label, tuple(premise), conclusion, "theorem")


def print_thm(iep: Iep, sig: AppSignature) -> str:
    out = [f"theorem {iep.label}"]
    out += [sig.statement_text(s) for s in iep.premise]
    out.append("-----")
    out.append(sig.statement_text(iep.conclusion))
    return "\n".join(out) + "\n"


# -- proof files -----------------------------------------------------------------


@dataclass(frozen=True)
class ProofLine:
    index: int
    stmt: AtomicProgram
    rule: Optional[str] = None
    clist: Optional[tuple[int, ...]] = None

    @property
    def derived(self) -> bool:
        return self.rule is not None


@dataclass(frozen=True)
class ProofDocument:
    label: str
    m: int  # premise length
    lines: tuple[ProofLine, ...]

    @property
    def statements(self) -> Program:
        return tuple(l.stmt for l in self.lines)

    @property
    def premise(self) -> Program:
        return tuple(l.stmt for l in self.lines[: self.m])

    @property
    def conclusion(self) -> AtomicProgram:
        return self.lines[-1].stmt


def parse_proof(text: str, sig: AppSignature, default_label: str = "proof") -> ProofDocument:
    label = default_label
    lines: list[ProofLine] = []
    premise_over = False
    for no, toks in _numbered_lines(text):
        if toks[0] == "theorem" and len(toks) == 2 and not lines:
            label = toks[1]
            continue
        ts = _Tokens(toks, no)
        idx_tok = ts.next()
        try:
            idx = int(idx_tok)
        except ValueError:
            raise ParseError(f"expected line number, got {idx_tok!r}", no) from None
        if idx != len(lines) + 1:
            raise ParseError(f"line numbered {idx}, expected {len(lines) + 1}", no)
        stmt = parse_statement_tokens(ts, sig)
        rule: Optional[str] = None
        clist: Optional[tuple[int, ...]] = None
        if not ts.done():
            rule = ts.next()
            ts.expect("[")
            refs = []
            while ts.peek() != "]":
                tok = ts.next()
                try:
                    refs.append(int(tok))
                except ValueError:
                    raise ParseError(f"bad connection-list entry {tok!r}", no) from None
            ts.expect("]")
            if not ts.done():
                raise ParseError(f"trailing tokens {ts.rest()!r}", no)
            for ref in refs:
                if not 1 <= ref <= idx - 1:
                    raise ParseError(
                        f"connection list references line {ref}, not below {idx}", no
                    )
            clist = tuple(refs)
            premise_over = True
        elif premise_over:
            raise ParseError("premise lines must precede all derived lines", no)
        lines.append(ProofLine(idx, stmt, rule, clist))
    if not lines:
        raise ParseError("empty proof")
    m = sum(1 for l in lines if not l.derived)
    if m == len(lines):
        raise ParseError("proof has no derived lines")
    return ProofDocument(label, m, tuple(lines))


def print_proof(doc: ProofDocument, sig: AppSignature) -> str:
    out = [f"theorem {doc.label}"]
    for line in doc.lines:
        text = f"{line.index} {sig.statement_text(line.stmt)}"
        if line.derived:
            text += f" {line.rule} [" + " ".join(str(r) for r in line.clist) + "]"
        out.append(text)
    return "\n".join(out) + "\n"
