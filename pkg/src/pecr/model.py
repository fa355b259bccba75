"""Program data model: machine parameters, labels, atomic programs, program
lists, I/O dependency validation and variable-binding profiles.

Everything here is immutable once built; an :class:`AppSignature` is filled in
by the application parser (or by hand in tests) and then treated as frozen, so
values can be shared freely across threads.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Optional, Union

from . import listops
from .errors import PecrError

LETTERS = "abcdefghijklmnopqrstuvwxyz"

_VAR_RE = re.compile(r"^([a-z])([0-9]+)?$")


def var_text(vid: int) -> str:
    """Render a variable id: 1..26 -> a..z, 27..52 -> a1..z1, and so on."""
    if vid < 1:
        raise ValueError(f"variable id must be positive, got {vid}")
    cycle, pos = divmod(vid - 1, 26)
    return LETTERS[pos] + (str(cycle) if cycle else "")


def var_id(text: str) -> int:
    m = _VAR_RE.match(text)
    if not m:
        raise ValueError(f"not a variable name: {text!r}")
    letter, cycle = m.groups()
    return (ord(letter) - ord("a") + 1) + 26 * int(cycle or 0)


def is_var_text(text: str) -> bool:
    return bool(_VAR_RE.match(text))


@dataclass(frozen=True)
class Mlst:
    """List-size bounds: premise length, program length, input/output arity."""

    nprem: int = 9
    npmax: int = 64
    nx: int = 3
    ny: int = 1

    def __post_init__(self):
        for name in ("nprem", "npmax", "nx", "ny"):
            if getattr(self, name) < 1:
                raise ValueError(f"mlst.{name} must be >= 1")
        if self.nprem > self.npmax:
            raise ValueError("nprem must not exceed npmax")


@dataclass(frozen=True)
class MachineParams:
    msym: int = 128
    mstr: int = 4096
    mnat: int = 2**31 - 1
    mlst: Mlst = field(default_factory=Mlst)

    def __post_init__(self):
        for name in ("msym", "mstr", "mnat"):
            if getattr(self, name) < 1:
                raise ValueError(f"mach.{name} must be >= 1")


@dataclass(frozen=True)
class Label:
    """An interned I/O label: variable, constant, or null (codec padding)."""

    kind: str  # "var" | "cst" | "null"
    id: int

    def __post_init__(self):
        if self.kind not in ("var", "cst", "null"):
            raise ValueError(f"bad label kind {self.kind!r}")
        if self.kind == "null" and self.id != 0:
            raise ValueError("null label must have id 0")
        if self.kind != "null" and self.id < 1:
            raise ValueError("label id must be positive")

    @property
    def is_var(self) -> bool:
        return self.kind == "var"

    @property
    def is_cst(self) -> bool:
        return self.kind == "cst"


def var(vid: int) -> Label:
    return Label("var", vid)


def cst(cid: int) -> Label:
    return Label("cst", cid)


NULL = Label("null", 0)


@dataclass(frozen=True)
class AtomicProgram:
    """One statement ``pn x y``: a program name with input and output labels."""

    pn: int
    x: tuple[Label, ...]
    y: tuple[Label, ...]


Program = tuple[AtomicProgram, ...]


@dataclass(frozen=True)
class ApDecl:
    """Declared shape of an atomic program name.

    ``subtype`` is one of fatm/dsj/cnj; dsj and cnj declarations carry their
    operand programs plus the registration statement (``proto``) whose labels
    anchor the operand bindings at execution time.
    """

    name: str
    in_types: tuple[str, ...]
    out_types: tuple[str, ...]
    subtype: str = "fatm"
    subst: bool = True
    operands: Optional[tuple[Program, ...]] = None
    proto: Optional[AtomicProgram] = None

    @property
    def nx(self) -> int:
        return len(self.in_types)

    @property
    def ny(self) -> int:
        return len(self.out_types)


@dataclass(frozen=True)
class CstDecl:
    name: str
    type: str
    value: Union[int, Program, None]


@dataclass(frozen=True)
class Violation:
    where: str
    code: str
    detail: str

    def __str__(self) -> str:
        return f"{self.where}: {self.code}: {self.detail}"


class AppSignature:
    """An application: program names, types, constants and rule registries.

    Built incrementally by the parser; treat as immutable afterwards.
    """

    def __init__(self, name: str, mach: MachineParams):
        self.name = name
        self.mach = mach
        self.tname: list[str] = []
        self.decls: list[ApDecl] = []
        self.cst: list[CstDecl] = []
        self.eqx: dict[str, tuple[str, str]] = {}  # type -> (eqX name, kind)
        self.typex: dict[str, str] = {}  # type -> typeX name
        self.false_programs: dict[str, Program] = {}  # label -> premise program
        self._pn_by_name: dict[str, int] = {}
        self._cst_by_name: dict[str, int] = {}

    # -- construction ------------------------------------------------------

    def add_type(self, tname: str) -> None:
        if tname in self.tname:
            raise PecrError(f"duplicate type name {tname!r}")
        self.tname.append(tname)

    def add_decl(self, decl: ApDecl) -> int:
        if decl.name in self._pn_by_name:
            raise PecrError(f"duplicate program name {decl.name!r}")
        for t in decl.in_types + decl.out_types:
            if t not in self.tname:
                raise PecrError(f"program {decl.name!r} uses unknown type {t!r}")
        if decl.nx > self.mach.mlst.nx or decl.ny > self.mach.mlst.ny:
            raise PecrError(f"program {decl.name!r} arity exceeds mlst bounds")
        self.decls.append(decl)
        self._pn_by_name[decl.name] = len(self.decls)
        return len(self.decls)

    def replace_decl(self, pn: int, decl: ApDecl) -> None:
        if self.decls[pn - 1].name != decl.name:
            raise PecrError("replace_decl must keep the program name")
        self.decls[pn - 1] = decl

    def add_constant(self, cdecl: CstDecl) -> int:
        if cdecl.name in self._cst_by_name:
            raise PecrError(f"duplicate constant {cdecl.name!r}")
        self.cst.append(cdecl)
        self._cst_by_name[cdecl.name] = len(self.cst)
        return len(self.cst)

    # -- lookups -----------------------------------------------------------

    @property
    def mlst(self) -> Mlst:
        return self.mach.mlst

    def pn_of(self, name: str) -> int:
        pn = self._pn_by_name.get(name)
        if pn is None:
            raise PecrError(f"unknown program name {name!r}")
        return pn

    def has_pn(self, name: str) -> bool:
        return name in self._pn_by_name

    def decl(self, pn: int) -> ApDecl:
        if not 1 <= pn <= len(self.decls):
            raise PecrError(f"program id {pn} out of range")
        return self.decls[pn - 1]

    def has_cst(self, name: str) -> bool:
        return name in self._cst_by_name

    def cst_id(self, name: str) -> int:
        cid = self._cst_by_name.get(name)
        if cid is None:
            raise PecrError(f"unknown constant {name!r}")
        return cid

    def cst_decl(self, cid: int) -> CstDecl:
        return self.cst[cid - 1]

    def label_text(self, label: Label) -> str:
        if label.kind == "var":
            return var_text(label.id)
        if label.kind == "cst":
            return self.cst[label.id - 1].name
        return "0"

    def resolve_label(self, token: str) -> Label:
        if token in self._cst_by_name:
            return cst(self._cst_by_name[token])
        if is_var_text(token):
            return var(var_id(token))
        raise PecrError(f"token {token!r} is neither a constant nor a variable name")

    def subst_eligible(self, pn: int) -> bool:
        return self.decl(pn).subst

    def statement_text(self, ap: AtomicProgram) -> str:
        xs = " ".join(self.label_text(l) for l in ap.x)
        ys = " ".join(self.label_text(l) for l in ap.y)
        return f"{self.decl(ap.pn).name} [{xs}] [{ys}]"

    def program_text(self, p: Program) -> str:
        return "\n".join(self.statement_text(ap) for ap in p)


# -- binding profiles -------------------------------------------------------


@dataclass(frozen=True)
class BindingProfile:
    inp: tuple[Label, ...]
    outp: tuple[Label, ...]
    lio: tuple[Label, ...]
    pil: tuple[Label, ...]
    free: tuple[Label, ...]
    pol: tuple[Label, ...]


def inp(p: Program) -> list[Label]:
    return listops.chain(*[list(ap.x) for ap in p]) if p else []


def outp(p: Program) -> list[Label]:
    return listops.chain(*[list(ap.y) for ap in p]) if p else []


def lio(p: Program) -> list[Label]:
    return listops.unique(listops.conclst(inp(p), outp(p)))


def binding_profile(p: Program) -> BindingProfile:
    ins, outs = inp(p), outp(p)
    pil = listops.unique(listops.minus(ins, outs))
    free = [l for l in pil if not l.is_cst]
    pol = listops.minus(outs, ins)
    return BindingProfile(
        inp=tuple(ins),
        outp=tuple(outs),
        lio=tuple(listops.unique(listops.conclst(ins, outs))),
        pil=tuple(pil),
        free=tuple(free),
        pol=tuple(pol),
    )


def free(p: Program) -> list[Label]:
    return list(binding_profile(p).free)


def pol(p: Program) -> list[Label]:
    return list(binding_profile(p).pol)


# -- structural validation ---------------------------------------------------


def validate_atomic(ap: AtomicProgram, sig: AppSignature) -> list[Violation]:
    """Check the I/O list conditions of a single statement."""
    out: list[Violation] = []
    where = "statement"
    if not 1 <= ap.pn <= len(sig.decls):
        return [Violation(where, "unknown-program-name", f"program id {ap.pn}")]
    decl = sig.decl(ap.pn)
    where = decl.name
    if len(ap.x) != decl.nx or len(ap.y) != decl.ny:
        out.append(
            Violation(
                where,
                "arity-mismatch",
                f"declared ({decl.nx};{decl.ny}), got ({len(ap.x)};{len(ap.y)})",
            )
        )
    if len(ap.x) > sig.mlst.nx or len(ap.y) > sig.mlst.ny:
        out.append(Violation(where, "arity-cap", "I/O list longer than mlst allows"))
    for l in ap.x:
        if l.kind == "null":
            out.append(Violation(where, "input-not-var-or-cst", "null label in input"))
        elif l.is_cst and not 1 <= l.id <= len(sig.cst):
            out.append(Violation(where, "input-not-var-or-cst", f"constant id {l.id}"))
    for l in ap.y:
        if not l.is_var:
            out.append(Violation(where, "output-not-var", sig.label_text(l) if l.is_cst else "null"))
    shared = listops.cap(list(ap.x), list(ap.y))
    if shared:
        out.append(
            Violation(
                where,
                "shared-input-output-label",
                " ".join(sig.label_text(l) for l in shared),
            )
        )
    if listops.unique(list(ap.y)) != list(ap.y):
        out.append(Violation(where, "duplicate-output-in-statement", sig.statement_text(ap)))
    return out


def validate_program(p: Program, sig: AppSignature) -> list[Violation]:
    """Check the I/O dependency conditions of a whole program list."""
    out: list[Violation] = []
    if len(p) > sig.mlst.npmax:
        out.append(Violation("program", "length-cap", f"{len(p)} items > npmax {sig.mlst.npmax}"))
    for m, ap in enumerate(p, start=1):
        for v in validate_atomic(ap, sig):
            out.append(Violation(f"item {m}", v.code, v.detail))
    seen_out: dict[Label, int] = {}
    for m, ap in enumerate(p, start=1):
        for l in ap.y:
            if l in seen_out:
                out.append(
                    Violation(
                        f"item {m}",
                        "duplicate-output-label",
                        f"{sig.label_text(l)} also output of item {seen_out[l]}",
                    )
                )
            else:
                seen_out[l] = m
    for m, ap in enumerate(p, start=1):
        for k in range(m, len(p) + 1):
            clash = listops.cap(list(ap.x), list(p[k - 1].y))
            if clash:
                out.append(
                    Violation(
                        f"item {m}",
                        "input-bound-to-later-output",
                        f"{sig.label_text(clash[0])} is an output of item {k}",
                    )
                )
    return out


def max_var_id(p: Iterable[AtomicProgram]) -> int:
    best = 0
    for ap in p:
        for l in list(ap.x) + list(ap.y):
            if l.is_var:
                best = max(best, l.id)
    return best
