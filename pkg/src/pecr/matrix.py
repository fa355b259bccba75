"""Integer-matrix codec for programs and the matrix form of I/O equivalence.

A program of n statements becomes an n x (1+nx+ny) matrix: column 0 holds the
program-name id, the rest hold label ids padded with nulls (0).  Variables keep
their own ids (bounded by ``nvar``); the m-th constant becomes ``nvar + m``.
The I/O matrix drops column 0; its per-label decomposition into binding
matrices drives the equivalence check used by the proof kernel.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from .errors import CapacityError, PecrError
from .model import (
    AppSignature,
    AtomicProgram,
    Label,
    Program,
    cst,
    lio,
    var,
)

Matrix = tuple[tuple[int, ...], ...]

DEFAULT_NVAR = 26


def label_code(label: Label, nvar: int) -> int:
    if label.kind == "var":
        if label.id > nvar:
            raise CapacityError(f"variable id {label.id} exceeds nvar {nvar}")
        return label.id
    if label.kind == "cst":
        return nvar + label.id
    return 0


def code_label(code: int, nvar: int, sig: AppSignature) -> Label:
    if code == 0:
        raise PecrError("null code has no label")
    if code <= nvar:
        return var(code)
    cid = code - nvar
    if cid > len(sig.cst):
        raise PecrError(f"code {code} beyond constant range")
    return cst(cid)


def encode_program(
    p: Program,
    sig: AppSignature,
    nvar: int = DEFAULT_NVAR,
    nx: Optional[int] = None,
    ny: Optional[int] = None,
) -> Matrix:
    """Encode a program as rows [pn, x padded to nx, y padded to ny]."""
    nx = sig.mlst.nx if nx is None else nx
    ny = sig.mlst.ny if ny is None else ny
    rows = []
    for ap in p:
        if len(ap.x) > nx or len(ap.y) > ny:
            raise CapacityError(
                f"statement arity ({len(ap.x)};{len(ap.y)}) exceeds ({nx};{ny})"
            )
        row = [ap.pn]
        row += [label_code(l, nvar) for l in ap.x] + [0] * (nx - len(ap.x))
        row += [label_code(l, nvar) for l in ap.y] + [0] * (ny - len(ap.y))
        rows.append(tuple(row))
    return tuple(rows)


def decode_program(
    rows: Sequence[Sequence[int]],
    sig: AppSignature,
    nvar: int = DEFAULT_NVAR,
    nx: Optional[int] = None,
    ny: Optional[int] = None,
) -> Program:
    """Invert :func:`encode_program`; rejects labels outside declared arities."""
    nx = sig.mlst.nx if nx is None else nx
    ny = sig.mlst.ny if ny is None else ny
    out: list[AtomicProgram] = []
    for i, row in enumerate(rows, start=1):
        if len(row) != 1 + nx + ny:
            raise PecrError(f"row {i}: expected width {1 + nx + ny}, got {len(row)}")
        pn = row[0]
        if not 1 <= pn <= len(sig.decls):
            raise PecrError(f"row {i}: unknown program id {pn}")
        decl = sig.decl(pn)
        xs, ys = list(row[1 : 1 + nx]), list(row[1 + nx :])
        if not _arity_ok(xs, decl.nx):
            raise PecrError(
                f"row {i}: input where {decl.name!r} declares {decl.nx} slots"
            )
        if not _arity_ok(ys, decl.ny):
            raise PecrError(
                f"row {i}: output where {decl.name!r} declares "
                + ("none" if decl.ny == 0 else str(decl.ny))
            )
        x = tuple(code_label(c, nvar, sig) for c in xs[: decl.nx])
        y = tuple(code_label(c, nvar, sig) for c in ys[: decl.ny])
        for l in y:
            if not l.is_var:
                raise PecrError(f"row {i}: output slot of {decl.name!r} is not a variable")
        out.append(AtomicProgram(pn, x, y))
    return tuple(out)


def _arity_ok(cells: list[int], arity: int) -> bool:
    return all(c != 0 for c in cells[:arity]) and all(c == 0 for c in cells[arity:])


def io_matrix(rows: Matrix) -> Matrix:
    """Strip the program-name column."""
    return tuple(r[1:] for r in rows)


@dataclass(frozen=True)
class LabelMatrix:
    """One component of an I/O-matrix decomposition."""

    label: Label
    code: int
    cells: Matrix  # nonzero entries all equal `code`
    template: Matrix  # binary mask
    binding: bool  # repeated label or bound to a constant


@dataclass(frozen=True)
class DmioDecomposition:
    shape: tuple[int, int]
    parts: tuple[LabelMatrix, ...]

    def reconstruct(self) -> Matrix:
        n, w = self.shape
        acc = [[0] * w for _ in range(n)]
        for part in self.parts:
            for i in range(n):
                for j in range(w):
                    acc[i][j] += part.cells[i][j]
        return tuple(tuple(r) for r in acc)


def decompose_io_matrix(
    mio: Matrix, labels: Sequence[tuple[Label, int]]
) -> DmioDecomposition:
    """Split an I/O matrix into one matrix per distinct label.

    ``labels`` pairs each distinct label with its integer code, in the order
    they should appear (normally the program's distinct-label list).
    """
    n = len(mio)
    w = len(mio[0]) if mio else 0
    known = {code for _, code in labels}
    for i, row in enumerate(mio, start=1):
        for c in row:
            if c != 0 and c not in known:
                raise PecrError(f"row {i}: cell {c} not among the given labels")
    parts = []
    for label, code in labels:
        cells = tuple(
            tuple(code if c == code else 0 for c in row) for row in mio
        )
        template = tuple(tuple(1 if c else 0 for c in row) for row in cells)
        count = sum(sum(row) for row in template)
        parts.append(
            LabelMatrix(
                label=label,
                code=code,
                cells=cells,
                template=template,
                binding=count >= 2 or label.is_cst,
            )
        )
    return DmioDecomposition(shape=(n, w), parts=tuple(parts))


def decompose_program(
    p: Program,
    sig: AppSignature,
    nvar: int = DEFAULT_NVAR,
    nx: Optional[int] = None,
    ny: Optional[int] = None,
) -> DmioDecomposition:
    mio = io_matrix(encode_program(p, sig, nvar=nvar, nx=nx, ny=ny))
    labels = [(l, label_code(l, nvar)) for l in lio(p)]
    return decompose_io_matrix(mio, labels)


# -- binary gates -------------------------------------------------------------


def gate(u: Matrix, v: Matrix, mode: str) -> Matrix:
    """Elementwise AND/OR of two same-shape binary matrices."""
    if len(u) != len(v) or any(len(a) != len(b) for a, b in zip(u, v)):
        raise PecrError("gate operands must have identical shapes")
    if mode == "and":
        return tuple(tuple(a & b for a, b in zip(ru, rv)) for ru, rv in zip(u, v))
    if mode == "or":
        return tuple(tuple(a | b for a, b in zip(ru, rv)) for ru, rv in zip(u, v))
    raise PecrError(f"unknown gate mode {mode!r}")


def gate_and(u: Matrix, v: Matrix) -> Matrix:
    return gate(u, v, "and")


def gate_or(u: Matrix, v: Matrix) -> Matrix:
    return gate(u, v, "or")


def dominates(a: Matrix, b: Matrix) -> bool:
    """True iff and(a, b) == b, i.e. a covers every set cell of b."""
    return gate_and(a, b) == b


# -- I/O equivalence ----------------------------------------------------------


@dataclass(frozen=True)
class IoeqResult:
    ok: bool
    witness: Optional[dict[Label, Label]] = None
    reason: Optional[str] = None

    def __bool__(self) -> bool:
        return self.ok


def _cell_map(p: Program) -> dict[Label, set[tuple[int, int]]]:
    cells: dict[Label, set[tuple[int, int]]] = {}
    for i, ap in enumerate(p):
        for j, l in enumerate(list(ap.x) + list(ap.y)):
            cells.setdefault(l, set()).add((i, j))
    return cells


def ioeq_check(q: Program, p: Program, sig: AppSignature) -> IoeqResult:
    """Decide whether q is I/O-equivalent to the reference program p.

    Every binding pattern of p (a label occupying several cells, or bound to
    a constant) must be dominated by a single-label pattern of q at the same
    cells; constants must be preserved under the same constant label.  The
    relation is reflexive and transitive but not symmetric.
    """
    if len(q) != len(p):
        return IoeqResult(False, reason="length: programs differ in length")
    for i, (qi, pi) in enumerate(zip(q, p), start=1):
        if qi.pn != pi.pn:
            return IoeqResult(
                False, reason=f"name-sequence: item {i} names differ"
            )
        if len(qi.x) != len(pi.x) or len(qi.y) != len(pi.y):
            return IoeqResult(False, reason=f"name-sequence: item {i} arity differs")
    cells_p = _cell_map(p)
    cells_q = _cell_map(q)
    # cell -> q label for witness extraction
    at_q: dict[tuple[int, int], Label] = {}
    for label, cc in cells_q.items():
        for c in cc:
            at_q[c] = label
    witness: dict[Label, Label] = {}
    for label, cc in cells_p.items():
        qlabels = {at_q[c] for c in cc}
        if label.is_cst:
            if qlabels != {label}:
                return IoeqResult(
                    False,
                    reason=f"constant-binding: {sig.label_text(label)} not preserved",
                )
            witness[label] = label
            continue
        if len(cc) >= 2:
            if len(qlabels) != 1:
                return IoeqResult(
                    False,
                    reason=(
                        "binding-template: cells of "
                        f"{sig.label_text(label)} carry several labels"
                    ),
                )
        # single-cell variables are unconstrained; record the covering label
        witness[label] = min(qlabels, key=lambda l: (l.kind, l.id))
    return IoeqResult(True, witness=witness)


# -- plain-text matrix form ----------------------------------------------------


def format_matrix(rows: Matrix, nvar: Optional[int] = None, star: bool = False) -> str:
    """One row per line, space-separated decimals; ``star`` renders nvar+m as m*."""
    out = []
    for row in rows:
        cells = []
        for c in row:
            if star and nvar is not None and c > nvar:
                cells.append(f"{c - nvar}*")
            else:
                cells.append(str(c))
        out.append(" ".join(cells))
    return "\n".join(out)


def parse_matrix(text: str, nvar: Optional[int] = None) -> Matrix:
    rows = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        cells = []
        for tok in line.split():
            if tok.endswith("*"):
                if nvar is None:
                    raise PecrError("starred constant needs nvar")
                cells.append(nvar + int(tok[:-1]))
            else:
                cells.append(int(tok))
        rows.append(tuple(cells))
    return tuple(rows)
