"""Concrete execution of zero-order program lists on value assignments.

Values are machine numbers, integer arrays (flat cells plus a dimension list),
boxes (elementwise-ordered array pairs) and -- for the higher-order pack --
program values.  Statements execute in list order; each one type-checks its
inputs, then checks its relation or computes its outputs, and the first
violation aborts the run.  A disjunction is computable when one of its operand
programs is (tried in declaration order, first success supplies the outputs);
a conjunction runs its internal concatenation.

Statements about extension or falsity judgments have no decision procedure
and are rejected before execution starts.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional

from .errors import ParseError, PecrError
from .model import (
    AppSignature,
    AtomicProgram,
    Label,
    Program,
    binding_profile,
    cst,
    free,
    pol,
    validate_program,
)
from . import listops
from .matrix import ioeq_check

# -- values ---------------------------------------------------------------------


@dataclass(frozen=True)
class NatV:
    n: int


@dataclass(frozen=True)
class ArrV:
    dims: tuple[int, ...]
    cells: tuple[int, ...]

    def __post_init__(self):
        size = 1
        for d in self.dims:
            size *= d
        if size != len(self.cells):
            raise PecrError(f"array dims {self.dims} need {size} cells")

    @classmethod
    def scalar(cls, n: int) -> "ArrV":
        return cls((1,), (n,))


@dataclass(frozen=True)
class BoxV:
    lo: ArrV
    hi: ArrV

    def __post_init__(self):
        if self.lo.dims != self.hi.dims:
            raise PecrError("box bounds must share a dimension list")
        if any(a > b for a, b in zip(self.lo.cells, self.hi.cells)):
            raise PecrError("box lower bound exceeds upper bound")


@dataclass(frozen=True)
class ProgV:
    program: Program
    pseudo_atomic: bool = False  # constructed disjunction/conjunction value


Value = object  # NatV | ArrV | BoxV | ProgV


def type_name(v: Value) -> str:
    if isinstance(v, NatV):
        return "nat"
    if isinstance(v, ArrV):
        return "arr"
    if isinstance(v, BoxV):
        return "box"
    if isinstance(v, ProgV):
        return "prgm"
    raise PecrError(f"unknown value {v!r}")


def is_atomic_prog(v: Value) -> bool:
    return isinstance(v, ProgV) and (len(v.program) == 1 or v.pseudo_atomic)


# -- outcomes --------------------------------------------------------------------


@dataclass(frozen=True)
class ExecutionOutcome:
    status: str  # computable | execution-error | budget-exhausted
    outputs: dict[Label, Value] = field(default_factory=dict)
    failing_index: Optional[int] = None
    cause: Optional[str] = None
    steps: int = 0

    @property
    def computable(self) -> bool:
        return self.status == "computable"


class _Abort(Exception):
    def __init__(self, cause: str):
        self.cause = cause


class _Budget:
    def __init__(self, limit: int):
        self.limit = limit
        self.spent = 0

    def tick(self) -> None:
        self.spent += 1
        if self.spent > self.limit:
            raise _BudgetOut()


class _BudgetOut(Exception):
    pass


JUDGMENT_NAMES = ("ext", "aext", "flse", "aflse")


@dataclass
class MapBinding:
    """Application-specific map semantics for f/itf/bndf statements."""

    fn: Callable[[ArrV], ArrV]
    bound: Callable[[BoxV], BoxV]


def execute_program(
    p: Program,
    va: dict[Label, Value],
    sig: AppSignature,
    budget: int = 10**6,
    mapspec: Optional[MapBinding] = None,
) -> ExecutionOutcome:
    """Run a program list on a value assignment of exactly its free variables;
    outputs are restricted to the primary output list."""
    prof = binding_profile(p)
    missing = [l for l in prof.free if l not in va]
    extra = [l for l in va if l not in prof.free]
    if missing or extra:
        raise PecrError(
            "value assignment must cover the free variables exactly"
            + (f"; missing {[sig.label_text(l) for l in missing]}" if missing else "")
            + (f"; extra {[sig.label_text(l) for l in extra]}" if extra else "")
        )
    for idx, stmt in enumerate(p, start=1):
        if sig.decl(stmt.pn).name in JUDGMENT_NAMES:
            raise PecrError(
                f"item {idx}: {sig.decl(stmt.pn).name!r} statements are judgments "
                "with no decision procedure"
            )
    env: dict[Label, Value] = dict(va)
    for cid, cdecl in enumerate(sig.cst, start=1):
        env[cst(cid)] = _constant_value(cdecl.value, cdecl.type)
    bud = _Budget(budget)
    ctx = _Ctx(sig, mapspec, bud)
    try:
        for idx, stmt in enumerate(p, start=1):
            try:
                _run_statement(stmt, env, ctx)
            except _Abort as a:
                return ExecutionOutcome(
                    "execution-error", {}, idx, a.cause, bud.spent
                )
    except _BudgetOut:
        return ExecutionOutcome("budget-exhausted", {}, None, "deadline", bud.spent)
    outputs = {l: env[l] for l in prof.pol}
    return ExecutionOutcome("computable", outputs, None, None, bud.spent)


def _constant_value(raw, type_name_: str) -> Value:
    if isinstance(raw, tuple):
        return ProgV(raw)
    if isinstance(raw, int):
        if type_name_ == "nat":
            return NatV(raw)
        return NatV(raw)
    raise PecrError(f"constant has no runtime value: {raw!r}")


@dataclass
class _Ctx:
    sig: AppSignature
    mapspec: Optional[MapBinding]
    budget: _Budget


def _run_statement(stmt: AtomicProgram, env: dict[Label, Value], ctx: _Ctx) -> None:
    ctx.budget.tick()
    sig = ctx.sig
    decl = sig.decl(stmt.pn)
    args = []
    for l in stmt.x:
        if l not in env:
            raise _Abort(f"input {sig.label_text(l)} has no value")
        args.append(env[l])
    if decl.subtype == "dsj":
        outs = _run_disjunction(decl, args, env, ctx)
    elif decl.subtype == "cnj":
        outs = _run_conjunction(decl, args, env, ctx)
    else:
        fn = _SEMANTICS.get(decl.name)
        if fn is None:
            raise _Abort(f"no executable semantics for {decl.name!r}")
        outs = fn(args, ctx)
    for l, v in zip(stmt.y, outs):
        env[l] = v


def _run_operand(
    operand: Program, inputs: dict[Label, Value], ctx: _Ctx
) -> Optional[dict[Label, Value]]:
    prof = binding_profile(operand)
    env: dict[Label, Value] = {l: inputs[l] for l in prof.free}
    for cid, cdecl in enumerate(ctx.sig.cst, start=1):
        env[cst(cid)] = _constant_value(cdecl.value, cdecl.type)
    try:
        for item in operand:
            _run_statement(item, env, ctx)
    except _Abort:
        return None
    return {l: env[l] for l in prof.pol}


def _run_disjunction(decl, args, env, ctx: _Ctx) -> list[Value]:
    proto = decl.proto
    if proto is None or decl.operands is None:
        raise _Abort(f"disjunction {decl.name!r} has no registered operands")
    inputs = dict(zip(proto.x, args))
    for operand in decl.operands:
        outs = _run_operand(operand, inputs, ctx)
        if outs is not None:
            return [outs[l] for l in proto.y]
    raise _Abort(f"no operand of {decl.name!r} is computable")


def _run_conjunction(decl, args, env, ctx: _Ctx) -> list[Value]:
    proto = decl.proto
    if proto is None or decl.operands is None:
        raise _Abort(f"conjunction {decl.name!r} has no registered operands")
    inputs = dict(zip(proto.x, args))
    outs = _run_operand(decl.operands[0], inputs, ctx)
    if outs is None:
        raise _Abort(f"internal concatenation of {decl.name!r} failed")
    return [outs[l] for l in proto.y]


# -- builtin statement semantics ---------------------------------------------------


def _want(v: Value, kind, what: str):
    if not isinstance(v, kind):
        raise _Abort(f"expected {what}")
    return v


def _nat(v: Value) -> int:
    return _want(v, NatV, "a machine number").n


def _arr(v: Value) -> ArrV:
    return _want(v, ArrV, "an array")


def _box(v: Value) -> BoxV:
    return _want(v, BoxV, "a box")


def _prog(v: Value) -> ProgV:
    return _want(v, ProgV, "a program")


def _check(cond: bool, cause: str) -> None:
    if not cond:
        raise _Abort(cause)


def _same_dims(a: ArrV, b: ArrV) -> None:
    _check(a.dims == b.dims, "arrays differ in dimensions")


def _sem_typen(args, ctx):
    n = _nat(args[0])
    _check(0 <= n <= ctx.sig.mach.mnat, "machine number out of range")
    return []


def _sem_eqn(args, ctx):
    _check(_nat(args[0]) == _nat(args[1]), "numbers differ")
    return []


def _sem_lt(args, ctx):
    _check(_nat(args[0]) < _nat(args[1]), "not strictly increasing")
    return []


def _sem_typea(args, ctx):
    _arr(args[0])
    return []


def _cellwise(args, rel, cause):
    a, b = _arr(args[0]), _arr(args[1])
    _same_dims(a, b)
    _check(all(rel(x, y) for x, y in zip(a.cells, b.cells)), cause)
    return []


def _sem_eqa(args, ctx):
    return _cellwise(args, lambda x, y: x == y, "arrays differ")


def _sem_lta(args, ctx):
    return _cellwise(args, lambda x, y: x < y, "not elementwise less")


def _sem_lea(args, ctx):
    return _cellwise(args, lambda x, y: x <= y, "not elementwise at most")


def _sem_typebx(args, ctx):
    _box(args[0])
    return []


def _sem_eqbx(args, ctx):
    p, q = _box(args[0]), _box(args[1])
    _check(p.lo == q.lo and p.hi == q.hi, "boxes differ")
    return []


def _sem_eltbx(args, ctx):
    u, p = _arr(args[0]), _box(args[1])
    _same_dims(u, p.lo)
    inside = all(a <= x <= b for a, x, b in zip(p.lo.cells, u.cells, p.hi.cells))
    _check(inside, "array not inside the box")
    return []


def _sem_subbx(args, ctx):
    q, p = _box(args[0]), _box(args[1])
    _same_dims(q.lo, p.lo)
    _check(
        all(a <= c for a, c in zip(p.lo.cells, q.lo.cells))
        and all(d <= b for d, b in zip(q.hi.cells, p.hi.cells)),
        "box not contained",
    )
    return []


def _sem_lbx(args, ctx):
    return [_box(args[0]).lo]


def _sem_ubx(args, ctx):
    return [_box(args[0]).hi]


def _sem_box(args, ctx):
    a, b = _arr(args[0]), _arr(args[1])
    _same_dims(a, b)
    _check(all(x <= y for x, y in zip(a.cells, b.cells)), "bounds out of order")
    return [BoxV(a, b)]


def _sem_f(args, ctx):
    _check(ctx.mapspec is not None, "no map bound for f")
    u = _arr(args[0])
    v = ctx.mapspec.fn(u)
    _check(isinstance(v, ArrV) and v.dims == u.dims, "map result malformed")
    _check(all(0 <= c <= ctx.sig.mach.mnat for c in v.cells), "map escapes machine range")
    return [v]


def _sem_itf(args, ctx):
    _check(ctx.mapspec is not None, "no map bound for itf")
    u, n = _arr(args[0]), _nat(args[1])
    _check(n >= 0, "iteration count negative")
    w = u
    for _ in range(n):
        ctx.budget.tick()
        w = ctx.mapspec.fn(w)
        _check(isinstance(w, ArrV) and w.dims == u.dims, "map result malformed")
        _check(
            all(0 <= c <= ctx.sig.mach.mnat for c in w.cells),
            "iterate escapes machine range",
        )
    return [w]


def _sem_bndf(args, ctx):
    _check(ctx.mapspec is not None, "no map bound for bndf")
    p = _box(args[0])
    q = ctx.mapspec.bound(p)
    _check(isinstance(q, BoxV), "range bound malformed")
    return [q]


def _sem_typep(args, ctx):
    _prog(args[0])
    return []


def _sem_typeap(args, ctx):
    _check(is_atomic_prog(args[0]), "not an atomic program")
    return []


def _prog_sub(q: Program, p: Program) -> bool:
    return all(item in p for item in q)


def _sem_sub(args, ctx):
    q, p = _prog(args[0]), _prog(args[1])
    _check(_prog_sub(q.program, p.program), "not a program sublist")
    return []


def _sem_equiv(args, ctx):
    q, p = _prog(args[0]), _prog(args[1])
    _check(
        _prog_sub(q.program, p.program) and _prog_sub(p.program, q.program),
        "programs not equivalent",
    )
    return []


def _sem_ioeq(args, ctx):
    q, p = _prog(args[0]), _prog(args[1])
    _check(bool(ioeq_check(q.program, p.program, ctx.sig)), "not I/O equivalent")
    return []


def _sem_conc(args, ctx):
    p, q = _prog(args[0]), _prog(args[1])
    s = p.program + q.program
    _check(not validate_program(s, ctx.sig), "concatenation violates dependencies")
    return [ProgV(s)]


def _sem_disj(args, ctx):
    p, q = _prog(args[0]), _prog(args[1])
    _check(
        listops.equivlst(free(p.program), free(q.program)),
        "operand free variables differ",
    )
    _check(
        listops.equivlst(pol(p.program), pol(q.program)),
        "operand primary outputs differ",
    )
    return [ProgV(p.program, pseudo_atomic=True)]


def _sem_conj(args, ctx):
    p, q = _prog(args[0]), _prog(args[1])
    _check(is_atomic_prog(p) and is_atomic_prog(q), "operands must be atomic")
    s = p.program + q.program
    _check(not validate_program(s, ctx.sig), "concatenation violates dependencies")
    return [ProgV(s, pseudo_atomic=True)]


_SEMANTICS = {
    "typen": _sem_typen,
    "eqn": _sem_eqn,
    "lt": _sem_lt,
    "typea": _sem_typea,
    "eqa": _sem_eqa,
    "lta": _sem_lta,
    "lea": _sem_lea,
    "typebx": _sem_typebx,
    "eqbx": _sem_eqbx,
    "eltbx": _sem_eltbx,
    "subbx": _sem_subbx,
    "lbx": _sem_lbx,
    "ubx": _sem_ubx,
    "box": _sem_box,
    "f": _sem_f,
    "itf": _sem_itf,
    "bndf": _sem_bndf,
    "typep": _sem_typep,
    "typeap": _sem_typeap,
    "sub": _sem_sub,
    "equiv": _sem_equiv,
    "ioeq": _sem_ioeq,
    "conc": _sem_conc,
    "disj": _sem_disj,
    "conj": _sem_conj,
}


# -- value assignment files -------------------------------------------------------


def parse_value(text: str) -> Value:
    tokens = text.replace("[", " [ ").replace("]", " ] ").split()
    value, rest = _parse_value_tokens(tokens)
    if rest:
        raise ParseError(f"trailing tokens in value: {rest!r}")
    return value


def _parse_value_tokens(tokens: list[str]):
    if not tokens:
        raise ParseError("empty value")
    tok = tokens[0]
    if tok != "[":
        try:
            return NatV(int(tok)), tokens[1:]
        except ValueError:
            raise ParseError(f"bad scalar {tok!r}") from None
    items, rest = [], tokens[1:]
    while rest and rest[0] != "]":
        item, rest = _parse_value_tokens(rest)
        items.append(item)
    if not rest:
        raise ParseError("unbalanced brackets in value")
    rest = rest[1:]
    return _shape_items(items), rest


def _shape_items(items: list) -> Value:
    if not items:
        raise ParseError("empty list value")
    if all(isinstance(i, NatV) for i in items):
        return ArrV((len(items),), tuple(i.n for i in items))
    if all(isinstance(i, ArrV) for i in items):
        dims = items[0].dims
        if any(i.dims != dims for i in items):
            raise ParseError("ragged nested value")
        if len(items) == 2:
            try:
                return BoxV(items[0], items[1])
            except PecrError:
                pass
        cells = tuple(c for i in items for c in i.cells)
        return ArrV((len(items),) + dims, cells)
    raise ParseError("mixed nesting in value")


def format_value(v: Value) -> str:
    if isinstance(v, NatV):
        return str(v.n)
    if isinstance(v, ArrV):
        return _format_arr(v)
    if isinstance(v, BoxV):
        return f"[{_format_arr(v.lo)} {_format_arr(v.hi)}]"
    raise PecrError(f"cannot format {v!r}")


def _format_arr(a: ArrV) -> str:
    if len(a.dims) == 1:
        return "[" + " ".join(str(c) for c in a.cells) + "]"
    head, rest = a.dims[0], a.dims[1:]
    size = len(a.cells) // head
    subs = [
        _format_arr(ArrV(rest, a.cells[i * size : (i + 1) * size]))
        for i in range(head)
    ]
    return "[" + " ".join(subs) + "]"


def parse_va(text: str, sig: AppSignature) -> dict[Label, Value]:
    out: dict[Label, Value] = {}
    for no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParseError("expected 'label = value'", no)
        name, value_text = line.split("=", 1)
        label = sig.resolve_label(name.strip())
        out[label] = parse_value(value_text.strip())
    return out


# -- soundness probes ----------------------------------------------------------------


@dataclass(frozen=True)
class ProbeStats:
    label: str
    trials: int
    premise_ok: int
    both_ok: int
    violations: int
    first_violation: Optional[dict] = None

    def report(self) -> str:
        return (
            f"trials={self.trials} premise_ok={self.premise_ok} "
            f"both_ok={self.both_ok} violations={self.violations}"
        )


def _free_slot_types(p: Program, sig: AppSignature) -> dict[Label, str]:
    types: dict[Label, str] = {}
    for stmt in p:
        decl = sig.decl(stmt.pn)
        for t, l in zip(decl.in_types + decl.out_types, list(stmt.x) + list(stmt.y)):
            types.setdefault(l, t)
    return {l: types[l] for l in free(p)}


def random_value(
    type_name_: str, rng: random.Random, dims: tuple[int, ...], span: int = 9
) -> Value:
    if type_name_ == "nat":
        return NatV(rng.randint(0, span))
    size = 1
    for d in dims:
        size *= d
    if type_name_ == "arr":
        return ArrV(dims, tuple(rng.randint(0, span) for _ in range(size)))
    if type_name_ == "box":
        lo = [rng.randint(0, span) for _ in range(size)]
        hi = [a + rng.randint(0, span - a) for a in lo]
        return BoxV(ArrV(dims, tuple(lo)), ArrV(dims, tuple(hi)))
    raise PecrError(f"cannot generate values of type {type_name_!r}")


def soundness_probe(
    theorem,
    sig: AppSignature,
    trials: int = 100,
    seed: int = 0,
    exhaustive_nat_max: Optional[int] = None,
    mapspec: Optional[MapBinding] = None,
    span: int = 9,
) -> ProbeStats:
    """Empirical check that premise computability transfers to the extension.

    Draws value assignments for the premise's free variables; whenever the
    premise runs to completion the premise-plus-conclusion program must too.
    With ``exhaustive_nat_max`` and an all-nat free list, enumerates every
    assignment up to that bound instead of sampling.
    """
    slot_types = _free_slot_types(theorem.premise, sig)
    extended = theorem.premise + (theorem.conclusion,)
    rng = random.Random(seed)
    assignments: Iterable[dict[Label, Value]]
    labels = list(slot_types)
    if exhaustive_nat_max is not None and all(
        t == "nat" for t in slot_types.values()
    ):
        assignments = (
            dict(zip(labels, (NatV(v) for v in combo)))
            for combo in itertools.product(
                range(exhaustive_nat_max + 1), repeat=len(labels)
            )
        )
    else:
        def sample():
            for _ in range(trials):
                rank = rng.choice([1, 1, 2])
                dims = tuple(rng.randint(1, 3) for _ in range(rank))
                va: dict[Label, Value] = {}
                drawn: dict[str, list[Value]] = {}
                for l in labels:
                    t = slot_types[l]
                    pool = drawn.setdefault(t, [])
                    # reuse an earlier value sometimes, so equality and
                    # containment premises actually fire
                    if pool and rng.random() < 0.4:
                        va[l] = rng.choice(pool)
                    else:
                        va[l] = random_value(t, rng, dims, span)
                        pool.append(va[l])
                yield va

        assignments = sample()
    total = premise_ok = both_ok = violations = 0
    first = None
    for va in assignments:
        total += 1
        pre = execute_program(theorem.premise, va, sig, mapspec=mapspec)
        if not pre.computable:
            continue
        premise_ok += 1
        ext = execute_program(extended, va, sig, mapspec=mapspec)
        if ext.computable:
            both_ok += 1
        else:
            violations += 1
            if first is None:
                first = {
                    "va": {sig.label_text(l): format_value(v) for l, v in va.items()},
                    "cause": ext.cause,
                    "failing_index": ext.failing_index,
                }
    return ProbeStats(theorem.label, total, premise_ok, both_ok, violations, first)
