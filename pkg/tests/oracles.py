"""Slow reference oracles and random-program machinery for the tests.

The I/O-equivalence oracle below walks the slot-pair conditions directly
(index loops over name sequence, input/input bindings, input/output bindings
and pinned constants) and shares no code with the template-matrix
implementation it cross-checks.
"""

from __future__ import annotations

import random

from pecr.model import (
    ApDecl,
    AppSignature,
    AtomicProgram,
    CstDecl,
    MachineParams,
    Mlst,
    Program,
    cst,
    var,
)


def ioeq_table14(q: Program, p: Program) -> bool:
    """Direct positional statement of the I/O-equivalence conditions."""
    n = len(p)
    if len(q) != n:  # condition 1
        return False
    for m in range(n):  # condition 2
        if q[m].pn != p[m].pn:
            return False
        if len(q[m].x) != len(p[m].x) or len(q[m].y) != len(p[m].y):
            return False
    for m in range(n):  # condition 3: input/input bindings preserved
        for i in range(len(p[m].x)):
            for k in range(n):
                for j in range(len(p[k].x)):
                    if p[m].x[i] == p[k].x[j] and q[m].x[i] != q[k].x[j]:
                        return False
    for m in range(1, n):  # condition 4: input/earlier-output bindings
        for i in range(len(p[m].x)):
            for k in range(m):
                for j in range(len(p[k].y)):
                    if p[m].x[i] == p[k].y[j] and q[m].x[i] != q[k].y[j]:
                        return False
    for m in range(n):  # condition 5: constants pinned
        for i in range(len(p[m].x)):
            if p[m].x[i].is_cst and q[m].x[i] != p[m].x[i]:
                return False
    return True


def small_signature(nx: int = 3, ny: int = 1) -> AppSignature:
    """A synthetic application for randomized structural tests."""
    sig = AppSignature("rand", MachineParams(mlst=Mlst(6, 64, nx, ny)))
    sig.add_type("t")
    shapes = [(1, 0), (2, 0), (1, 1), (2, 1), (3, 0) if nx >= 3 else (2, 0)]
    for idx, (nin, nout) in enumerate(shapes, start=1):
        sig.add_decl(ApDecl(f"g{idx}", ("t",) * nin, ("t",) * min(nout, ny)))
    sig.add_constant(CstDecl("k1", "t", 1))
    sig.add_constant(CstDecl("k2", "t", 2))
    return sig


def random_program(
    sig: AppSignature, rng: random.Random, max_len: int = 6
) -> Program:
    """A structurally valid random program over the synthetic signature."""
    n = rng.randint(1, max_len)
    items = []
    next_var = 1
    available: list = []  # labels usable as inputs
    used_outputs: set = set()
    for _ in range(n):
        decl = sig.decls[rng.randrange(len(sig.decls))]
        pn = sig.pn_of(decl.name)
        x = []
        for _ in decl.in_types:
            roll = rng.random()
            if available and roll < 0.6:
                x.append(rng.choice(available))
            elif roll < 0.75:
                x.append(cst(rng.randint(1, len(sig.cst))))
            else:
                x.append(var(next_var))
                next_var += 1
        y = []
        for _ in decl.out_types:
            y.append(var(next_var))
            used_outputs.add(next_var)
            next_var += 1
        # inputs must never collide with any output, present or future;
        # fresh input vars are drawn from a disjoint id stream, and outputs
        # are never offered for reuse until emitted below
        items.append(AtomicProgram(pn, tuple(x), tuple(y)))
        for l in x:
            if l.is_var and l.id not in used_outputs and l not in available:
                available.append(l)
        for l in y:
            if rng.random() < 0.5:
                available.append(l)
    return tuple(items)


def relabel_injective(p: Program, rng: random.Random, offset: int = 100) -> Program:
    """Rename all variables injectively: equivalent in both directions."""
    ids = sorted({l.id for ap in p for l in list(ap.x) + list(ap.y) if l.is_var})
    shuffled = ids[:]
    rng.shuffle(shuffled)
    mapping = {var(a): var(b + offset) for a, b in zip(ids, shuffled)}
    return tuple(
        AtomicProgram(
            ap.pn,
            tuple(mapping.get(l, l) for l in ap.x),
            tuple(mapping.get(l, l) for l in ap.y),
        )
        for ap in p
    )


def collapse_two_inputs(p: Program, rng: random.Random) -> Program | None:
    """Merge two distinct input-only variables, yielding a program that is
    equivalent to p but strictly more bound: ioeq(result, p) holds while
    ioeq(p, result) must fail."""
    outputs = {l for ap in p for l in ap.y}
    input_only = sorted(
        {l for ap in p for l in ap.x if l.is_var and l not in outputs},
        key=lambda l: l.id,
    )
    if len(input_only) < 2:
        return None
    u, v = rng.sample(input_only, 2)
    return tuple(
        AtomicProgram(
            ap.pn,
            tuple(v if l == u else l for l in ap.x),
            ap.y,
        )
        for ap in p
    )
