"""The trusted inference core.

Rules (axioms and theorems) are irreducible extended programs: a premise
program list plus one atomic conclusion.  Applying a rule to a proof program
means finding an ordered sublist of proof lines that is I/O-equivalent to the
rule's premise, rewriting the conclusion's inputs through the induced label
substitution, and allocating fresh output labels.  The three schemas iot, sr1
and sr2 generate their rule instances on demand from statements already in
the proof.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, Optional

from . import listops
from .errors import CapacityError, PecrError
from .matrix import IoeqResult, ioeq_check
from .model import (
    ApDecl,
    AppSignature,
    AtomicProgram,
    Label,
    Program,
    Violation,
    binding_profile,
    cst,
    free,
    inp,
    max_var_id,
    outp,
    pol,
    validate_atomic,
    validate_program,
    var,
)

SCHEMA_LABELS = ("iot", "sr1", "sr2")


@dataclass(frozen=True)
class Iep:
    """An irreducible extended program: premise list plus atomic conclusion."""

    label: str
    premise: Program
    conclusion: AtomicProgram
    provenance: str = "axiom"  # axiom | theorem | schema


@dataclass(frozen=True)
class MatchResult:
    clist: tuple[int, ...]
    subst: dict[Label, Label] = field(compare=False, hash=False, default_factory=dict)


class FreshLabelAllocator:
    """Hands out the smallest variable ids unused in the current proof."""

    def __init__(self, used: Iterable[int] = ()):  # ids, not labels
        self.used = set(used)

    @classmethod
    def for_program(cls, p: Program) -> "FreshLabelAllocator":
        alloc = cls()
        alloc.observe(p)
        return alloc

    def observe(self, p: Iterable[AtomicProgram]) -> None:
        for ap in p:
            for l in list(ap.x) + list(ap.y):
                if l.is_var:
                    self.used.add(l.id)

    def fresh(self) -> Label:
        vid = 1
        while vid in self.used:
            vid += 1
        self.used.add(vid)
        return var(vid)


# -- structural extension checks ----------------------------------------------


def check_extension_structure(
    p: Program, c: AtomicProgram, sig: AppSignature
) -> list[Violation]:
    """Structural program-extension conditions for conclusion c over premise p.

    Covers the list-validity of conc(p, c) and the requirement that c's inputs
    only use I/O labels of p plus constants.  The semantic computability
    condition is a judgment carried by the rules, never decided here.
    """
    out = list(validate_program(tuple(p) + (c,), sig))
    allowed = listops.chain(inp(p), outp(p)) + [
        cst(i + 1) for i in range(len(sig.cst))
    ]
    for l in c.x:
        if l not in allowed:
            out.append(
                Violation(
                    "conclusion",
                    "fresh-input-variable",
                    f"input {sig.label_text(l)} not in premise I/O or constants",
                )
            )
    return out


def validate_iep(iep: Iep, sig: AppSignature) -> list[Violation]:
    out = list(validate_program(iep.premise, sig))
    out += check_extension_structure(iep.premise, iep.conclusion, sig)
    if len(iep.premise) > sig.mlst.nprem:
        out.append(
            Violation(
                iep.label,
                "premise-length-cap",
                f"{len(iep.premise)} > nprem {sig.mlst.nprem}",
            )
        )
    return out


def premise_reducibility(iep: Iep, sig: AppSignature, bound: int = 6) -> str:
    """Exhaustive strict-sublist probe for the irreducibility condition.

    Returns 'irreducible' when no strict sublist of the premise structurally
    admits the conclusion, 'possibly-reducible' when one does (the semantic
    side is undecidable, so this is only a hint), and 'skipped' for premises
    longer than the bound.
    """
    n = len(iep.premise)
    if n > bound:
        return "skipped"
    for mask in range((1 << n) - 1):
        q = tuple(iep.premise[i] for i in range(n) if mask & (1 << i))
        if not check_extension_structure(q, iep.conclusion, sig):
            return "possibly-reducible"
    return "irreducible"


# -- the rule store -------------------------------------------------------------


class IepStore:
    """Append-only ordered store of axioms and checked theorems."""

    def __init__(self, sig: AppSignature):
        self.sig = sig
        self._by_label: dict[str, Iep] = {}
        self._order: list[str] = []

    def add(self, iep: Iep) -> None:
        if iep.label in SCHEMA_LABELS:
            raise PecrError(f"label {iep.label!r} is reserved for a schema")
        if iep.label in self._by_label:
            raise PecrError(f"rule label {iep.label!r} already stored")
        bad = validate_iep(iep, self.sig)
        if bad:
            raise PecrError(
                f"rule {iep.label!r} is not a valid extended program: {bad[0]}"
            )
        self._by_label[iep.label] = iep
        self._order.append(iep.label)

    def __contains__(self, label: str) -> bool:
        return label in self._by_label

    def get(self, label: str) -> Iep:
        iep = self._by_label.get(label)
        if iep is None:
            raise PecrError(f"unknown rule label {label!r}")
        return iep

    def labels(self) -> list[str]:
        return list(self._order)

    def __iter__(self) -> Iterator[Iep]:
        return (self._by_label[l] for l in self._order)

    def __len__(self) -> int:
        return len(self._order)


# -- premise matching -----------------------------------------------------------


def induced_subst(
    premise: Program, extraction: Program
) -> Optional[dict[Label, Label]]:
    """Positional label map premise -> extraction, or None if inconsistent.

    Constants must map to themselves; repeated premise labels must map to a
    single extraction label.  Distinct premise labels may collapse onto one
    extraction label, matching the asymmetry of I/O equivalence.
    """
    if len(premise) != len(extraction):
        return None
    sub: dict[Label, Label] = {}
    for pit, eit in zip(premise, extraction):
        if pit.pn != eit.pn or len(pit.x) != len(eit.x) or len(pit.y) != len(eit.y):
            return None
        for pl, el in zip(list(pit.x) + list(pit.y), list(eit.x) + list(eit.y)):
            if pl.is_cst:
                if el != pl:
                    return None
                continue
            prev = sub.get(pl)
            if prev is None:
                sub[pl] = el
            elif prev != el:
                return None
    return sub


def extract(proof: Program, clist: Iterable[int]) -> Program:
    return tuple(proof[l - 1] for l in clist)


def match_premise(
    proof: Program,
    iep: Iep,
    sig: AppSignature,
    limit: Optional[int] = None,
) -> list[MatchResult]:
    """All connection lists whose ordered extraction matches the rule premise.

    Results come in lexicographically increasing clist order; line repetitions
    are allowed.  An empty premise yields exactly one empty match.
    """
    premise = iep.premise
    if not premise:
        return [MatchResult(clist=(), subst={})]
    by_pn: dict[int, list[int]] = {}
    for idx, ap in enumerate(proof, start=1):
        by_pn.setdefault(ap.pn, []).append(idx)
    results: list[MatchResult] = []

    def walk(k: int, clist: list[int], sub: dict[Label, Label]) -> bool:
        if limit is not None and len(results) >= limit:
            return False
        if k == len(premise):
            results.append(MatchResult(clist=tuple(clist), subst=dict(sub)))
            return True
        pit = premise[k]
        for idx in by_pn.get(pit.pn, ()):  # increasing line order
            eit = proof[idx - 1]
            if len(eit.x) != len(pit.x) or len(eit.y) != len(pit.y):
                continue
            trial = dict(sub)
            ok = True
            for pl, el in zip(list(pit.x) + list(pit.y), list(eit.x) + list(eit.y)):
                if pl.is_cst:
                    if el != pl:
                        ok = False
                        break
                    continue
                prev = trial.get(pl)
                if prev is None:
                    trial[pl] = el
                elif prev != el:
                    ok = False
                    break
            if not ok:
                continue
            clist.append(idx)
            go_on = walk(k + 1, clist, trial)
            clist.pop()
            if not go_on:
                return False
        return True

    walk(0, [], {})
    return results


def verify_match(
    proof: Program, iep: Iep, clist: Iterable[int], sig: AppSignature
) -> tuple[Optional[dict[Label, Label]], IoeqResult]:
    """Check one given clist against a rule premise via I/O equivalence."""
    extraction = extract(proof, clist)
    res = ioeq_check(extraction, iep.premise, sig)
    if not res.ok:
        return None, res
    sub = induced_subst(iep.premise, extraction)
    if sub is None:
        return None, IoeqResult(False, reason="binding-template: inconsistent map")
    return sub, res


def instantiate_conclusion(
    iep: Iep, subst: dict[Label, Label], alloc: FreshLabelAllocator
) -> AtomicProgram:
    c = iep.conclusion
    x = tuple(l if l.is_cst else subst[l] for l in c.x)
    y = tuple(alloc.fresh() for _ in c.y)
    return AtomicProgram(c.pn, x, y)


def apply_iep(
    proof: Program,
    iep: Iep,
    m: MatchResult,
    alloc: FreshLabelAllocator,
    sig: AppSignature,
) -> AtomicProgram:
    """Instantiate a rule conclusion over a proof; appending it keeps the
    proof a valid program list."""
    if len(proof) + 1 > sig.mlst.npmax:
        raise CapacityError(f"program length would exceed npmax {sig.mlst.npmax}")
    for l in iep.conclusion.x:
        if not l.is_cst and l not in m.subst:
            raise PecrError(
                f"rule {iep.label!r}: conclusion input outside premise labels"
            )
    return instantiate_conclusion(iep, m.subst, alloc)


# -- schemas: iot, sr1, sr2 ------------------------------------------------------


def iot_instances(
    stmt: AtomicProgram, sig: AppSignature
) -> tuple[list[AtomicProgram], list[str]]:
    """Type-checking statements licensed by a computable statement.

    One instance per I/O slot whose declared type has a registered checker;
    slots without one are reported by type name and skipped.
    """
    decl = sig.decl(stmt.pn)
    instances: list[AtomicProgram] = []
    skipped: list[str] = []
    for slot_type, label in zip(
        decl.in_types + decl.out_types, list(stmt.x) + list(stmt.y)
    ):
        checker = sig.typex.get(slot_type)
        if checker is None:
            if slot_type not in skipped:
                skipped.append(slot_type)
            continue
        inst = AtomicProgram(sig.pn_of(checker), (label,), ())
        if inst not in instances:
            instances.append(inst)
    return instances, skipped


def _equality_pair(equality: AtomicProgram) -> tuple[Label, Label]:
    if len(equality.x) != 2 or equality.y:
        raise PecrError("equality statement must have two inputs and no output")
    return equality.x[0], equality.x[1]


def sr1_rewrites(
    original: AtomicProgram, equality: AtomicProgram, sig: AppSignature
) -> list[tuple[Label, ...]]:
    """All input lists reachable from `original` by rewriting one slot under
    the cited equality, in slot order; both orientations are accepted (the
    corpus cites eqX [old new], the schema statement reads eqX [new old] --
    symmetry of every registered equality makes both sound)."""
    decl = sig.decl(original.pn)
    if not decl.subst:
        return []
    eq_name = sig.decl(equality.pn).name
    u, v = _equality_pair(equality)
    seen: list[tuple[Label, ...]] = []
    for k, slot_type in enumerate(decl.in_types):
        registered = sig.eqx.get(slot_type)
        if registered is None or registered[0] != eq_name:
            continue
        for old, new in ((u, v), (v, u)):
            if original.x[k] != old:
                continue
            rewritten = tuple(
                new if i == k else l for i, l in enumerate(original.x)
            )
            if rewritten not in seen:
                seen.append(rewritten)
    return seen


def substitution_instance(
    original: AtomicProgram,
    equality: AtomicProgram,
    substituted: Optional[AtomicProgram],
    sig: AppSignature,
    alloc: Optional[FreshLabelAllocator] = None,
    out_slot: int = 1,
) -> AtomicProgram:
    """One substitution-rule instance.

    Without `substituted` this is the existence form: the first admissible
    single-slot rewrite of `original`, with fresh outputs.  With `substituted`
    it is the equality form: the statement equating output `out_slot` of the
    substituted statement with the original's.
    """
    decl = sig.decl(original.pn)
    if not decl.subst:
        raise PecrError(f"{decl.name!r} is not substitution-eligible")
    if substituted is None:
        rewrites = sr1_rewrites(original, equality, sig)
        if not rewrites:
            raise PecrError("equality does not apply to any input slot")
        if alloc is None:
            alloc = FreshLabelAllocator.for_program((original, equality))
        y = tuple(alloc.fresh() for _ in original.y)
        return AtomicProgram(original.pn, rewrites[0], y)
    if substituted.pn != original.pn:
        raise PecrError("substituted statement names a different program")
    if not _sr_pair_ok(original, equality, substituted, sig):
        raise PecrError("substituted statement is not a single-slot rewrite")
    if not 1 <= out_slot <= decl.ny:
        raise PecrError(f"output slot {out_slot} out of range")
    out_type = decl.out_types[out_slot - 1]
    eq_entry = sig.eqx.get(out_type)
    if eq_entry is None:
        raise PecrError(f"no equality registered for type {out_type!r}")
    in_entry = _slot_equality_kind(original, equality, substituted, sig)
    if in_entry is not None and in_entry != eq_entry[1]:
        raise PecrError("equality and equivalence kinds cannot be mixed")
    return AtomicProgram(
        sig.pn_of(eq_entry[0]),
        (substituted.y[out_slot - 1], original.y[out_slot - 1]),
        (),
    )


def _sr_pair_ok(
    original: AtomicProgram,
    equality: AtomicProgram,
    substituted: AtomicProgram,
    sig: AppSignature,
) -> bool:
    """Does `substituted` differ from `original` by at most the one input slot
    witnessed by `equality` (either orientation)?"""
    decl = sig.decl(original.pn)
    if len(substituted.x) != len(original.x):
        return False
    eq_name = sig.decl(equality.pn).name
    u, v = _equality_pair(equality)
    diffs = [k for k, (a, b) in enumerate(zip(original.x, substituted.x)) if a != b]
    if len(diffs) > 1:
        return False
    if not diffs:
        # identity use: the equality must mention some slot's label on both sides
        if u != v:
            return False
        return any(
            original.x[k] == u
            and sig.eqx.get(t, (None,))[0] == eq_name
            for k, t in enumerate(decl.in_types)
        )
    k = diffs[0]
    registered = sig.eqx.get(decl.in_types[k])
    if registered is None or registered[0] != eq_name:
        return False
    return {original.x[k], substituted.x[k]} == {u, v}


def _slot_equality_kind(
    original: AtomicProgram,
    equality: AtomicProgram,
    substituted: AtomicProgram,
    sig: AppSignature,
) -> Optional[str]:
    decl = sig.decl(original.pn)
    diffs = [k for k, (a, b) in enumerate(zip(original.x, substituted.x)) if a != b]
    slots = diffs or [
        k for k, l in enumerate(original.x) if l == equality.x[0]
    ]
    for k in slots:
        entry = sig.eqx.get(decl.in_types[k])
        if entry is not None and entry[0] == sig.decl(equality.pn).name:
            return entry[1]
    return None


# -- disjunction / conjunction registration --------------------------------------


def _slot_types(p: Program, labels: Iterable[Label], sig: AppSignature) -> list[str]:
    found: dict[Label, str] = {}
    for ap in p:
        decl = sig.decl(ap.pn)
        for t, l in zip(decl.in_types + decl.out_types, list(ap.x) + list(ap.y)):
            prev = found.get(l)
            if prev is None:
                found[l] = t
            elif prev != t:
                raise PecrError(
                    f"label {sig.label_text(l)} used at conflicting types {prev}/{t}"
                )
    out = []
    for l in labels:
        if l not in found:
            raise PecrError(f"label {sig.label_text(l)} missing from operands")
        out.append(found[l])
    return out


def build_disjunction(
    a: Program, b: Program, name: str, sig: AppSignature
) -> AtomicProgram:
    """Register a disjunction program: computable iff an operand is.

    The head's I/O lists carry the first operand's free and primary-output
    labels, ordered by label id so that the printed statement is stable no
    matter how the operand happens to order its inputs.
    """
    fa, fb = free(a), free(b)
    pa, pb = pol(a), pol(b)
    if not listops.equivlst(fa, fb):
        raise PecrError(f"disjunction {name!r}: operand free variables differ")
    if not listops.equivlst(pa, pb):
        raise PecrError(f"disjunction {name!r}: operand primary outputs differ")
    x = tuple(sorted(fa, key=lambda l: l.id))
    y = tuple(sorted(pa, key=lambda l: l.id))
    return _register_composite(name, "dsj", x, y, (tuple(a), tuple(b)), a, sig)


def build_conjunction(
    a: AtomicProgram, b: AtomicProgram, name: str, sig: AppSignature
) -> AtomicProgram:
    """Register a conjunction program: the concatenation of two statements,
    with constants and intermediate outputs stripped from its I/O lists."""
    s: Program = (a, b)
    bad = validate_program(s, sig)
    if bad:
        raise PecrError(f"conjunction {name!r}: invalid concatenation: {bad[0]}")
    prof = binding_profile(s)
    x = tuple(prof.free)
    y = tuple(prof.pol)
    return _register_composite(name, "cnj", x, y, (s,), s, sig)


def _register_composite(
    name: str,
    subtype: str,
    x: tuple[Label, ...],
    y: tuple[Label, ...],
    operands: tuple[Program, ...],
    type_source: Program,
    sig: AppSignature,
) -> AtomicProgram:
    in_types = tuple(_slot_types(type_source, x, sig))
    out_types = tuple(_slot_types(type_source, y, sig))
    if sig.has_pn(name):
        pn = sig.pn_of(name)
        old = sig.decl(pn)
        if (old.in_types, old.out_types, old.subtype) != (in_types, out_types, subtype):
            raise PecrError(f"operands do not match the declaration of {name!r}")
        decl = ApDecl(name, in_types, out_types, subtype, old.subst, operands, None)
    else:
        decl = ApDecl(name, in_types, out_types, subtype, True, operands, None)
        pn = sig.add_decl(decl)
    proto = AtomicProgram(pn, x, y)
    sig.replace_decl(
        pn,
        ApDecl(name, in_types, out_types, subtype, decl.subst, operands, proto),
    )
    return proto


def conclusion_storable(premise: Program, conclusion: AtomicProgram, sig: AppSignature) -> bool:
    """Whether (premise, conclusion) can be stored as a rule."""
    return not check_extension_structure(premise, conclusion, sig)


def fresh_allocator_for(*programs: Iterable[AtomicProgram]) -> FreshLabelAllocator:
    alloc = FreshLabelAllocator()
    for p in programs:
        alloc.observe(p)
    return alloc


def relabel_statement(ap: AtomicProgram, mapping: dict[Label, Label]) -> AtomicProgram:
    return AtomicProgram(
        ap.pn,
        tuple(mapping.get(l, l) for l in ap.x),
        tuple(mapping.get(l, l) for l in ap.y),
    )


def canonical_key(ap: AtomicProgram) -> tuple:
    """Fact identity up to output renaming: outputs are always fresh, so two
    statements with equal names and inputs are the same derived fact."""
    return (ap.pn, ap.x, len(ap.y))


def used_var_ids(p: Program) -> set[int]:
    return {l.id for ap in p for l in list(ap.x) + list(ap.y) if l.is_var}


def ensure_capacity(p: Program, sig: AppSignature) -> None:
    if len(p) > sig.mlst.npmax:
        raise CapacityError(f"program length {len(p)} exceeds npmax")
    if max_var_id(p) < 0:  # pragma: no cover - defensive
        raise PecrError("negative variable id")
