"""Bounded forward chaining over the rule store.

Facts are the statements of a growing proof program, deduplicated up to their
(always fresh) output labels.  Each round applies every stored rule at every
premise match and generates schema instances (type checks and single-slot
substitutions) from statements already present, until the target conclusion
appears or a budget runs out.  Emitted proofs are pruned down to the lines the
conclusion actually depends on and re-checked before being returned.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Optional

from .checking import check_proof, prune_redundant
from .errors import PecrError
from .kernel import (
    FreshLabelAllocator,
    Iep,
    IepStore,
    canonical_key,
    instantiate_conclusion,
    iot_instances,
    match_premise,
    sr1_rewrites,
    substitution_instance,
)
from .model import AppSignature, AtomicProgram
from .parsing import ProofDocument, ProofLine


@dataclass(frozen=True)
class ProverConfig:
    max_rounds: int = 10
    max_facts: int = 3000
    max_matches_per_rule: int = 2000
    time_budget: float = 50.0
    seed: int = 0

    def __post_init__(self):
        for name in ("max_rounds", "max_facts", "max_matches_per_rule"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")
        if self.time_budget <= 0:
            raise ValueError("time_budget must be positive")


@dataclass
class ProverStats:
    rounds: int = 0
    facts: int = 0
    elapsed: float = 0.0
    outcome: str = "budget-exhausted"


@dataclass
class _Line:
    stmt: AtomicProgram
    rule: Optional[str]
    clist: tuple[int, ...]


class _Search:
    def __init__(self, sig: AppSignature, store: IepStore, target: Iep):
        self.sig = sig
        self.store = store
        self.target = target
        self.lines: list[_Line] = [
            _Line(stmt, None, ()) for stmt in target.premise
        ]
        self.keys = {canonical_key(s): i + 1 for i, s in enumerate(target.premise)}
        self.alloc = FreshLabelAllocator.for_program(target.premise)
        self.alloc.observe((target.conclusion,))
        self.eq_names = {name for name, _kind in sig.eqx.values()}
        self.goal_line: Optional[int] = None

    @property
    def program(self):
        return tuple(l.stmt for l in self.lines)

    def add(self, stmt: AtomicProgram, rule: str, clist: tuple[int, ...]) -> bool:
        key = canonical_key(stmt)
        if key in self.keys:
            return False
        self.lines.append(_Line(stmt, rule, clist))
        self.keys[key] = len(self.lines)
        self.alloc.observe((stmt,))
        if (
            stmt.pn == self.target.conclusion.pn
            and stmt.x == self.target.conclusion.x
            and len(stmt.y) == len(self.target.conclusion.y)
        ):
            self.goal_line = len(self.lines)
        return True

    def is_equality(self, stmt: AtomicProgram) -> bool:
        decl = self.sig.decl(stmt.pn)
        return decl.name in self.eq_names and decl.nx == 2 and decl.ny == 0


def prove(
    target: Iep,
    store: IepStore,
    sig: AppSignature,
    config: ProverConfig = ProverConfig(),
) -> tuple[Optional[ProofDocument], ProverStats]:
    """Search for a proof of the target rule; None when budgets run out.

    Deterministic for a fixed store, target and configuration: rules fire in
    store order, matches in lexicographic connection-list order, schema
    instances in line order.
    """
    search = _Search(sig, store, target)
    stats = ProverStats()
    start = time.monotonic()
    for round_no in range(1, config.max_rounds + 1):
        stats.rounds = round_no
        if search.goal_line is not None:
            break
        progressed = False
        progressed |= _apply_store_rules(search, config, start)
        if search.goal_line is None:
            progressed |= _apply_schemas(search, config, start)
        stats.facts = len(search.lines)
        if search.goal_line is not None:
            break
        if not progressed:
            stats.outcome = "saturated"
            break
        if _out_of_budget(search, config, start):
            break
    stats.facts = len(search.lines)
    stats.elapsed = time.monotonic() - start
    if search.goal_line is None:
        return None, stats
    doc = prune_redundant(_assemble(search, target))
    report = check_proof(doc, store, sig)
    if not report.accepted:  # pragma: no cover - internal consistency guard
        raise PecrError(
            f"prover emitted a rejected proof at line "
            f"{report.first_failure().index}: {report.first_failure().detail}"
        )
    stats.outcome = "proved"
    return doc, stats


def _out_of_budget(search: _Search, config: ProverConfig, start: float) -> bool:
    return (
        len(search.lines) >= config.max_facts
        or time.monotonic() - start > config.time_budget
    )


def _apply_store_rules(search: _Search, config: ProverConfig, start: float) -> bool:
    progressed = False
    for iep in search.store:
        if search.goal_line is not None or _out_of_budget(search, config, start):
            break
        program = search.program
        matches = match_premise(
            program, iep, search.sig, limit=config.max_matches_per_rule
        )
        c = iep.conclusion
        for m in matches:
            if search.goal_line is not None or _out_of_budget(search, config, start):
                break
            want_x = tuple(l if l.is_cst else m.subst[l] for l in c.x)
            if (c.pn, want_x, len(c.y)) in search.keys:
                continue
            stmt = instantiate_conclusion(iep, m.subst, search.alloc)
            progressed |= search.add(stmt, iep.label, m.clist)
    return progressed


def _apply_schemas(search: _Search, config: ProverConfig, start: float) -> bool:
    progressed = False
    snapshot = list(enumerate(search.lines, start=1))
    for i, line in snapshot:
        if search.goal_line is not None or _out_of_budget(search, config, start):
            return progressed
        instances, _ = iot_instances(line.stmt, search.sig)
        for inst in instances:
            progressed |= search.add(inst, "iot", (i,))
    equalities = [(j, l.stmt) for j, l in snapshot if search.is_equality(l.stmt)]
    for i, line in snapshot:
        if search.goal_line is not None or _out_of_budget(search, config, start):
            return progressed
        original = line.stmt
        if not search.sig.subst_eligible(original.pn):
            continue
        for j, equality in equalities:
            for x in sr1_rewrites(original, equality, search.sig):
                if (original.pn, x, len(original.y)) in search.keys:
                    continue
                stmt = AtomicProgram(
                    original.pn, x, tuple(search.alloc.fresh() for _ in original.y)
                )
                progressed |= search.add(stmt, "sr1", (i, j))
    progressed |= _apply_sr2(search, config, start, snapshot, equalities)
    return progressed


def _apply_sr2(search, config, start, snapshot, equalities) -> bool:
    progressed = False
    by_pn: dict[int, list[tuple[int, AtomicProgram]]] = {}
    for i, line in snapshot:
        if line.stmt.y:
            by_pn.setdefault(line.stmt.pn, []).append((i, line.stmt))
    for pn, group in by_pn.items():
        if not search.sig.subst_eligible(pn):
            continue
        ny = search.sig.decl(pn).ny
        for i, original in group:
            for k, substituted in group:
                if k == i:
                    continue
                for j, equality in equalities:
                    if search.goal_line is not None or _out_of_budget(
                        search, config, start
                    ):
                        return progressed
                    for out_slot in range(1, ny + 1):
                        try:
                            stmt = substitution_instance(
                                original,
                                equality,
                                substituted,
                                search.sig,
                                out_slot=out_slot,
                            )
                        except PecrError:
                            continue
                        progressed |= search.add(stmt, "sr2", (i, j, k))
    return progressed


def _assemble(search: _Search, target: Iep) -> ProofDocument:
    assert search.goal_line is not None
    m = len(target.premise)
    needed = set(range(1, m + 1))
    frontier = [search.goal_line]
    while frontier:
        i = frontier.pop()
        if i in needed:
            continue
        needed.add(i)
        frontier.extend(search.lines[i - 1].clist)
    keep = sorted(needed)
    renum = {old: new for new, old in enumerate(keep, start=1)}
    lines = []
    for old in keep:
        line = search.lines[old - 1]
        if line.rule is None:
            lines.append(ProofLine(renum[old], line.stmt))
        else:
            lines.append(
                ProofLine(
                    renum[old],
                    line.stmt,
                    line.rule,
                    tuple(renum[r] for r in line.clist),
                )
            )
    return ProofDocument(target.label, m, tuple(lines))
