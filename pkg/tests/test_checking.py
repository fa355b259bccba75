"""Proof checking, mutation rejection, reduction and export."""

import pytest

from pecr.apps import corpus_proof_text, nat_rule_ids_text, register_builtin_apps
from pecr.checking import (
    check_proof,
    export_proof_matrix,
    parse_rule_ids,
    prune_redundant,
    reduce_connection_lists,
    theorems_match,
)
from pecr.errors import PecrError
from pecr.kernel import Iep
from pecr.model import var
from pecr.parsing import ProofDocument, ProofLine, parse_proof, parse_statement, parse_thm

from .mutations import mutation_suite

TABLE_27 = (
    (1, 13, 16, 17, 0, 0, 0, 0, 0, 0, 0, 0),
    (2, 13, 17, 18, 0, 0, 0, 0, 0, 0, 0, 0),
    (3, 10, 16, 0, 0, 38, 1, 0, 0, 0, 0, 0),
    (4, 10, 17, 0, 0, 38, 1, 0, 0, 0, 0, 0),
    (5, 10, 18, 0, 0, 38, 2, 0, 0, 0, 0, 0),
    (6, 14, 16, 0, 1, 18, 3, 0, 0, 0, 0, 0),
    (7, 14, 17, 0, 2, 18, 4, 0, 0, 0, 0, 0),
    (8, 14, 18, 0, 3, 18, 5, 0, 0, 0, 0, 0),
    (9, 15, 16, 0, 4, 19, 3, 0, 0, 0, 0, 0),
    (10, 15, 17, 0, 5, 19, 4, 0, 0, 0, 0, 0),
    (11, 15, 18, 0, 6, 19, 5, 0, 0, 0, 0, 0),
    (12, 9, 2, 1, 0, 25, 7, 6, 1, 0, 0, 0),
    (13, 9, 3, 2, 0, 25, 8, 7, 2, 0, 0, 0),
    (14, 9, 4, 5, 0, 26, 10, 9, 1, 0, 0, 0),
    (15, 9, 5, 6, 0, 26, 11, 10, 2, 0, 0, 0),
    (16, 9, 3, 1, 0, 15, 13, 12, 0, 0, 0, 0),
    (17, 9, 4, 6, 0, 15, 14, 15, 0, 0, 0, 0),
    (18, 13, 16, 18, 0, 27, 8, 6, 16, 11, 9, 17),
)

TABLE_28 = [
    [6, 8, 9, 11, 16, 17],
    [6, 8, 9, 11, 14, 15, 16],
    [6, 8, 9, 11, 12, 13, 14, 15],
    [2, 6, 8, 9, 10, 11, 12, 13, 14],
    [1, 2, 6, 8, 9, 10, 11, 12, 13],
    [1, 2, 6, 7, 8, 9, 10, 11, 12],
    [1, 2, 6, 7, 8, 9, 10, 11],
    [1, 2, 5, 6, 7, 8, 9, 10],
    [1, 2, 4, 5, 6, 7, 8, 9],
    [1, 2, 3, 4, 5, 6, 7, 8],
    [1, 2, 3, 4, 5, 6, 7],
    [1, 2, 3, 4, 5, 6],
    [1, 2, 3, 4, 5],
    [1, 2, 3, 4],
    [1, 2, 3],
    [1, 2],
]


def test_corpus_accepted(pecr_checked, nat_checked):
    _, _, pecr_docs = pecr_checked
    _, _, nat_docs = nat_checked
    assert len(pecr_docs) == 26 and len(nat_docs) == 6


def test_checked_theorems_match_their_statements(nat_checked):
    app, store, docs = nat_checked
    stated = parse_thm(
        "theorem thm2\nsubbx [p q] []\nsubbx [q r] []\n-----\nsubbx [p r] []",
        app.sig,
    )
    assert theorems_match(store.get("thm2"), stated, app.sig)
    other = parse_thm(
        "theorem thm2\nsubbx [p q] []\nsubbx [q r] []\n-----\nsubbx [r p] []",
        app.sig,
    )
    assert not theorems_match(store.get("thm2"), other, app.sig)


def test_rejects_unknown_rule(nat_app):
    app, store = nat_app
    doc = parse_proof("1 typebx [p] []\n2 eqbx [p p] [] nosuch [1]\n", app.sig)
    report = check_proof(doc, store, app.sig)
    assert not report.accepted
    assert "unknown rule label" in report.first_failure().detail


def test_rejects_wrong_clist_arity(nat_app):
    app, store = nat_app
    doc = parse_proof("1 typebx [p] []\n2 eqbx [p p] [] bx1 [1 1]\n", app.sig)
    report = check_proof(doc, store, app.sig)
    assert not report.accepted and "takes 1 premise" in report.first_failure().detail


def test_rejects_tampered_clist_in_thm2(nat_checked):
    app, store, docs = nat_checked
    text = corpus_proof_text("nat", "thm2").replace(
        "18 subbx [p r] [] bx4c [8 6 16 11 9 17]",
        "18 subbx [p r] [] bx4c [7 6 16 11 9 17]",
    )
    doc = parse_proof(text, app.sig)
    fresh_app, fresh_store = register_builtin_apps()["nat"]
    report = check_proof(doc, fresh_store, fresh_app.sig)
    assert not report.accepted and report.first_failure().index == 18


def test_mutation_suite_rejects_everything(pecr_checked, nat_checked):
    total = 0
    for name, (app, _, docs) in (("pecr", pecr_checked), ("nat", nat_checked)):
        fresh_app, store = register_builtin_apps()[name]
        sig = fresh_app.sig
        for doc in docs:
            mutants = mutation_suite(doc, sig)
            assert len(mutants) >= 4, doc.label
            for tag, mutant in mutants:
                report = check_proof(mutant, store, sig)
                assert not report.accepted, (name, doc.label, tag)
                total += 1
            report = check_proof(doc, store, sig)
            assert report.accepted
            store.add(report.theorem)
    assert total >= 4 * 32


def test_storable_flag_and_notes(nat_app):
    app, store = nat_app
    # conclusion mentions a derived output: fine as a proof, not as a rule
    text = (
        "1 typebx [p] []\n"
        "2 lbx [p] [a] bx2a [1]\n"
        "3 typea [a] [] iot [2]\n"
    )
    doc = parse_proof(text, app.sig)
    report = check_proof(doc, store, app.sig)
    assert report.accepted and not report.storable
    assert any("not storable" in n for n in report.notes)


def test_reduction_trace_matches_reference(nat_checked):
    app, _, docs = nat_checked
    doc = next(d for d in docs if d.label == "thm2")
    trace = reduce_connection_lists(doc)
    assert [list(s) for s in trace.steps] == TABLE_28
    assert trace.final == (1, 2)
    assert trace.clean


def test_reduction_single_step(nat_app):
    app, store = nat_app
    doc = parse_proof("1 typebx [p] []\n2 eqbx [p p] [] bx1 [1]\n", app.sig)
    trace = reduce_connection_lists(doc)
    assert trace.steps == ((1,),) and trace.final == (1,)


def test_reduction_flags_padded_line(nat_checked):
    app, store, docs = nat_checked
    doc = next(d for d in docs if d.label == "thm2")
    # splice in one unused type-check line just before the conclusion
    lines = list(doc.lines[:-1])
    extra = ProofLine(
        18, parse_statement("typea [a] []", app.sig), "iot", (6,)
    )
    last = doc.lines[-1]
    lines.append(extra)
    lines.append(ProofLine(19, last.stmt, last.rule, last.clist))
    padded = ProofDocument(doc.label, doc.m, tuple(lines))
    fresh_app, fresh_store = register_builtin_apps()["nat"]
    assert check_proof(padded, fresh_store, fresh_app.sig).accepted
    trace = reduce_connection_lists(padded)
    assert trace.redundant_derived == (18,)
    pruned = prune_redundant(padded)
    assert len(pruned.lines) == 18
    assert check_proof(pruned, fresh_store, fresh_app.sig).accepted
    assert reduce_connection_lists(pruned).clean


def test_reduction_steps_are_ordered_and_max_nonincreasing(pecr_checked):
    _, _, docs = pecr_checked
    for doc in docs:
        trace = reduce_connection_lists(doc)
        previous_max = None
        for step in trace.steps:
            assert list(step) == sorted(set(step))
            if step:
                assert previous_max is None or max(step) <= previous_max
                previous_max = max(step)


def test_proof_matrix_export_exact(nat_checked):
    app, _, docs = nat_checked
    doc = next(d for d in docs if d.label == "thm2")
    rule_ids = parse_rule_ids(nat_rule_ids_text())
    rows = export_proof_matrix(doc, app.sig, rule_ids, nvar=26, nx=2, ny=1, nprem=6)
    assert rows == TABLE_27


def test_proof_matrix_missing_rule_id(nat_checked):
    app, _, docs = nat_checked
    doc = next(d for d in docs if d.label == "thm2")
    with pytest.raises(PecrError, match="no rule id"):
        export_proof_matrix(doc, app.sig, {"iot": 38}, nvar=26, nx=2, ny=1, nprem=6)


def test_checker_replays_via_kernel(nat_checked):
    """Line-by-line kernel replay reproduces every derived statement up to
    its fresh output labels."""
    from pecr.kernel import (
        FreshLabelAllocator,
        iot_instances,
        sr1_rewrites,
        substitution_instance,
        verify_match,
        instantiate_conclusion,
        MatchResult,
    )

    app, store, docs = nat_checked
    sig = app.sig
    for doc in docs:
        prefix = doc.premise
        for line in doc.lines[doc.m :]:
            if line.rule == "iot":
                inst, _ = iot_instances(prefix[line.clist[0] - 1], sig)
                assert line.stmt in inst
            elif line.rule == "sr1":
                original = prefix[line.clist[0] - 1]
                equality = prefix[line.clist[1] - 1]
                assert line.stmt.x in sr1_rewrites(original, equality, sig)
            elif line.rule == "sr2":
                i, j, k = line.clist
                got = None
                for out_slot in range(1, len(prefix[i - 1].y) + 1):
                    try:
                        cand = substitution_instance(
                            prefix[i - 1], prefix[j - 1], prefix[k - 1], sig,
                            out_slot=out_slot,
                        )
                    except PecrError:
                        continue
                    if cand == line.stmt:
                        got = cand
                assert got == line.stmt
            else:
                iep = store.get(line.rule)
                subst, _ = verify_match(prefix, iep, line.clist, sig)
                assert subst is not None
                alloc = FreshLabelAllocator.for_program(prefix)
                concl = instantiate_conclusion(iep, subst, alloc)
                assert concl.pn == line.stmt.pn and concl.x == line.stmt.x
                assert len(concl.y) == len(line.stmt.y)
            prefix = prefix + (line.stmt,)
