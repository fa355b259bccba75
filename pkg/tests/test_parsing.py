import pytest

from pecr.apps import builtin_app_text
from pecr.errors import ParseError
from pecr.parsing import (
    parse_application,
    parse_proof,
    parse_statement,
    parse_thm,
    print_application,
    print_proof,
    print_thm,
)


def test_application_inventories(pecr_app, nat_app):
    papp, pstore = pecr_app
    assert [d.name for d in papp.sig.decls] == [
        "typep", "typeap", "equiv", "sub", "ioeq", "ext",
        "flse", "conc", "aext", "aflse", "disj", "conj",
    ]
    assert [c.name for c in papp.sig.cst] == ["ep"]
    assert pstore.labels()[:3] == ["per", "cr1", "cr2"]
    napp, nstore = nat_app
    assert [d.name for d in napp.sig.decls][:5] == ["typen", "eqn", "lt", "le", "trich"]
    assert [c.name for c in napp.sig.cst] == ["0", "1", "mnat"]
    assert len(napp.axiom_labels) == 48
    base = [
        "axn1", "ord1", "ord2a", "ord2b", "ord3", "ord4a", "ord4b", "trich",
        "le1", "le2", "axa1", "axa2", "axa3a", "axa3b", "axa3c", "axa3d",
        "bx1", "bx2a", "bx2b", "bx2c", "bx2d", "bx3a", "bx3b", "bx3c",
        "bx4a", "bx4b", "bx4c", "bx5a", "bx5b", "bx5c",
        "itf1", "itf2a", "itf2b", "itf2c", "bndfa", "bndfb", "axc",
    ]
    assert napp.axiom_labels[: len(base)] == base


def test_falsity_axiom_registers_constant_false_program(nat_app):
    app, store = nat_app
    sig = app.sig
    assert "ord3" in sig.false_programs
    assert sig.program_text(sig.false_programs["ord3"]) == "lt [a a] []"
    assert "ord3" not in store  # no applicable conclusion in this application


def test_substitution_eligibility_flags(pecr_app):
    app, _ = pecr_app
    sig = app.sig
    ineligible = {"ext", "aext", "flse", "aflse", "ioeq"}
    for decl in sig.decls:
        assert decl.subst == (decl.name not in ineligible)


def test_application_round_trip():
    for name in ("pecr", "nat"):
        app = parse_application(builtin_app_text(name))
        printed = print_application(app)
        reparsed = parse_application(printed)
        assert [d.name for d in reparsed.sig.decls] == [d.name for d in app.sig.decls]
        assert reparsed.axiom_labels == app.axiom_labels
        assert [i.label for i in reparsed.axioms] == [i.label for i in app.axioms]
        for a, b in zip(reparsed.axioms, app.axioms):
            assert (a.premise, a.conclusion) == (b.premise, b.conclusion)
        assert print_application(reparsed) == printed


def test_rejects_axiom_with_fresh_conclusion_input(nat_app):
    text = builtin_app_text("nat") + "\nAXIOM broken\ntypen [a] []\n-----\nlt [a z] []\n"
    with pytest.raises(ParseError, match="fresh-input-variable"):
        parse_application(text)


def test_rejects_duplicate_declarations():
    text = "TYPES t\nPROGRAM g ( t ; ) fatm\nPROGRAM g ( t ; ) fatm\n"
    with pytest.raises(ParseError, match="duplicate program name"):
        parse_application(text)


def test_statement_parse_errors(nat_app):
    app, _ = nat_app
    with pytest.raises(ParseError, match="unknown program name"):
        parse_statement("foo [a] []", app.sig)
    with pytest.raises(ParseError, match="neither a constant nor a variable"):
        parse_statement("lt [a xyz] []", app.sig)


def test_proof_round_trip_on_corpus(pecr_checked, nat_checked):
    for app, _, docs in (pecr_checked, nat_checked):
        for doc in docs:
            assert parse_proof(print_proof(doc, app.sig), app.sig) == doc


def test_proof_parse_rejects_forward_reference(nat_app):
    app, _ = nat_app
    text = "1 typebx [p] []\n2 eqbx [p p] [] bx1 [2]\n"
    with pytest.raises(ParseError, match="references line 2"):
        parse_proof(text, app.sig)


def test_proof_parse_rejects_gap_in_numbering(nat_app):
    app, _ = nat_app
    with pytest.raises(ParseError, match="expected 2"):
        parse_proof("1 typebx [p] []\n3 eqbx [p p] [] bx1 [1]\n", app.sig)


def test_proof_parse_rejects_premise_after_derivation(nat_app):
    app, _ = nat_app
    text = "1 typebx [p] []\n2 eqbx [p p] [] bx1 [1]\n3 typebx [q] []\n"
    with pytest.raises(ParseError, match="premise lines must precede"):
        parse_proof(text, app.sig)


def test_thm_round_trip(nat_app):
    app, _ = nat_app
    text = "theorem probe\nsubbx [p q] []\n-----\ntypebx [p] []\n"
    iep = parse_thm(text, app.sig)
    assert iep.label == "probe"
    assert print_thm(iep, app.sig) == text
