import pytest

from pecr.apps import corpus_proofs, register_builtin_apps
from pecr.checking import check_proof
from pecr.parsing import parse_proof


def build_app(name: str):
    return register_builtin_apps()[name]


def checked_corpus(name: str):
    """(app, store with all corpus theorems, list of accepted documents)."""
    app, store = build_app(name)
    docs = []
    for stem, text in corpus_proofs(name):
        doc = parse_proof(text, app.sig)
        report = check_proof(doc, store, app.sig)
        assert report.accepted, (stem, report.first_failure())
        store.add(report.theorem)
        docs.append(doc)
    return app, store, docs


@pytest.fixture(scope="session")
def pecr_app():
    return build_app("pecr")


@pytest.fixture(scope="session")
def nat_app():
    return build_app("nat")


@pytest.fixture(scope="session")
def pecr_checked():
    return checked_corpus("pecr")


@pytest.fixture(scope="session")
def nat_checked():
    return checked_corpus("nat")
