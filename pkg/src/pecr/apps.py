"""Built-in application packs and the bundled theorem corpus."""

from __future__ import annotations

from importlib import resources

from .kernel import IepStore
from .parsing import Application, parse_application

_PROOF_ORDER = {
    "pecr": [f"thm{i:02d}" for i in range(1, 27)],
    "nat": [f"thm{i}" for i in range(1, 7)],
}


def _read(name: str) -> str:
    return resources.files("pecr.data").joinpath(name).read_text()


def builtin_app_text(name: str) -> str:
    if name not in ("pecr", "nat"):
        raise ValueError(f"no builtin application {name!r}")
    return _read(f"{name}.app")


def load_builtin_app(name: str) -> Application:
    return parse_application(builtin_app_text(name))


def register_builtin_apps() -> dict[str, tuple[Application, IepStore]]:
    """Fresh signatures and axiom stores for the two bundled applications."""
    out = {}
    for name in ("pecr", "nat"):
        app = load_builtin_app(name)
        out[name] = (app, app.store())
    return out


def corpus_proof_names(app_name: str) -> list[str]:
    return list(_PROOF_ORDER[app_name])


def corpus_proof_text(app_name: str, stem: str) -> str:
    return _read(f"proofs/{app_name}/{stem}.proof")


def corpus_proofs(app_name: str) -> list[tuple[str, str]]:
    """(file stem, text) pairs in dependency order."""
    return [
        (stem, corpus_proof_text(app_name, stem))
        for stem in corpus_proof_names(app_name)
    ]


def nat_rule_ids_text() -> str:
    return _read("nat_rule_ids.txt")
