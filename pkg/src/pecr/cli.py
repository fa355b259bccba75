"""Batch command-line front end.

Exit codes: 0 success, 1 check/relation failed, 2 parse or usage error,
3 search budget exhausted.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Optional

from .apps import builtin_app_text, nat_rule_ids_text
from .checking import (
    check_proof,
    export_proof_matrix,
    parse_rule_ids,
    reduce_connection_lists,
)
from .errors import PecrError
from .kernel import IepStore
from .matrix import (
    decompose_program,
    encode_program,
    format_matrix,
    io_matrix,
    ioeq_check,
)
from .model import AppSignature, MachineParams, Mlst, Program
from .parsing import (
    Application,
    parse_application,
    parse_proof,
    parse_statement,
    parse_thm,
    print_proof,
)
from .prover import ProverConfig, prove
from .runtime import execute_program, format_value, parse_va, soundness_probe
from . import dynsys


def _read_text(path: str) -> str:
    if path in ("pecr", "nat"):
        return builtin_app_text(path)
    return Path(path).read_text()


def _load_app(args) -> tuple[Application, IepStore]:
    """Parse an application; --mach/--mlst set the defaults an application
    file may still override with its own MACH/MLST sections."""
    text = _read_text(args.app)
    defaults = MachineParams()
    if args.mach or args.mlst:
        mach_vals = [int(v) for v in args.mach.split(",")] if args.mach else None
        mlst_vals = [int(v) for v in args.mlst.split(",")] if args.mlst else None
        defaults = _machine(mach_vals, mlst_vals, defaults)
    app = parse_application(text, defaults)
    return app, app.store()


def _machine(mach_vals, mlst_vals, base: MachineParams) -> MachineParams:
    msym, mstr, mnat = base.msym, base.mstr, base.mnat
    if mach_vals:
        if len(mach_vals) != 3:
            raise PecrError("--mach takes msym,mstr,mnat")
        msym, mstr, mnat = mach_vals
    mlst = base.mlst
    if mlst_vals:
        if len(mlst_vals) != 4:
            raise PecrError("--mlst takes nprem,npmax,nx,ny")
        mlst = Mlst(*mlst_vals)
    return MachineParams(msym, mstr, mnat, mlst)


def _parse_program_file(path: str, sig: AppSignature) -> Program:
    items = []
    for no, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line or line.startswith("---"):
            continue
        items.append(parse_statement(line, sig, no))
    return tuple(items)


def _check_and_store(path: str, app, store, quiet=False) -> bool:
    doc = parse_proof(Path(path).read_text(), app.sig, default_label=Path(path).stem)
    report = check_proof(doc, store, app.sig)
    if not report.accepted:
        failure = report.first_failure()
        where = f"line {failure.index}" if failure.index else "structure"
        print(f"{doc.label}: REJECTED at {where}: {failure.detail}")
        return False
    if not quiet:
        print(f"{doc.label}: accepted ({len(doc.lines)} lines)")
    for note in report.notes:
        print(f"{doc.label}: note: {note}")
    if report.storable and doc.label not in store:
        store.add(report.theorem)
    return True


def cmd_check(args) -> int:
    app, store = _load_app(args)
    for path in args.proofs:
        if not _check_and_store(path, app, store, quiet=args.quiet):
            return 1
    return 0


def cmd_prove(args) -> int:
    app, store = _load_app(args)
    for path in args.lemma or []:
        if not _check_and_store(path, app, store, quiet=True):
            print(f"lemma {path} rejected", file=sys.stderr)
            return 1
    target = parse_thm(
        Path(args.thm).read_text(), app.sig, default_label=Path(args.thm).stem
    )
    config = ProverConfig(
        max_rounds=args.depth,
        max_facts=args.facts,
        time_budget=args.time,
        seed=args.seed,
    )
    doc, stats = prove(target, store, app.sig, config)
    if doc is None:
        print(
            f"{target.label}: no proof within budget "
            f"({stats.outcome}, rounds={stats.rounds}, facts={stats.facts})"
        )
        return 3
    text = print_proof(doc, app.sig)
    if args.out:
        Path(args.out).write_text(text)
        print(f"{target.label}: proved ({len(doc.lines)} lines) -> {args.out}")
    else:
        sys.stdout.write(text)
    return 0


def cmd_reduce(args) -> int:
    app, store = _load_app(args)
    doc = parse_proof(
        Path(args.proof).read_text(), app.sig, default_label=Path(args.proof).stem
    )
    trace = reduce_connection_lists(doc)
    for step in trace.steps:
        print("[" + " ".join(str(i) for i in step) + "]")
    if trace.redundant_derived:
        print("redundant derived lines:", " ".join(map(str, trace.redundant_derived)))
    if trace.redundant_premise:
        print("redundant premise lines:", " ".join(map(str, trace.redundant_premise)))
    if trace.clean:
        print("no redundant lines")
    return 0


def cmd_encode(args) -> int:
    app, _ = _load_app(args)
    nx, ny = app.sig.mlst.nx, app.sig.mlst.ny
    nprem = app.sig.mlst.nprem
    if args.shape:
        dims = [int(v) for v in args.shape.split(",")]
        if len(dims) == 2:
            nx, ny = dims
        elif len(dims) == 3:
            nx, ny, nprem = dims
        else:
            raise PecrError("--shape takes nx,ny or nx,ny,nprem")
    if args.proof:
        doc = parse_proof(
            Path(args.proof).read_text(), app.sig, default_label=Path(args.proof).stem
        )
        ids_text = (
            nat_rule_ids_text() if args.rule_ids == "nat" else Path(args.rule_ids).read_text()
        )
        rows = export_proof_matrix(
            doc,
            app.sig,
            parse_rule_ids(ids_text),
            nvar=args.nvar,
            nx=nx,
            ny=ny,
            nprem=nprem,
        )
    else:
        program = _parse_program_file(args.program, app.sig)
        rows = encode_program(program, app.sig, nvar=args.nvar, nx=nx, ny=ny)
        if args.io:
            rows = io_matrix(rows)
    print(format_matrix(rows, nvar=args.nvar, star=args.star))
    return 0


def cmd_decompose(args) -> int:
    app, _ = _load_app(args)
    program = _parse_program_file(args.program, app.sig)
    nx, ny = app.sig.mlst.nx, app.sig.mlst.ny
    if args.shape:
        nx, ny = (int(v) for v in args.shape.split(","))
    dec = decompose_program(program, app.sig, nvar=args.nvar, nx=nx, ny=ny)
    labels = " ".join(app.sig.label_text(part.label) for part in dec.parts)
    print(f"labels [{labels}]")
    for k, part in enumerate(dec.parts, start=1):
        kind = "binding" if part.binding else "non-binding"
        print(f"# {k}: label {app.sig.label_text(part.label)} ({kind})")
        print(format_matrix(part.cells, nvar=args.nvar, star=args.star))
    return 0


def cmd_ioeq(args) -> int:
    app, _ = _load_app(args)
    q = _parse_program_file(args.first, app.sig)
    p = _parse_program_file(args.second, app.sig)
    res = ioeq_check(q, p, app.sig)
    if res.ok:
        pairs = ", ".join(
            f"{app.sig.label_text(k)}->{app.sig.label_text(v)}"
            for k, v in sorted(res.witness.items(), key=lambda kv: (kv[0].kind, kv[0].id))
        )
        print(f"ioeq: yes ({pairs})")
        return 0
    print(f"ioeq: no ({res.reason})")
    return 1


def _mapspec(args) -> Optional[dynsys.MapSpec]:
    if not getattr(args, "map", None):
        return None
    params = {}
    if args.N is not None:
        params["n"] = args.N
    if getattr(args, "c", None) is not None:
        params["c"] = args.c
    return dynsys.make_map(args.map, **params)


def cmd_run(args) -> int:
    app, _ = _load_app(args)
    program = _parse_program_file(args.program, app.sig)
    va = parse_va(Path(args.va).read_text(), app.sig) if args.va else {}
    spec = _mapspec(args)
    binding = dynsys.map_binding(spec) if spec else None
    outcome = execute_program(program, va, app.sig, budget=args.budget, mapspec=binding)
    print(f"status={outcome.status} steps={outcome.steps}")
    if outcome.computable:
        for label, value in outcome.outputs.items():
            print(f"{app.sig.label_text(label)} = {format_value(value)}")
        return 0
    print(f"item={outcome.failing_index} cause={outcome.cause}")
    return 1


def cmd_probe(args) -> int:
    app, store = _load_app(args)
    for path in args.lemma or []:
        if not _check_and_store(path, app, store, quiet=True):
            return 1
    if args.rule:
        theorem = store.get(args.rule)
    else:
        theorem = parse_thm(
            Path(args.thm).read_text(), app.sig, default_label=Path(args.thm).stem
        )
    stats = soundness_probe(
        theorem,
        app.sig,
        trials=args.trials,
        seed=args.seed,
        exhaustive_nat_max=args.exhaustive,
    )
    print(stats.report())
    return 0 if stats.violations == 0 else 1


def cmd_dyn(args) -> int:
    spec = _mapspec(args)
    if spec is None:
        raise PecrError("dyn requires --map")
    mnat = args.mnat
    if args.dyn_op == "iterate":
        u0 = dynsys.ArrV.scalar(args.u0)
        if args.snapshot_every:
            final, snaps = dynsys.iterate(
                spec, u0, args.n, mnat=mnat, snapshot_every=args.snapshot_every
            )
            for t, state in snaps:
                print(f"{t} " + " ".join(str(c) for c in state.cells))
        else:
            final = dynsys.iterate(spec, u0, args.n, mnat=mnat)
        print(f"{args.n} " + " ".join(str(c) for c in final.cells))
        return 0
    if args.dyn_op == "bound":
        q = dynsys.bound_range(spec, spec.domain)
        print(f"lo " + " ".join(str(c) for c in q.lo.cells))
        print(f"hi " + " ".join(str(c) for c in q.hi.cells))
        return 0
    if args.dyn_op == "certify":
        cert = dynsys.certify_axc(spec, spec.domain)
        states = dynsys.state_count(spec.domain)
        saturated = " (saturated)" if states > mnat else ""
        print(f"states={states}{saturated}")
        if cert.ok:
            print("certified: range bound contained in the domain box")
            return 0
        print(f"refused: {cert.reason}")
        print("bound lo " + " ".join(str(c) for c in cert.bound.lo.cells))
        print("bound hi " + " ".join(str(c) for c in cert.bound.hi.cells))
        return 1
    if args.dyn_op == "cycle":
        u0 = dynsys.ArrV.scalar(args.u0)
        limit = args.limit or dynsys.state_count(spec.domain) + 1
        report = dynsys.detect_cycle(spec, u0, limit, mnat=mnat)
        if report is None:
            print(f"no cycle within {limit} steps")
            return 3
        print(f"tcyc={report.tcyc} pcyc={report.pcyc}")
        return 0
    raise PecrError(f"unknown dyn operation {args.dyn_op!r}")


def _add_app_options(p) -> None:
    p.add_argument("app", help="application file, or builtin name (pecr, nat)")
    p.add_argument("--mach", help="msym,mstr,mnat overrides")
    p.add_argument("--mlst", help="nprem,npmax,nx,ny overrides")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pecr",
        description="Check and search proofs built from irreducible extended "
        "programs; encode programs as integer matrices; execute zero-order "
        "programs; certify fully discrete dynamical systems.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="check proof files in dependency order")
    _add_app_options(p)
    p.add_argument("proofs", nargs="+")
    p.add_argument("--quiet", action="store_true")
    p.set_defaults(fn=cmd_check)

    p = sub.add_parser("prove", help="search for a proof of a theorem")
    _add_app_options(p)
    p.add_argument("thm")
    p.add_argument("--lemma", action="append", help="checked proof stored first")
    p.add_argument("--depth", type=int, default=ProverConfig.max_rounds)
    p.add_argument("--facts", type=int, default=ProverConfig.max_facts)
    p.add_argument("--time", type=float, default=ProverConfig.time_budget)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--out")
    p.set_defaults(fn=cmd_prove)

    p = sub.add_parser("reduce", help="connection-list reduction trace")
    _add_app_options(p)
    p.add_argument("proof")
    p.set_defaults(fn=cmd_reduce)

    p = sub.add_parser("encode", help="integer-matrix encoding")
    _add_app_options(p)
    p.add_argument("program", nargs="?", help="program file (one statement per line)")
    p.add_argument("--proof", help="export a checked proof instead")
    p.add_argument("--rule-ids", help="rule-id fixture file, or builtin name (nat)")
    p.add_argument("--nvar", type=int, default=26)
    p.add_argument("--shape", help="nx,ny or nx,ny,nprem output geometry")
    p.add_argument("--io", action="store_true", help="drop the program-name column")
    p.add_argument("--star", action="store_true", help="render constants as m*")
    p.set_defaults(fn=cmd_encode)

    p = sub.add_parser("decompose", help="per-label I/O matrix decomposition")
    _add_app_options(p)
    p.add_argument("program")
    p.add_argument("--nvar", type=int, default=26)
    p.add_argument("--shape", help="nx,ny output geometry")
    p.add_argument("--star", action="store_true")
    p.set_defaults(fn=cmd_decompose)

    p = sub.add_parser("ioeq", help="I/O equivalence of two programs")
    _add_app_options(p)
    p.add_argument("first")
    p.add_argument("second")
    p.set_defaults(fn=cmd_ioeq)

    p = sub.add_parser("run", help="execute a zero-order program on values")
    _add_app_options(p)
    p.add_argument("program")
    p.add_argument("va", nargs="?", help="value-assignment file (label = value)")
    p.add_argument("--budget", type=int, default=10**6)
    p.add_argument("--map", help="bind a named map for f/itf/bndf statements")
    p.add_argument("--N", type=int, help="map size parameter")
    p.add_argument("--c", type=int, help="constant-map value")
    p.set_defaults(fn=cmd_run)

    p = sub.add_parser("probe", help="random soundness probe of a rule")
    _add_app_options(p)
    p.add_argument("--thm", help="theorem file to probe")
    p.add_argument("--rule", help="stored rule label to probe")
    p.add_argument("--lemma", action="append")
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--exhaustive", type=int, help="enumerate nat values up to this bound")
    p.set_defaults(fn=cmd_probe)

    p = sub.add_parser("dyn", help="dynamical-system operations")
    p.add_argument("dyn_op", choices=["iterate", "bound", "certify", "cycle"])
    p.add_argument("--map", required=True)
    p.add_argument("--N", type=int, help="map size parameter")
    p.add_argument("--c", type=int, help="constant-map value")
    p.add_argument("--u0", type=int, default=0)
    p.add_argument("-n", type=int, default=1)
    p.add_argument("--limit", type=int)
    p.add_argument("--snapshot-every", type=int)
    p.add_argument("--mnat", type=int, default=2**31 - 1)
    p.set_defaults(fn=cmd_dyn)

    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except PecrError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except FileNotFoundError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
