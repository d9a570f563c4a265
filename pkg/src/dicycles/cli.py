"""Command-line front end: ``dicycles {gen,pack,verify,export,selftest}``.

Every file is a JSON bundle tagged with ``kind``.  Exit status is 0 on
success, 1 when a verification fails and 2 on usage or input errors.
"""

from __future__ import annotations

import argparse
import hashlib
import sys
import time
from pathlib import Path

from . import acceptance
from .core import DefectError, DigraphError, PreconditionError, is_strongly_connected
from .dtd import DirectedTreeDecomposition, validate_dtd
from .flatwall import (DtdCertificate, FlatCertificate, FlatContext, MinorCertificate,
                       nonstrong_case_pack, strong_case_pack, theorem_dispatch, weak_flat_check)
from .gen import (CASES, ForwardArcTable, gen_complete, gen_D, gen_F, gen_flat_instance,
                  gen_layered, gen_nonstrong_instance)
from .io import digraph_from_json, digraph_to_json, dumps, read_json, to_dot, write_json
from .minors import MinorModel, expansion_model
from .oracle import (CycleLimitExceeded, CyclePacking, enum_cycles, no_equal_length_arcdisjoint,
                     verify_packing)
from .walls import (WallModel, equal_length_dag_check, gen_equal_length_wall, gen_grid, gen_wall,
                    validate_wall)


class UsageError(Exception):
    pass


# --- gen -------------------------------------------------------------------


def _wall_bundle(kind: str, W: WallModel, **extra) -> dict:
    return {"kind": kind, "digraph": digraph_to_json(W.host), "wall": W.to_json(), **extra}


def _gen(args) -> dict:
    fam = args.family
    if fam == "complete":
        return {"kind": "digraph", "digraph": digraph_to_json(gen_complete(args.t))}
    if fam == "grid":
        D, cycles, paths = gen_grid(args.k)
        return {"kind": "digraph", "digraph": digraph_to_json(D),
                "cycles": [list(c) for c in cycles], "paths": [list(p) for p in paths]}
    if fam == "wall":
        return _wall_bundle("wall", gen_wall(args.k))
    if fam == "eqwall":
        W, L = gen_equal_length_wall(args.k)
        return _wall_bundle("eqwall", W, L=L)
    if fam in ("fk", "layered"):
        D, dec = gen_F(args.k) if fam == "fk" else gen_layered(args.delta)
        return {"kind": "dtd", "digraph": digraph_to_json(D), "decomposition": dec.to_json()}
    if fam == "dk":
        D, table = gen_D(args.k, args.N)
        return {"kind": "dk", "digraph": digraph_to_json(D), "table": table.to_json()}
    if fam == "flat":
        inst = gen_flat_instance(args.k, args.case, args.seed)
        return _wall_bundle("flat", inst.W, X=[], k=args.k, case=inst.case, ws=list(inst.ws))
    if fam == "nonstrong":
        inst = gen_nonstrong_instance(args.case1, args.case2, args.seed)
        return _wall_bundle("flat", inst.W, X=[], k=3, case=inst.case, ws=list(inst.ws))
    if fam == "minor":
        M = expansion_model(args.t, args.seed, args.max_ops)
        return {"kind": "minor", "digraph": digraph_to_json(M.source), "model": M.to_json()}
    raise UsageError(f"unknown family {fam}")


# --- loading ---------------------------------------------------------------


def _load(path: str, *kinds: str) -> dict:
    try:
        data = read_json(path)
    except (OSError, ValueError) as exc:
        raise UsageError(f"cannot read {path}: {exc}") from None
    if kinds and data.get("kind") not in kinds:
        raise UsageError(f"{path}: expected kind {'/'.join(kinds)}, found {data.get('kind')!r}")
    return data


def _digraph(data: dict):
    D, _ = digraph_from_json(data["digraph"])
    return D


def _certificate(data: dict):
    D = _digraph(data)
    kind = data["kind"]
    if kind == "dtd":
        return D, DtdCertificate(DirectedTreeDecomposition.from_json(data["decomposition"]))
    if kind == "minor":
        return D, MinorCertificate(MinorModel.from_json(data["model"], D))
    if kind == "flat":
        return D, FlatCertificate(frozenset(data.get("X", [])), WallModel.from_json(data["wall"], D))
    raise UsageError(f"no certificate in a {kind!r} bundle")


# --- pack ------------------------------------------------------------------


def _pack(args) -> tuple[dict, bool]:
    data = _load(args.cert, "dtd", "minor", "flat")
    D, cert = _certificate(data)
    if args.mode in ("strong", "nonstrong"):
        if not isinstance(cert, FlatCertificate):
            raise UsageError(f"--mode {args.mode} needs a flat certificate")
        ctx = FlatContext(D, cert.wall)
        if args.mode == "strong":
            if args.k is None:
                raise UsageError("--mode strong needs --k")
            cycles = strong_case_pack(ctx, args.k).cycles
        else:
            cycles = nonstrong_case_pack(ctx).cycles
    else:
        mode = args.theorem
        k = args.k if args.k is not None else 3
        cycles = theorem_dispatch(D, cert, mode, k)
    packing = CyclePacking(tuple(cycles))
    verdict = verify_packing(D, packing)
    out = {"kind": "packing", "digraph": digraph_to_json(D), "packing": packing.to_json(),
           "lengths": [len(c) for c in cycles], "verdict": _verdict(verdict)}
    return out, bool(verdict)


def _verdict(chk) -> dict:
    return {"ok": bool(chk), "reason": chk.reason}


# --- verify ----------------------------------------------------------------


def _verify_one(what: str, path: str, budget: int) -> dict:
    if what == "packing":
        data = _load(path, "packing")
        D = _digraph(data)
        return _verdict(verify_packing(D, CyclePacking.from_json(data["packing"])))
    if what == "dtd":
        data = _load(path, "dtd")
        D = _digraph(data)
        chk = validate_dtd(D, DirectedTreeDecomposition.from_json(data["decomposition"]))
        return {**_verdict(chk), "width": chk.width}
    if what == "flat":
        data = _load(path, "flat")
        D = _digraph(data)
        W = WallModel.from_json(data["wall"], D)
        chk = validate_wall(W)
        if not chk:
            return _verdict(chk)
        return _verdict(weak_flat_check(FlatContext(D, W)))
    if what == "eqwall":
        data = _load(path, "eqwall", "wall")
        D = _digraph(data)
        W = WallModel.from_json(data["wall"], D)
        L = int(data.get("L", 0))
        chk = validate_wall(W)
        if chk:
            chk = equal_length_dag_check(W, L)
        out = {**_verdict(chk), "L": L}
        try:
            cycles = enum_cycles(D, budget)
        except CycleLimitExceeded:
            out["enumeration"] = "inconclusive"
        else:
            lengths = sorted({len(c) for c in cycles})
            out["enumeration"] = {"cycles": len(cycles), "lengths": lengths}
            if lengths != [L]:
                out["ok"] = False
                out["reason"] = f"cycle lengths {lengths}"
        return out
    if what == "dk":
        data = _load(path, "dk")
        D = _digraph(data)
        table = ForwardArcTable.from_json(data["table"])
        rep = no_equal_length_arcdisjoint(D, budget, table)
        out = rep.to_json()
        out["strongly_connected"] = is_strongly_connected(D)
        out["ok"] = rep.status == "verified" and out["strongly_connected"]
        return out
    raise UsageError(f"unknown verify target {what}")


def _verify(args) -> tuple[dict, bool]:
    results = {p: _verify_one(args.what, p, args.budget) for p in args.inputs}
    ok = all(r["ok"] for r in results.values())
    return {"kind": "verdict", "target": args.what, "ok": ok, "results": results}, ok


# --- export ----------------------------------------------------------------


def _export(args) -> str:
    data = _load(args.input)
    D = _digraph(data)
    highlight = data.get("packing", {}).get("cycles")
    return to_dot(D, [tuple(c) for c in highlight] if highlight else None)


# --- selftest --------------------------------------------------------------


def _selftest(args) -> tuple[dict, bool]:
    results = acceptance.run_all(set(args.only) if args.only else None)
    for r in results:
        print(r.line(), file=sys.stderr if args.json else sys.stdout)
    ok = all(r.ok for r in results)
    return {"kind": "selftest", "ok": ok, "results": [r.to_json() for r in results]}, ok


# --- plumbing --------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="dicycles", description="Disjoint cycles of distinct lengths.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--manifest", help="write a run manifest (JSON) to this path")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate a digraph family with its certificate")
    fams = g.add_subparsers(dest="family", required=True)

    def fam(name, help_, **flags):
        f = fams.add_parser(name, help=help_, parents=[common])
        for flag, kw in flags.items():
            f.add_argument(f"--{flag.replace('_', '-')}", **kw)
        f.add_argument("--out", help="output file (default stdout)")
        return f

    fam("complete", "complete digraph", t=dict(type=int, required=True))
    fam("grid", "cylindrical grid", k=dict(type=int, required=True))
    fam("wall", "elementary cylindrical wall", k=dict(type=int, required=True))
    fam("eqwall", "wall whose cycles all have equal length", k=dict(type=int, required=True))
    fam("fk", "tree with leaf back-arcs and its width-1 decomposition", k=dict(type=int, required=True))
    fam("layered", "width-1 digraph of uniform out-degree", delta=dict(type=int, required=True))
    fam("dk", "layered digraph without equal-length arc-disjoint cycles",
        k=dict(type=int, required=True), N=dict(type=int, default=None))
    fam("flat", "flat-wall fixture", k=dict(type=int, required=True),
        case=dict(choices=CASES, default="1"), seed=dict(type=int, default=0))
    fam("nonstrong", "order-8 fixture with a forward and a reverse gadget",
        case1=dict(choices=CASES, default="1"), case2=dict(choices=CASES, default="1"),
        seed=dict(type=int, default=0))
    fam("minor", "random expansion of a complete digraph", t=dict(type=int, required=True),
        seed=dict(type=int, default=0), max_ops=dict(type=int, default=30))

    pk = sub.add_parser("pack", help="pack disjoint cycles of distinct lengths from a certificate", parents=[common])
    pk.add_argument("--mode", choices=("strong", "nonstrong", "dispatch"), required=True)
    pk.add_argument("--cert", required=True)
    pk.add_argument("--k", type=int)
    pk.add_argument("--theorem", choices=("mainconn", "mainsem"), default="mainconn")
    pk.add_argument("--out")

    v = sub.add_parser("verify", help="check a file against its claim", parents=[common])
    v.add_argument("what", choices=("packing", "flat", "dtd", "dk", "eqwall"))
    v.add_argument("--in", dest="inputs", nargs="+", required=True)
    v.add_argument("--budget", type=int, default=10**5, help="cycle enumeration cap")
    v.add_argument("--out")

    e = sub.add_parser("export", help="Graphviz DOT of a bundle (packings drawn bold)", parents=[common])
    e.add_argument("--in", dest="input", required=True)
    e.add_argument("--out")

    s = sub.add_parser("selftest", help="run the acceptance checks", parents=[common])
    s.add_argument("--only", type=int, nargs="+", choices=range(1, 11), metavar="N")
    s.add_argument("--json", action="store_true", help="emit the results as JSON on stdout")
    s.add_argument("--out")
    return p


def _emit(text: str, out: str | None):
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _digest(path: str) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    start = time.perf_counter()
    ok = True
    verdicts = None
    try:
        if args.command == "gen":
            payload = _gen(args)
        elif args.command == "pack":
            payload, ok = _pack(args)
            verdicts = payload["verdict"]
        elif args.command == "verify":
            payload, ok = _verify(args)
            verdicts = {p: r["ok"] for p, r in payload["results"].items()}
        elif args.command == "export":
            payload = None
            _emit(_export(args), args.out)
        else:
            payload, ok = _selftest(args)
            verdicts = {r["criterion"]: r["ok"] for r in payload["results"]}
            if not args.json and not args.out:
                payload = None
        if payload is not None:
            _emit(dumps(payload), args.out)
    except (UsageError, PreconditionError, DigraphError, KeyError) as exc:
        print(f"dicycles: error: {exc}", file=sys.stderr)
        return 2
    except DefectError as exc:
        print(f"dicycles: verification failed: {exc}", file=sys.stderr)
        return 1
    if args.manifest:
        inputs = [p for p in (getattr(args, "cert", None), getattr(args, "input", None),
                              *(getattr(args, "inputs", None) or [])) if p]
        params = {k: v for k, v in sorted(vars(args).items())
                  if k not in ("manifest", "out", "cert", "input", "inputs")}
        write_json(args.manifest, {
            "command": args.command,
            "parameters": params,
            "inputs": {p: _digest(p) for p in inputs},
            "outputs": {args.out: _digest(args.out)} if getattr(args, "out", None) else {},
            "verdicts": verdicts,
            "ok": ok,
            "seconds": round(time.perf_counter() - start, 3),
        })
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
