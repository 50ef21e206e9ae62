"""Command-line front door.

Exit codes: 0 verified/true, 1 refuted/false, 2 unknown at the stated
bounds, 3 input error. Reports are deterministic for fixed inputs and
bounds.
"""

import argparse
import json
import sys
import time

from . import congruence as _cong
from . import serialize as ser
from .errors import GampkitError, PreconditionFailed, SchemaError, StepFailed
from .gamp import buttress, check_property
from .poset import bm_le2, kposet, kposet_cover_check, KPosetSpec
from .semilattice import SemIdeal, SemMorphism, quotient
from .util import sort_key


def _emit(args, payload, text=None):
    if getattr(args, "format", "json") == "text" and text is not None:
        out = text if text.endswith("\n") else text + "\n"
    elif getattr(args, "format", "json") == "dot":
        out = payload if isinstance(payload, str) else ser.dump(payload)
    else:
        out = ser.dump(payload)
    if getattr(args, "out", None):
        with open(args.out, "w") as fh:
            fh.write(out)
    else:
        sys.stdout.write(out)


def _load_json(path):
    try:
        return ser.load_path(path)
    except (OSError, json.JSONDecodeError) as e:
        raise SchemaError(f"{path}: {e}")


def _relabel_sem(sem):
    labels = {x: f"c{i}" for i, x in enumerate(sem.elements)}
    data = {
        "schema": ser.SCHEMA,
        "elements": [labels[x] for x in sem.elements],
        "zero": labels[sem.zero],
        "join": [[labels[sem.join(a, b)] for b in sem.elements] for a in sem.elements],
    }
    blocks = {}
    for x in sem.elements:
        enc = ser.encode_el(x)
        blocks[labels[x]] = enc
    data["labels"] = blocks
    return data


def cmd_conc(args):
    alg = ser.algebra_from_json(_load_json(args.algebra))
    cs = _cong.conc(alg, bound=args.bound)
    if args.format == "dot":
        _emit(args, ser.export_dot(cs, "conc"))
    else:
        _emit(args, _relabel_sem(cs), text=f"conc has {len(cs)} elements")
    return 0


def cmd_permutable(args):
    alg = ser.algebra_from_json(_load_json(args.algebra))
    if args.witness:
        return _malcev_mode(args, alg)
    ok, witness = _cong.is_n_permutable(alg, args.n)
    payload = {"n": args.n, "permutable": ok}
    if witness is not None:
        payload["witness"] = repr(witness)
    _emit(args, payload, text=f"congruence {args.n}-permutable: {ok}")
    return 0 if ok else 1


def _malcev_mode(args, alg):
    """Witness search for one principal-congruence containment instance."""
    from .congruence import MalcevWitness, NoContainment, UnknownAtBound

    x, y = (_parse_el(t, alg) for t in args.witness.split("/"))
    xs, ys = [], []
    for token in (args.pairs or "").split(","):
        if not token:
            continue
        a, b = (_parse_el(t, alg) for t in token.split("/"))
        xs.append(a)
        ys.append(b)
    res = _cong.malcev_witness(
        alg, x, y, tuple(xs), tuple(ys),
        depth_bound=args.depth_bound, param_bound=args.param_bound,
    )
    if isinstance(res, MalcevWitness):
        payload = {
            "found": True,
            "steps": res.n,
            "params": [ser.encode_el(p) for p in res.params],
            "terms": [repr(t) for t in res.terms],
        }
        _emit(args, payload, text=f"witness chain of length {res.n}")
        return 0
    if isinstance(res, NoContainment):
        _emit(args, {"found": False, "reason": "no containment"}, text="no containment")
        return 1
    assert isinstance(res, UnknownAtBound)
    _emit(
        args, {"found": False, "reason": "unknown at bound", "bounds": res.bounds},
        text="unknown at bound",
    )
    return 2


def _ideal_generators(sem, raw):
    """Parse --ideal tokens: #k picks the k-th semilattice element, which is
    how congruence-valued elements are addressed; otherwise a literal id."""
    gens = set()
    for token in raw.split(","):
        if token.startswith("#"):
            gens.add(sem.elements[int(token[1:])])
        elif token.lstrip("-").isdigit() and int(token) in sem._index:
            gens.add(int(token))
        elif token in sem._index:
            gens.add(token)
        else:
            raise SchemaError(f"--ideal token {token!r} names no element")
    return gens


def cmd_quotient(args):
    data = _load_json(args.input)
    if "join" in data:
        sem = ser.semilattice_from_json(data)
        ideal = SemIdeal.generated(sem, _ideal_generators(sem, args.ideal))
        q, _ = quotient(sem, ideal)
        _emit(args, ser.semilattice_to_json(q))
        return 0
    if "dist" in data and "inner" not in data:
        from .pregamp import quotient_pregamp

        pg = ser.pregamp_from_json(data)
        ideal = SemIdeal.generated(pg.sem, _ideal_generators(pg.sem, args.ideal))
        q, _ = quotient_pregamp(pg, ideal)
        _emit(args, ser.pregamp_to_json(q))
        return 0
    if "inner" in data:
        from .gamp import quotient_gamp

        g = ser.gamp_from_json(data)
        ideal = SemIdeal.generated(g.sem, _ideal_generators(g.sem, args.ideal))
        q, _ = quotient_gamp(g, ideal)
        _emit(args, ser.gamp_to_json(q))
        return 0
    raise SchemaError("input is not a semilattice, pregamp, or gamp bundle")


def cmd_gamp_check(args):
    g = ser.gamp_from_json(_load_json(args.bundle))
    morphism_props = {"operational", "cuttable", "cuttable_chains", "strong_morphism"}
    if args.property in morphism_props:
        raise SchemaError("morphism properties need a diagram bundle; see diagram-verify")
    v = check_property(g, args.property, n=args.n, m_cap=args.m_cap)
    payload = {
        "property": args.property,
        "status": v.status,
        "bounds": v.bounds,
        "witness": repr(v.witness) if v.witness is not None else None,
    }
    _emit(args, payload, text=f"{args.property}: {v.status}")
    return v.exit_code


def cmd_diagram_verify(args):
    from .diagram import is_operational_diagram, is_partial_lifting
    from .gamp import Realization

    data = _load_json(args.diagram)
    diagram = ser.diagram_from_json(data)
    if args.kind == "operational":
        ok, witness = is_operational_diagram(diagram)
        payload = {"kind": "operational", "ok": ok, "witness": repr(witness)}
        _emit(args, payload, text=f"operational: {ok}")
        return 0 if ok else 1
    if args.kind == "partial-lifting":
        raw = data.get("realizations")
        if raw is None:
            raise SchemaError("partial-lifting verification needs realizations in the bundle")
        realizations = {}
        for p in diagram.poset.elements:
            entry = raw.get(str(p))
            if entry is None:
                raise SchemaError(f"missing realization for node {p!r}")
            ambient = ser.algebra_from_json(entry["ambient"])
            cs = _cong.conc(ambient)
            chi = SemMorphism(
                diagram.objects[p].sem,
                cs,
                {
                    ser.decode_el(a): ser.decode_el(b)
                    for a, b in entry["chi"]
                },
            )
            realizations[p] = Realization(ambient, chi)
        verdict, detail = is_partial_lifting(
            diagram, realizations, m_cap=args.m_cap, x_cap=args.x_cap,
            lattice=args.lattice, n_permutable=args.n,
        )
        payload = {
            "kind": "partial-lifting",
            "status": verdict.status,
            "detail": {f"{k}": v.status for k, v in detail.items()},
        }
        _emit(args, payload, text=f"partial-lifting: {verdict.status}")
        return verdict.exit_code
    raise SchemaError(f"unknown kind {args.kind!r}")


def cmd_poset(args):
    if args.bm is not None:
        poset = bm_le2(args.bm)
        if args.format == "dot":
            _emit(args, ser.export_dot(poset, f"bm{args.bm}"))
        else:
            _emit(args, ser.poset_to_json(poset))
        return 0
    if args.kposet is not None:
        data = _load_json(args.kposet)
        base = ser.poset_from_json(data["base"])
        spec = KPosetSpec(
            base,
            tuple(ser.decode_el(x) for x in data["marks"]),
            tuple(
                (ser.decode_el(m), tuple(rs)) for m, rs in data["branch"]
            ),
            data["depth"],
        )
        poset, tree = kposet(spec)
        if args.check_covers:
            ok, _, _ = kposet_cover_check(spec)
            _emit(args, {"elements": len(poset.elements), "tree": len(tree), "covers_match": ok})
            return 0 if ok else 1
        _emit(args, ser.poset_to_json(poset))
        return 0
    if args.input is None:
        raise SchemaError("poset command needs an input, --bm, or --kposet")
    poset = ser.poset_from_json(_load_json(args.input))
    if args.format == "dot":
        _emit(args, ser.export_dot(poset, "poset"))
    else:
        payload = {
            "elements": len(poset.elements),
            "covers": [[ser.encode_el(a), ser.encode_el(b)] for a, b in poset.covers()],
        }
        _emit(args, payload)
    return 0


def cmd_buttress(args):
    alg = ser.algebra_from_json(_load_json(args.algebra))
    poset = ser.poset_from_json(_load_json(args.poset))
    cs = _cong.conc(alg)
    phis = {}
    specs = dict(kv.split("=", 1) for kv in args.ideal)
    from .semilattice import quotient as sem_quotient

    for p in poset.elements:
        raw = specs.get(str(p), "")
        if raw:
            gens = set()
            for token in raw.split(","):
                pair = token.split("/")
                gens.add(
                    cs.principal(_parse_el(pair[0], alg), _parse_el(pair[1], alg))
                )
            ideal = SemIdeal.generated(cs, gens)
        else:
            ideal = SemIdeal.zero(cs)
        _, proj = sem_quotient(cs, ideal)
        phis[p] = proj
    diagram = buttress(
        alg, poset, phis, with_chains=args.chains,
        n_permutable=args.n, m_cap=args.m_cap,
    )
    payload = {
        "nodes": {
            str(p): {
                "inner": len(diagram.objects[p].inner),
                "outer": len(diagram.objects[p].outer),
                "sem": len(diagram.objects[p].sem),
            }
            for p in poset.elements
        },
        "ok": True,
    }
    _emit(args, payload, text="buttress verified")
    return 0


def _parse_el(token, algebra=None):
    if algebra is not None and token in algebra:
        return token
    return int(token) if token.lstrip("-").isdigit() else token


def cmd_repro(args):
    from .constructions import (
        build_square,
        enumerate_candidates,
        refute_candidate,
        verify_square_facts,
    )
    if args.what != "unliftable":
        raise SchemaError(f"unknown reproduction target {args.what!r}")
    t0 = time.time()
    square = build_square(args.K, args.n)
    if args.format == "dot":
        dot = ser.export_dot(square.x_square, "wings") + ser.export_dot(
            square.a_square, "powers"
        )
        _emit(args, dot)
        return 0
    report = {"K": args.K, "n": args.n, "facts": verify_square_facts(square)}
    if args.exhaustive_bound is not None:
        stats = {"candidates": 0, "rejected": {}, "pruned": {}, "certificates": 0, "step_failures": 0}
        for outcome in enumerate_candidates(square, args.n, args.exhaustive_bound):
            if outcome.status == "candidate":
                cand = outcome.candidate
                stats["candidates"] += 1
                try:
                    cert = refute_candidate(square, cand, args.n)
                except PreconditionFailed as e:
                    stats["rejected"][e.reason] = stats["rejected"].get(e.reason, 0) + 1
                except StepFailed as e:
                    stats["step_failures"] += 1
                else:
                    stats["certificates"] += 1
            else:
                stats["pruned"][outcome.reason] = stats["pruned"].get(outcome.reason, 0) + 1
        report["exhaustive"] = {
            "bound": args.exhaustive_bound,
            **stats,
            "note": "pruned branches are rejected candidate classes; "
            "no candidate at this bound survives its preconditions",
        }
    report["seconds"] = round(time.time() - t0, 3)
    _emit(args, report, text=json.dumps(report["facts"]["facts"], sort_keys=True))
    ok = report["facts"]["ok"]
    if args.exhaustive_bound is not None:
        ok = ok and report["exhaustive"]["step_failures"] == 0 and report["exhaustive"]["certificates"] == 0
    return 0 if ok else 1


def build_parser():
    parser = argparse.ArgumentParser(prog="gampkit")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--format", choices=["json", "dot", "text"], default="json")
        p.add_argument("--out")

    p = sub.add_parser("conc", help="compact congruence semilattice of an algebra")
    p.add_argument("algebra")
    p.add_argument("--bound", type=int, default=160)
    common(p)
    p.set_defaults(fn=cmd_conc)

    p = sub.add_parser("permutable", help="congruence n-permutability test")
    p.add_argument("algebra")
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--witness", help="x/y: search a witness chain instead")
    p.add_argument("--pairs", help="a/b,c/d generator pairs for the witness search")
    p.add_argument("--depth-bound", type=int, default=3)
    p.add_argument("--param-bound", type=int, default=16)
    common(p)
    p.set_defaults(fn=cmd_permutable)

    p = sub.add_parser("quotient", help="quotient by an ideal")
    p.add_argument("input")
    p.add_argument("--ideal", required=True, help="comma-separated generators")
    common(p)
    p.set_defaults(fn=cmd_quotient)

    p = sub.add_parser("gamp-check", help="check a gamp property")
    p.add_argument("bundle")
    p.add_argument("--property", required=True)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--m-cap", type=int, default=2)
    common(p)
    p.set_defaults(fn=cmd_gamp_check)

    p = sub.add_parser("diagram-verify", help="verify a diagram property")
    p.add_argument("diagram")
    p.add_argument("--kind", required=True, choices=["operational", "partial-lifting"])
    p.add_argument("--lattice", action="store_true")
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--m-cap", type=int, default=2)
    p.add_argument("--x-cap", type=int, default=3)
    common(p)
    p.set_defaults(fn=cmd_diagram_verify)

    p = sub.add_parser("poset", help="poset utilities")
    p.add_argument("input", nargs="?")
    p.add_argument("--bm", type=int, default=None)
    p.add_argument("--kposet", default=None)
    p.add_argument("--check-covers", action="store_true")
    common(p)
    p.set_defaults(fn=cmd_poset)

    p = sub.add_parser("buttress", help="build and verify a buttress diagram")
    p.add_argument("--algebra", required=True)
    p.add_argument("--poset", required=True)
    p.add_argument(
        "--ideal", action="append", default=[],
        help="NODE=x/y,u/v pairs generating the node's kernel ideal",
    )
    p.add_argument("--chains", action="store_true")
    p.add_argument("--n", type=int, default=None, dest="n")
    p.add_argument("--m-cap", type=int, default=2)
    common(p)
    p.set_defaults(fn=cmd_buttress)

    p = sub.add_parser("repro", help="reproduction suites")
    p.add_argument("what")
    p.add_argument("--K", default="M3")
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--exhaustive-bound", type=int, default=None)
    p.add_argument("--depth-bound", type=int, default=3)
    p.add_argument("--param-bound", type=int, default=16)
    common(p)
    p.set_defaults(fn=cmd_repro)

    return parser


def run(argv):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 3 if e.code not in (0, None) else 0
    try:
        return args.fn(args)
    except (SchemaError, GampkitError, OSError, ValueError) as e:
        sys.stderr.write(f"error: {e}\n")
        return 3


def main():
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
