"""JSON bundles for semilattices, algebras, posets, pregamps, gamps, and
diagrams, plus the DOT exports. Round trips are identity modulo key order."""

import json

from .errors import SchemaError
from .palg import PartialAlgebra, SimilarityType
from .poset import FinitePoset
from .pregamp import Pregamp
from .semilattice import JoinSemilattice
from .util import sort_key

SCHEMA = "gampkit/1"


def _check_schema(data, where):
    tag = data.get("schema", SCHEMA)
    major = tag.split("/")[0]
    if major != "gampkit":
        raise SchemaError(f"{where}: unknown schema {tag!r}")
    if tag.split("/")[1] != "1":
        raise SchemaError(f"{where}: unsupported schema major {tag!r}")


def encode_el(x):
    if isinstance(x, tuple):
        return {"tuple": [encode_el(a) for a in x]}
    if isinstance(x, frozenset):
        return {"set": [encode_el(a) for a in sorted(x, key=sort_key)]}
    if isinstance(x, (str, int, bool)) or x is None:
        return x
    from .congruence import Congruence

    if isinstance(x, Congruence):
        blocks = sorted(
            (sorted(b, key=sort_key) for b in x.blocks), key=lambda b: sort_key(tuple(b))
        )
        return {"congruence": [[encode_el(e) for e in b] for b in blocks]}
    raise SchemaError(f"cannot encode element {x!r}")


def decode_el(x):
    if isinstance(x, dict):
        if "tuple" in x:
            return tuple(decode_el(a) for a in x["tuple"])
        if "set" in x:
            return frozenset(decode_el(a) for a in x["set"])
        if "congruence" in x:
            from .congruence import Congruence

            return Congruence([{decode_el(e) for e in b} for b in x["congruence"]])
        raise SchemaError(f"cannot decode element {x!r}")
    return x


def semilattice_to_json(sem):
    els = list(sem.elements)
    return {
        "schema": SCHEMA,
        "elements": [encode_el(x) for x in els],
        "zero": encode_el(sem.zero),
        "join": [[encode_el(sem.join(a, b)) for b in els] for a in els],
    }


def semilattice_from_json(data):
    _check_schema(data, "semilattice")
    try:
        els = [decode_el(x) for x in data["elements"]]
        zero = decode_el(data["zero"])
        table = {}
        for i, a in enumerate(els):
            for j, b in enumerate(els):
                table[(a, b)] = decode_el(data["join"][i][j])
    except (KeyError, IndexError, TypeError) as e:
        raise SchemaError(f"semilattice: {e}")
    return JoinSemilattice(els, zero, table)


def algebra_to_json(alg):
    ops = {}
    for name, _ in alg.stype.symbols:
        table = alg.ops[name]
        defined = sorted(table.keys(), key=lambda t: sort_key(tuple(t)))
        ops[name] = {
            "defined": [[encode_el(a) for a in args] for args in defined],
            "table": [encode_el(table[args]) for args in defined],
        }
    return {
        "schema": SCHEMA,
        "type": [[n, a] for n, a in alg.stype.symbols],
        "universe": [encode_el(x) for x in alg.universe],
        "ops": ops,
    }


def algebra_from_json(data):
    from .constructions import build_named

    if isinstance(data, str):
        return build_named(data).algebra
    if "named" in data:
        return build_named(data["named"]).algebra
    _check_schema(data, "algebra")
    try:
        stype = SimilarityType(tuple((n, a) for n, a in data["type"]))
        universe = [decode_el(x) for x in data["universe"]]
        ops = {}
        for name, spec in data["ops"].items():
            table = {}
            for args, val in zip(spec["defined"], spec["table"]):
                table[tuple(decode_el(a) for a in args)] = decode_el(val)
            ops[name] = table
    except (KeyError, TypeError) as e:
        raise SchemaError(f"algebra: {e}")
    return PartialAlgebra(stype, universe, ops)


def poset_to_json(poset):
    pairs = sorted(
        ((a, b) for a in poset.elements for b in poset.elements if poset.leq(a, b)),
        key=lambda p: (sort_key(p[0]), sort_key(p[1])),
    )
    return {
        "schema": SCHEMA,
        "elements": [encode_el(x) for x in poset.elements],
        "leq": [[encode_el(a), encode_el(b)] for a, b in pairs],
    }


def poset_from_json(data):
    _check_schema(data, "poset")
    try:
        els = [decode_el(x) for x in data["elements"]]
        leq = [(decode_el(a), decode_el(b)) for a, b in data["leq"]]
    except (KeyError, TypeError) as e:
        raise SchemaError(f"poset: {e}")
    return FinitePoset(els, leq)


def pregamp_to_json(pg):
    dist = []
    for x in pg.carrier.universe:
        for y in pg.carrier.universe:
            dist.append([encode_el(x), encode_el(y), encode_el(pg.delta(x, y))])
    return {
        "schema": SCHEMA,
        "algebra": algebra_to_json(pg.carrier),
        "semilattice": semilattice_to_json(pg.sem),
        "dist": dist,
    }


def pregamp_from_json(data):
    _check_schema(data, "pregamp")
    try:
        alg = algebra_from_json(data["algebra"])
        sem = semilattice_from_json(data["semilattice"])
        dist = {
            (decode_el(x), decode_el(y)): decode_el(d) for x, y, d in data["dist"]
        }
    except (KeyError, TypeError, ValueError) as e:
        raise SchemaError(f"pregamp: {e}")
    for (x, y), d in dist.items():
        if d not in sem:
            raise SchemaError(f"pregamp: distance {d!r} at {(x, y)} not in semilattice")
    return Pregamp(alg, dist, sem)


def gamp_to_json(g):
    return {
        "schema": SCHEMA,
        "inner": algebra_to_json(g.inner),
        "outer": pregamp_to_json(g.pregamp),
    }


def gamp_from_json(data):
    from .gamp import Gamp

    _check_schema(data, "gamp")
    try:
        inner = algebra_from_json(data["inner"])
        pg = pregamp_from_json(data["outer"])
    except KeyError as e:
        raise SchemaError(f"gamp: missing {e}")
    if not inner.is_partial_sub_of(pg.carrier):
        raise SchemaError("gamp: inner part is not a partial subalgebra of the outer")
    return Gamp(inner, pg)


def diagram_to_json(diagram, kind="gamp"):
    nodes = {}
    for p in diagram.poset.elements:
        obj = diagram.objects[p]
        if kind == "gamp":
            nodes[str(p)] = gamp_to_json(obj)
        elif kind == "algebra":
            nodes[str(p)] = algebra_to_json(obj)
        else:
            raise SchemaError(f"diagram: unsupported kind {kind!r}")
    arrows = {}
    for (p, q), arrow in diagram.arrows.items():
        if p == q:
            continue
        f = arrow.f if kind == "gamp" else arrow
        entry = {
            "map": [[encode_el(x), encode_el(f(x))] for x in f.source.universe],
        }
        if kind == "gamp":
            entry["sem_map"] = [
                [encode_el(a), encode_el(arrow.fsem(a))]
                for a in arrow.fsem.source.elements
            ]
        arrows[f"{p}->{q}"] = entry
    return {
        "schema": SCHEMA,
        "kind": kind,
        "poset": poset_to_json(diagram.poset),
        "nodes": nodes,
        "arrows": arrows,
    }


def diagram_from_json(data):
    from .diagram import Diagram
    from .gamp import GampMorphism
    from .palg import PalgMorphism
    from .semilattice import SemMorphism

    _check_schema(data, "diagram")
    kind = data.get("kind", "gamp")
    poset = poset_from_json(data["poset"])
    nodes = {}
    for p in poset.elements:
        raw = data["nodes"].get(str(p))
        if raw is None:
            raise SchemaError(f"diagram: missing node {p!r}")
        nodes[p] = gamp_from_json(raw) if kind == "gamp" else algebra_from_json(raw)
    arrows = {}
    for key, entry in data["arrows"].items():
        ps, qs = key.split("->")
        p = next(x for x in poset.elements if str(x) == ps)
        q = next(x for x in poset.elements if str(x) == qs)
        fmap = {decode_el(a): decode_el(b) for a, b in entry["map"]}
        if kind == "gamp":
            smap = {decode_el(a): decode_el(b) for a, b in entry["sem_map"]}
            arrows[(p, q)] = GampMorphism(
                nodes[p], nodes[q],
                PalgMorphism(nodes[p].outer, nodes[q].outer, fmap),
                SemMorphism(nodes[p].sem, nodes[q].sem, smap),
            )
        else:
            arrows[(p, q)] = PalgMorphism(nodes[p], nodes[q], fmap)
    return Diagram.from_generators(poset, nodes, arrows)


# ---------------------------------------------------------------------------
# DOT


def _dot_name(x):
    return json.dumps(str(x))


def _hasse_dot(elements, leq, title):
    order = sorted(elements, key=sort_key)
    lt = {(a, b) for a in order for b in order if a != b and leq(a, b)}
    covers = [
        (a, b)
        for (a, b) in sorted(lt, key=lambda p: (sort_key(p[0]), sort_key(p[1])))
        if not any((a, w) in lt and (w, b) in lt for w in order)
    ]
    lines = [f"digraph {json.dumps(title)} {{", "  rankdir=BT;"]
    for x in order:
        lines.append(f"  {_dot_name(x)};")
    for a, b in covers:
        lines.append(f"  {_dot_name(a)} -> {_dot_name(b)};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def export_dot(obj, title="gampkit"):
    """Deterministic Hasse-diagram DOT for posets, semilattices, lattice
    algebras, and the shape of a diagram."""
    from .diagram import Diagram

    if isinstance(obj, FinitePoset):
        return _hasse_dot(obj.elements, obj.leq, title)
    if isinstance(obj, JoinSemilattice):
        return _hasse_dot(obj.elements, obj.leq, title)
    if isinstance(obj, PartialAlgebra):
        if set(obj.stype.names) != {"meet", "join"} or not obj.is_total():
            raise SchemaError("DOT export needs a total lattice algebra")
        meet = obj.ops["meet"]
        return _hasse_dot(obj.universe, lambda a, b: meet[(a, b)] == a, title)
    if isinstance(obj, Diagram):
        lines = [f"digraph {json.dumps(title)} {{", "  rankdir=BT;"]
        for p in sorted(obj.poset.elements, key=sort_key):
            lines.append(f"  {_dot_name(p)};")
        for (p, q) in sorted(obj.poset.covers(), key=lambda c: sort_key(tuple(c))):
            lines.append(f"  {_dot_name(p)} -> {_dot_name(q)};")
        lines.append("}")
        return "\n".join(lines) + "\n"
    raise SchemaError(f"no DOT export for {type(obj).__name__}")


def dump(data):
    return json.dumps(data, indent=2, sort_keys=True) + "\n"


def load_path(path):
    with open(path) as fh:
        return json.load(fh)
