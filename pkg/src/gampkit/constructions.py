"""Concrete small lattices, the two commuting squares built from a base
lattice and a chain, verification of their stated facts, and a refutation
engine that executes the no-permutable-extension proof as a checked program."""

from dataclasses import dataclass, field
from itertools import product

from .errors import (
    BudgetExceeded,
    HypothesisFailed,
    PreconditionFailed,
    StepFailed,
    UnknownName,
)
from .palg import (
    LATTICE_IDENTITIES,
    LATTICE_TYPE,
    PalgMorphism,
    PartialAlgebra,
    UNDEFINED,
    is_lattice_algebra,
)
from .poset import FinitePoset
from .semilattice import SemMorphism, ker0
from .pregamp import Pregamp, check_axioms, is_pregamp_of
from .gamp import (
    Gamp,
    GampMorphism,
    check_morphism_property,
    check_property,
    ga,
    ga_mor,
    pggl,
    pggl_mor,
)
from .diagram import Diagram, DiagramIdeal, NaturalTransformation, quotient_diagram
from .util import sort_key
from . import congruence as _cong


# ---------------------------------------------------------------------------
# named lattices


@dataclass
class NamedLattice:
    name: str
    algebra: PartialAlgebra
    special: dict = field(default_factory=dict)


def lattice_from_covers(elements, covers):
    """Total lattice algebra from a Hasse diagram; meets and joins must exist."""
    poset = FinitePoset.from_covers(elements, covers)

    def meet_fn(a, b):
        lower = [c for c in elements if poset.leq(c, a) and poset.leq(c, b)]
        tops = [c for c in lower if all(poset.leq(d, c) for d in lower)]
        if len(tops) != 1:
            raise ValueError(f"no meet for {(a, b)}")
        return tops[0]

    def join_fn(a, b):
        upper = [c for c in elements if poset.leq(a, c) and poset.leq(b, c)]
        bots = [c for c in upper if all(poset.leq(c, d) for d in upper)]
        if len(bots) != 1:
            raise ValueError(f"no join for {(a, b)}")
        return bots[0]

    alg = PartialAlgebra.total_from_fn(
        LATTICE_TYPE, elements, {"meet": meet_fn, "join": join_fn}
    )
    assert is_lattice_algebra(alg)
    return alg


def _chain_lattice(k):
    els = list(range(k))
    return PartialAlgebra.total_from_fn(LATTICE_TYPE, els, {"meet": min, "join": max})


def dual_lattice(algebra):
    ops = {"meet": dict(algebra.ops["join"]), "join": dict(algebra.ops["meet"])}
    return PartialAlgebra(algebra.stype, algebra.universe, ops, validate=False)


_BUILDERS = {}


def _register(name):
    def deco(fn):
        _BUILDERS[name] = fn
        return fn

    return deco


@_register("two")
def _build_two():
    alg = _chain_lattice(2)
    return NamedLattice("two", alg, {"zero": 0, "one": 1})


@_register("M3")
def _build_m3():
    els = ["0", "x1", "x2", "x3", "1"]
    covers = [("0", a) for a in ("x1", "x2", "x3")] + [(a, "1") for a in ("x1", "x2", "x3")]
    alg = lattice_from_covers(els, covers)
    return NamedLattice("M3", alg, {"zero": "0", "one": "1", "x1": "x1", "x2": "x2", "x3": "x3"})


@_register("N5")
def _build_n5():
    els = ["0", "a", "b", "c", "1"]
    covers = [("0", "a"), ("a", "c"), ("c", "1"), ("0", "b"), ("b", "1")]
    alg = lattice_from_covers(els, covers)
    return NamedLattice("N5", alg, {"zero": "0", "one": "1"})


@_register("L2")
def _build_l2():
    els = ["0", "u", "v", "x1", "x2", "x3", "1"]
    covers = [
        ("0", "u"), ("0", "v"),
        ("u", "x1"), ("u", "x3"), ("v", "x2"), ("v", "x3"),
        ("x1", "1"), ("x2", "1"), ("x3", "1"),
    ]
    alg = lattice_from_covers(els, covers)
    return NamedLattice("L2", alg, {"zero": "0", "one": "1", "x1": "x1", "x2": "x2", "x3": "x3"})


@_register("L3")
def _build_l3():
    els = ["0", "x1", "w", "x2", "y", "x3", "1"]
    covers = [
        ("0", "x1"), ("0", "w"),
        ("w", "x2"), ("w", "x3"),
        ("x1", "y"), ("x2", "y"),
        ("y", "1"), ("x3", "1"),
    ]
    alg = lattice_from_covers(els, covers)
    return NamedLattice("L3", alg, {"zero": "0", "one": "1", "x1": "x1", "x2": "x2", "x3": "x3"})


@_register("L4")
def _build_l4():
    els = ["0", "x1", "x2", "x3", "v", "1"]
    covers = [
        ("0", "x1"), ("0", "x2"), ("0", "x3"),
        ("x1", "v"), ("x2", "v"),
        ("v", "1"), ("x3", "1"),
    ]
    alg = lattice_from_covers(els, covers)
    return NamedLattice("L4", alg, {"zero": "0", "one": "1", "x1": "x1", "x2": "x2", "x3": "x3"})


def _build_xk(which):
    xk = f"x{which}"
    els = ["0", "m", xk, "x3", "1"]
    covers = [("0", "m"), ("m", xk), ("m", "x3"), (xk, "1"), ("x3", "1")]
    alg = lattice_from_covers(els, covers)
    return NamedLattice(f"X{which}", alg, {"zero": "0", "one": "1", xk: xk, "x3": "x3"})


_BUILDERS["X1"] = lambda: _build_xk(1)
_BUILDERS["X2"] = lambda: _build_xk(2)


def build_named(name):
    """Named lattice registry; supports chain:k, dual:NAME, power:NAME:k."""
    if name in _BUILDERS:
        return _BUILDERS[name]()
    if name.startswith("chain:"):
        k = int(name.split(":", 1)[1])
        if k < 1:
            raise UnknownName(name)
        alg = _chain_lattice(k)
        return NamedLattice(name, alg, {"zero": 0, "one": k - 1})
    if name.startswith("dual:"):
        base = build_named(name.split(":", 1)[1])
        special = dict(base.special)
        special["zero"], special["one"] = special.get("one"), special.get("zero")
        return NamedLattice(name, dual_lattice(base.algebra), special)
    if name.startswith("power:"):
        _, base_name, k = name.split(":")
        base = build_named(base_name)
        alg = PartialAlgebra.product([base.algebra] * int(k))
        special = {
            key: tuple([val] * int(k)) for key, val in base.special.items() if val is not None
        }
        return NamedLattice(name, alg, special)
    raise UnknownName(name)


# ---------------------------------------------------------------------------
# the two squares

SQUARE_NODES = ("b", "l", "r", "t")


@dataclass
class UnliftableSquare:
    """The inclusion square inside the base lattice and its chain-powered
    companion, with the isotone-surjection index set and the per-index
    projection transformations."""

    n: int
    base: NamedLattice
    x_square: Diagram
    a_square: Diagram
    cuts: tuple  # (i, j) encodings of the isotone surjections
    t_maps: dict  # (i, j) -> dict chain-element -> X0 element
    projections: dict  # (i, j) -> dict node -> PalgMorphism A_node -> X_node

    @property
    def chain_algebra(self):
        return self.a_square.objects["b"]


def _sublattice(base_alg, subset, name):
    sub = base_alg.restrict_full(subset)
    if not sub.is_total():
        raise HypothesisFailed(f"{name} is not closed under the operations")
    return sub


def _count_isotone_surjections(chain_els, target_chain):
    count = 0
    for vals in product(range(len(target_chain)), repeat=len(chain_els)):
        if all(vals[i] <= vals[i + 1] for i in range(len(vals) - 1)) and set(vals) == set(
            range(len(target_chain))
        ):
            count += 1
    return count


def build_square(base, n):
    """Both squares over the square poset, from a base lattice with marked
    elements and a chain of length n.

    Hypotheses: x1 meet x2 = 0 and x3 join x1 = x3 join x2 = 1 in the base;
    violations raise with the failing equation. The surjection index set is
    materialized and its size checked against an independent brute count.
    """
    if isinstance(base, str):
        base = build_named(base)
    K = base.algebra
    sp = base.special
    zero, one = sp["zero"], sp["one"]
    x1, x2, x3 = sp["x1"], sp["x2"], sp["x3"]
    if K.ops["meet"][(x1, x2)] != zero:
        raise HypothesisFailed("x1 meet x2 = 0 fails")
    for xk in (x1, x2):
        if K.ops["join"][(x3, xk)] != one:
            raise HypothesisFailed(f"x3 join {xk} = 1 fails")
    if n < 2:
        raise HypothesisFailed("n must be at least 2")

    m13 = K.ops["meet"][(x1, x3)]
    m23 = K.ops["meet"][(x2, x3)]
    x0 = _sublattice(K, {zero, x3, one}, "X0")
    xk_algs = {
        "b": x0,
        "l": _sublattice(K, {zero, m13, x1, x3, one}, "X1"),
        "r": _sublattice(K, {zero, m23, x2, x3, one}, "X2"),
        "t": K,
    }
    poset = FinitePoset.square()

    def incl(a, b):
        return PalgMorphism(a, b, {x: x for x in a.universe})

    x_square = Diagram.from_generators(
        poset,
        xk_algs,
        {
            (p, q): incl(xk_algs[p], xk_algs[q])
            for (p, q) in [("b", "l"), ("b", "r"), ("l", "t"), ("r", "t")]
        },
    )

    chain = _chain_lattice(n + 1)
    x0_chain = [zero, x3, one]
    cuts = tuple((i, j) for i in range(n - 1) for j in range(i + 1, n))
    assert len(cuts) == n * (n - 1) // 2
    assert len(cuts) == _count_isotone_surjections(chain.universe, x0_chain)
    t_maps = {}
    for (i, j) in cuts:
        t_maps[(i, j)] = {
            k: (zero if k <= i else (x3 if k <= j else one)) for k in chain.universe
        }

    powers = {
        node: PartialAlgebra.product([xk_algs[node]] * len(cuts)) for node in ("l", "r", "t")
    }
    a_algs = {"b": chain, "l": powers["l"], "r": powers["r"], "t": powers["t"]}

    def chain_map(node):
        return PalgMorphism(
            chain, a_algs[node],
            {k: tuple(t_maps[c][k] for c in cuts) for k in chain.universe},
        )

    a_square = Diagram.from_generators(
        poset,
        a_algs,
        {
            ("b", "l"): chain_map("l"),
            ("b", "r"): chain_map("r"),
            ("l", "t"): incl(a_algs["l"], a_algs["t"]),
            ("r", "t"): incl(a_algs["r"], a_algs["t"]),
        },
    )

    projections = {}
    for idx, c in enumerate(cuts):
        comps = {"b": PalgMorphism(chain, x0, dict(t_maps[c]))}
        for node in ("l", "r", "t"):
            comps[node] = PalgMorphism(
                a_algs[node], xk_algs[node],
                {u: u[idx] for u in a_algs[node].universe},
            )
        projections[c] = comps
    return UnliftableSquare(n, base, x_square, a_square, cuts, t_maps, projections)


def _atoms_of_boolean(cs):
    zero = cs.zero
    atoms = [a for a in cs.elements if a != zero and all(
        not (cs.leq(b, a) and b != zero and b != a) for b in cs.elements
    )]
    return atoms


def _is_boolean_with_atoms(cs, expected_atoms):
    atoms = _atoms_of_boolean(cs)
    if sorted(map(sort_key, atoms)) != sorted(map(sort_key, expected_atoms)):
        return False
    if len(cs) != 2 ** len(atoms):
        return False
    seen = set()
    for subset_bits in range(2 ** len(atoms)):
        chosen = [a for k, a in enumerate(atoms) if subset_bits >> k & 1]
        seen.add(cs.join_all(chosen))
    return len(seen) == len(cs)


def verify_square_facts(square, direct_bound=30):
    """The stated finite facts about the two squares.

    (a) the two principal congruences at the marked elements meet trivially
    in each wing; (b) the chain's congruence lattice is Boolean on the cover
    atoms; (c) every node is congruence (n+1)-permutable, checked directly
    when small and through the factor plus the product-closure observation
    (flagged "indirect") otherwise; (d) both squares commute and each
    projection family is a natural transformation.
    """
    n = square.n
    report = {"n": n, "base": square.base.name, "facts": {}}
    sp = square.base.special
    zero_el = sp["zero"]
    one_el = sp["one"]

    # (a)
    fact_a = {}
    for node, xk in (("l", sp["x1"]), ("r", sp["x2"])):
        alg = square.x_square.objects[node]
        t1 = _cong.principal_congruence(alg, one_el, xk)
        t2 = _cong.principal_congruence(alg, sp["x3"], one_el)
        meet = _cong.con_meet(t1, t2)
        fact_a[node] = meet == _cong.Congruence.identity(alg.universe)
    report["facts"]["meet_of_principals_zero"] = fact_a

    # (b)
    chain = square.chain_algebra
    cs = _cong.conc(chain)
    expected = [cs.principal(k, k + 1) for k in range(n)]
    report["facts"]["chain_con_boolean"] = _is_boolean_with_atoms(cs, expected)

    # (c)
    fact_c = {}
    for node in SQUARE_NODES:
        alg = square.a_square.objects[node]
        if len(alg.universe) <= direct_bound:
            ok, _ = _cong.is_n_permutable(alg, n + 1)
            fact_c[node] = {"ok": ok, "method": "direct"}
        else:
            factor = square.x_square.objects[node]
            ok, _ = _cong.is_n_permutable(factor, n + 1)
            lattice_ok = is_lattice_algebra(factor)
            fact_c[node] = {
                "ok": ok and lattice_ok,
                "method": "indirect",
                "warning": "finite power of a congruence-permutable-class lattice; "
                "product closure in a congruence-distributive variety",
            }
    report["facts"]["nodes_n_plus_1_permutable"] = fact_c

    # (d)
    ok_x, _ = square.x_square.validate()
    ok_a, _ = square.a_square.validate()
    natural = {}
    for c in square.cuts:
        try:
            NaturalTransformation(square.a_square, square.x_square, square.projections[c])
            natural[str(c)] = True
        except ValueError:
            natural[str(c)] = False
    report["facts"]["squares_commute"] = ok_x and ok_a
    report["facts"]["projections_natural"] = natural

    report["ok"] = (
        all(fact_a.values())
        and report["facts"]["chain_con_boolean"]
        and all(v["ok"] for v in fact_c.values())
        and report["facts"]["squares_commute"]
        and all(natural.values())
    )
    return report


# ---------------------------------------------------------------------------
# candidates and the refutation engine


@dataclass
class CandidateSquare:
    """Gamp square over the square poset, with an optional natural equivalence
    onto the inner-pregamp image; None means the image is the algebra square
    on the nose and the equivalence is the identity."""

    diagram: Diagram
    equivalence: object = None
    label: str = ""


@dataclass
class TraceStep:
    name: str
    detail: object
    ok: bool = True


@dataclass
class RefutationCertificate:
    """Full trace of the executed proof: the chain, the permutability
    interpolants, the violation indices, the chosen surjection, the ideal
    family, and the final inequality that direct computation refutes."""

    chain: tuple
    interpolants: tuple
    index_i: int
    index_j: int
    cut: tuple
    ideals: dict
    final_inequality: tuple
    steps: list

    def validate(self, square):
        """Re-run every recorded step check; the final inequality must fail in
        the chain's congruence semilattice."""
        assert all(s.ok for s in self.steps)
        cs = _cong.conc(square.chain_algebra)
        lhs, rhs_parts = self.final_inequality
        rhs = cs.join_all(rhs_parts)
        return not cs.leq(lhs, rhs)


def _expected_inner_square(square):
    """The inner-pregamp square every candidate must match on the nose."""
    from .diagram import apply_functor

    return apply_functor(square.a_square, "PGA")


def _require(cond, reason, detail=None):
    if not cond:
        raise PreconditionFailed(reason, detail)


def _gamp_square_preconditions(square, cand, n, steps):
    """All stated candidate preconditions, checked exhaustively.

    The candidate is first brought onto the algebra square on the nose
    (transporting along the supplied equivalence when there is one); the
    operation and permutability checks are isomorphism-invariant, so they
    run on the transported diagram.
    """
    diagram = cand.diagram
    _require(diagram.poset == square.a_square.poset, "index-poset")
    ok, viol = diagram.validate()
    _require(ok, "diagram", viol)
    for p in SQUARE_NODES:
        g = diagram.objects[p]
        ok, viol = check_axioms(g.pregamp)
        _require(ok, "distance-axioms", (p, viol))
        ok, viol = is_pregamp_of(g.pregamp, LATTICE_IDENTITIES)
        _require(ok, "lattice-variety", (p, viol))
    expected = _expected_inner_square(square)
    if cand.equivalence is None:
        for p in SQUARE_NODES:
            _require(pggl(diagram.objects[p]) == expected.objects[p], "inner-image", p)
        for (p, q), arrow in diagram.arrows.items():
            _require(
                pggl_mor(arrow) == expected.arrows[(p, q)], "inner-image-arrow", (p, q)
            )
    else:
        # transport along the supplied equivalence; non-invertible components
        # are precondition-rejected rather than coerced
        try:
            cand.equivalence.validate()
        except ValueError as e:
            raise PreconditionFailed("naturality", str(e))
        diagram = _transport_candidate(square, cand, expected)
        for p in SQUARE_NODES:
            _require(pggl(diagram.objects[p]) == expected.objects[p], "inner-image", p)
        for (p, q), arrow in diagram.arrows.items():
            _require(
                pggl_mor(arrow) == expected.arrows[(p, q)], "inner-image-arrow", (p, q)
            )
    okop = all(
        bool(check_morphism_property(diagram.arrows[(p, q)], "operational"))
        for p in SQUARE_NODES
        for q in SQUARE_NODES
        if diagram.poset.lt(p, q)
    )
    _require(okop, "operational")
    for p in SQUARE_NODES:
        v = check_property(diagram.objects[p], "lattice_n_permutable", n=n)
        _require(bool(v), "lattice-n-permutable", (p, v.witness))
    return diagram


def _transport_candidate(square, cand, expected):
    """Rename a candidate along its equivalence so the inner image is the
    algebra square on the nose."""
    from .palg import is_palg_isomorphism

    diagram = cand.diagram
    new_objects = {}
    renamings = {}
    sem_renamings = {}
    for p in SQUARE_NODES:
        comp = cand.equivalence.components[p]
        _require(
            is_palg_isomorphism(comp.f)
            and comp.fsem.is_injective()
            and comp.fsem.is_surjective(),
            "naturality",
            ("component not invertible", p),
        )
        g = diagram.objects[p]
        inv = {comp.f(x): x for x in comp.f.source.universe}
        rename = {}
        for x in g.outer.universe:
            rename[x] = inv[x] if x in inv else ("ext", x)
        sem_inv = {comp.fsem(a): a for a in comp.fsem.source.elements}
        renamings[p] = rename
        sem_renamings[p] = sem_inv
        uni = [rename[x] for x in g.outer.universe]
        ops = {
            name: {tuple(rename[a] for a in args): rename[v] for args, v in table.items()}
            for name, table in g.outer.ops.items()
        }
        outer = PartialAlgebra(g.outer.stype, uni, ops, validate=False)
        sem = expected.objects[p].sem
        dist = {
            (rename[x], rename[y]): sem_inv[g.delta(x, y)]
            for x in g.outer.universe
            for y in g.outer.universe
        }
        inner = expected.objects[p].carrier
        new_objects[p] = Gamp(inner, Pregamp(outer, dist, sem), validate=False)
    new_arrows = {}
    for (p, q), arrow in diagram.arrows.items():
        fmap = {
            renamings[p][x]: renamings[q][arrow.f(x)] for x in arrow.f.source.universe
        }
        smap = {
            sem_renamings[p][a]: sem_renamings[q][arrow.fsem(a)]
            for a in arrow.fsem.source.elements
        }
        new_arrows[(p, q)] = GampMorphism(
            new_objects[p], new_objects[q],
            PalgMorphism(new_objects[p].outer, new_objects[q].outer, fmap),
            SemMorphism(new_objects[p].sem, new_objects[q].sem, smap),
        )
    return Diagram(diagram.poset, new_objects, new_arrows)


def _search_lattice_witness(g, xs, n):
    """Interpolants for one tuple under the lattice permutability property."""
    S = g.sem
    meets = g.outer.ops["meet"]
    joins = g.outer.ops["join"]
    m1 = meets.get((xs[0], xs[n]), UNDEFINED)
    j1 = joins.get((xs[0], xs[n]), UNDEFINED)
    if m1 is UNDEFINED or j1 is UNDEFINED:
        return None
    joins_even = S.join_all(g.delta(xs[i], xs[i + 1]) for i in range(n) if i % 2 == 0)
    joins_odd = S.join_all(g.delta(xs[i], xs[i + 1]) for i in range(n) if i % 2 == 1)
    outer = sorted(g.outer.universe, key=sort_key)
    for mid in product(outer, repeat=n - 1):
        ys = (m1,) + mid + (j1,)
        ok = True
        for i in range(n + 1):
            for j in range(i, n + 1):
                if meets.get((ys[i], ys[j]), UNDEFINED) != ys[i]:
                    ok = False
                    break
                if meets.get((ys[j], ys[i]), UNDEFINED) != ys[i]:
                    ok = False
                    break
            if not ok:
                break
        if ok:
            for k in range(n):
                bound = joins_even if k % 2 == 1 else joins_odd
                if not S.leq(g.delta(ys[k], ys[k + 1]), bound):
                    ok = False
                    break
        if ok:
            return ys
    return None


def refute_candidate(square, cand, n, precheck=True):
    """Execute the no-extension proof on a candidate, checking every step.

    Raises PreconditionFailed when the candidate is not a valid operational,
    lattice congruence n-permutable gamp square over the algebra square.
    After that, every derived (in)equality of the proof is recomputed on the
    candidate's tables; any failure raises StepFailed naming the step, which
    signals an implementation bug or a genuine counterexample. A completed
    trace ends in an inequality that direct computation of the chain's
    congruences refutes, packaged as a certificate.
    """
    steps = []

    def record(name, detail, ok=True):
        steps.append(TraceStep(name, detail, ok))
        if not ok:
            raise StepFailed(name, detail)

    if precheck:
        diagram = _gamp_square_preconditions(square, cand, n, steps)
    else:
        diagram = cand.diagram

    chain = square.chain_algebra
    a = list(chain.universe)
    g0 = diagram.objects["b"]
    cs0 = g0.sem
    d0 = g0.delta

    ys = _search_lattice_witness(g0, tuple(a), n)
    record("witness", ys, ys is not None)
    b = list(ys)
    record("witness-endpoints", (b[0], b[n]), b[0] == a[0] and b[n] == a[n])

    for k in range(n):
        bound = cs0.join(d0(a[0], a[k]), d0(a[k + 1], a[n]))
        record(
            f"between-endpoints[{k}]", (d0(b[k], b[k + 1]), bound),
            cs0.leq(d0(b[k], b[k + 1]), bound),
        )

    bad = [i for i in range(n) if not cs0.leq(d0(a[i], b[i + 1]), d0(a[0], a[i]))]
    record("minimal-index", bad, bool(bad))
    i = min(bad)
    record("comparison", i, cs0.leq(d0(a[0], b[i]), d0(a[0], a[i])))
    record("step-escape", i, not cs0.leq(d0(b[i], b[i + 1]), d0(a[0], a[i])))

    conc_chain = _cong.conc(chain)
    atoms = [conc_chain.principal(k, k + 1) for k in range(n)]
    record("chain-boolean", None, _is_boolean_with_atoms(conc_chain, atoms))
    js = [
        j
        for j in range(n)
        if cs0.leq(atoms[j], d0(b[i], b[i + 1]))
        and not cs0.leq(atoms[j], d0(a[0], a[i]))
    ]
    record("atom-index", js, bool(js))
    j = min(js)
    record("index-parity", (i, j), j > i and (i - j) % 2 != 0)

    cut = (i, j)
    record("surjection", cut, cut in square.cuts)

    # ideal family from the projection kernels
    proj = square.projections[cut]
    ideals = {}
    for p in SQUARE_NODES:
        conc_proj = _cong.conc_morphism(
            proj[p], source_conc=diagram.objects[p].sem
        )
        ideals[p] = ker0(conc_proj)
    dideal = DiagramIdeal(diagram, ideals)
    qdiagram, qtransform = quotient_diagram(diagram, dideal, validate=False)
    record("quotient", {p: len(qdiagram.objects[p].outer) for p in SQUARE_NODES})

    # the induced comparison with the inclusion square is an equivalence
    xi = {}
    for p in SQUARE_NODES:
        xk_alg = square.x_square.objects[p]
        qg = qdiagram.objects[p]
        proj_q = qtransform.components[p]
        fwd = {}
        for x in diagram.objects[p].inner.universe:
            fwd[proj_q.f(x)] = proj[p](x)
        ok = set(fwd.keys()) == set(qg.inner.universe) and len(set(fwd.values())) == len(fwd)
        record(f"equivalence-carrier[{p}]", None, ok and set(fwd.values()) == set(xk_alg.universe))
        xi[p] = {v: k for k, v in fwd.items()}

    xcs = {p: _cong.conc(square.x_square.objects[p]) for p in SQUARE_NODES}
    xi_sem = {}
    for p in SQUARE_NODES:
        qg = qdiagram.objects[p]
        fwd = {}
        conc_proj = _cong.conc_morphism(
            proj[p], source_conc=diagram.objects[p].sem, target_conc=xcs[p]
        )
        proj_q = qtransform.components[p]
        for t in diagram.objects[p].sem.elements:
            fwd[proj_q.fsem(t)] = conc_proj(t)
        ok = len(set(fwd.values())) == len(fwd) and set(fwd.keys()) == set(qg.sem.elements)
        record(f"equivalence-sem[{p}]", None, ok)
        xi_sem[p] = {v: k for k, v in fwd.items()}

    # claim instance data at the quotient's bottom node
    zero_el = square.base.special["zero"]
    one_el = square.base.special["one"]
    x3_el = square.base.special["x3"]
    proj0 = qtransform.components["b"]
    y = proj0.f(b[i + 1])
    qg0 = qdiagram.objects["b"]
    o0, m0, e0 = xi["b"][zero_el], xi["b"][x3_el], xi["b"][one_el]
    record(
        "claim-distance",
        (qg0.delta(o0, y), qg0.delta(m0, e0)),
        qg0.sem.leq(qg0.delta(o0, y), qg0.delta(m0, e0)),
    )
    meets0 = qg0.outer.ops["meet"]
    record("claim-meet-top", None, meets0.get((y, e0), UNDEFINED) == y)

    # walk the claim through the wings into the top node
    marked = {"l": square.base.special["x1"], "r": square.base.special["x2"]}
    pushed = {}
    for node in ("l", "r"):
        arrow = qdiagram.arrows[("b", node)]
        gk = qdiagram.objects[node]
        yk = arrow.f(y)
        ok_el = xi[node][zero_el]
        ck = xi[node][marked[node]]
        ek = xi[node][one_el]
        x3k = xi[node][x3_el]
        meets = gk.outer.ops["meet"]
        wk = meets.get((yk, ck), UNDEFINED)
        record(f"claim-definedness[{node}]", (yk, ck), wk is not UNDEFINED)
        record(
            f"claim-zero-meet[{node}]", None, meets.get((ok_el, ck), UNDEFINED) == ok_el
        )
        S = gk.sem
        record(
            f"claim-eq1a[{node}]",
            None,
            S.leq(gk.delta(ok_el, wk), gk.delta(ok_el, yk)),
        )
        record(
            f"claim-eq1b[{node}]",
            None,
            S.leq(gk.delta(yk, wk), S.join(gk.delta(yk, ok_el), gk.delta(ok_el, wk))),
        )
        record(
            f"claim-eq1c[{node}]",
            None,
            S.leq(gk.delta(ok_el, yk), gk.delta(x3k, ek)),
        )
        record(f"claim-top-meet[{node}]", None, meets.get((yk, ek), UNDEFINED) == yk)
        record(
            f"claim-eq2[{node}]",
            None,
            S.leq(gk.delta(yk, wk), gk.delta(ek, ck)),
        )
        xalg = square.x_square.objects[node]
        t1 = _cong.principal_congruence(xalg, x3_el, one_el)
        t2 = _cong.principal_congruence(xalg, one_el, marked[node])
        meet_zero = _cong.con_meet(t1, t2) == _cong.Congruence.identity(xalg.universe)
        record(f"claim-meet-fact[{node}]", None, meet_zero)
        chi_val = {v: k for k, v in xi_sem[node].items()}[gk.delta(yk, wk)]
        record(
            f"claim-meet-conclusion[{node}]",
            chi_val,
            xcs[node].leq(chi_val, t1) and xcs[node].leq(chi_val, t2),
        )
        record(f"claim-separation[{node}]", (yk, wk), yk == wk)
        pushed[node] = yk

    arrow_lt = qdiagram.arrows[("l", "t")]
    arrow_rt = qdiagram.arrows[("r", "t")]
    y3a = arrow_lt.f(pushed["l"])
    y3b = arrow_rt.f(pushed["r"])
    record("claim-square-agree", (y3a, y3b), y3a == y3b)
    y3 = y3a
    gt = qdiagram.objects["t"]
    o3 = xi["t"][zero_el]
    x13 = xi["t"][square.base.special["x1"]]
    x23 = xi["t"][square.base.special["x2"]]
    meets_t = gt.outer.ops["meet"]
    joins_t = gt.outer.ops["join"]
    record("claim-x1x2", None, meets_t.get((x13, x23), UNDEFINED) == o3)
    record("claim-meet-x1", None, meets_t.get((y3, x13), UNDEFINED) == y3)
    record("claim-meet-x2", None, meets_t.get((y3, x23), UNDEFINED) == y3)
    m3 = meets_t.get((y3, o3), UNDEFINED)
    record("claim-meet-zero-defined", (y3, o3), m3 is not UNDEFINED)
    record("claim-assoc", (m3, y3), m3 == y3)
    record("claim-zero-below", None, meets_t.get((o3, y3), UNDEFINED) == o3)
    v3 = joins_t.get((o3, y3), UNDEFINED)
    record("claim-join-defined", (o3, y3), v3 is not UNDEFINED)
    record("claim-absorb1", v3, v3 == y3)
    v3b = joins_t.get((y3, o3), UNDEFINED)
    record("claim-commute", (v3, v3b), v3b is not UNDEFINED and v3b == v3)
    record("claim-absorb2", m3, m3 == o3)
    record("claim-collapse", (y3, o3), y3 == o3)

    ksem = qdiagram.arrows[("b", "t")].fsem
    kernel = {d for d in qg0.sem.elements if ksem(d) == qdiagram.objects["t"].sem.zero}
    record("claim-kernel", sorted(map(sort_key, kernel)), kernel == {qg0.sem.zero})
    record("claim-conclusion", (y, o0), qg0.delta(y, o0) == qg0.sem.zero and y == o0)

    # back upstairs: membership in the bottom ideal and the final inequality
    record("consclaim-membership", None, d0(a[0], b[i + 1]) in ideals["b"])
    rhs_parts = (
        conc_chain.principal(a[0], a[i]),
        conc_chain.principal(a[i + 1], a[j]),
        conc_chain.principal(a[j + 1], a[n]),
    )
    record(
        "consclaim-bound",
        None,
        cs0.leq(d0(a[0], b[i + 1]), cs0.join_all(rhs_parts)),
    )
    record(
        "final-link-triangle",
        None,
        cs0.leq(
            d0(b[i], b[i + 1]),
            cs0.join(d0(b[i], a[0]), d0(a[0], b[i + 1])),
        ),
    )
    final_lhs = atoms[j]
    final_rhs = (conc_chain.principal(a[0], a[j]), conc_chain.principal(a[j + 1], a[n]))
    cert = RefutationCertificate(
        chain=tuple(a),
        interpolants=tuple(b),
        index_i=i,
        index_j=j,
        cut=cut,
        ideals={p: sorted(map(sort_key, ideals[p].carrier)) for p in SQUARE_NODES},
        final_inequality=(final_lhs, final_rhs),
        steps=steps,
    )
    refuted = not conc_chain.leq(final_lhs, conc_chain.join_all(final_rhs))
    record("final-contradiction", cert.final_inequality, refuted)
    return cert


# ---------------------------------------------------------------------------
# candidate enumeration


@dataclass
class CandidateOutcome:
    """One item of the exhaustive stream: either a fully materialized
    candidate or a pruned branch with the violated constraint."""

    status: str  # "candidate" or "pruned"
    reason: str = ""
    candidate: object = None
    detail: object = None


def algebra_square_candidate(square):
    """The candidate whose gamps are the algebra gamps of the square itself."""
    from .diagram import apply_functor

    return CandidateSquare(apply_functor(square.a_square, "GA"), None, "algebra-square")


class _NodeState:
    """Partial outer structure of one node during enumeration.

    Inner cells are fixed; pad rows and decided cells accumulate; checks are
    incremental where cheap and full at node completion.
    """

    def __init__(self, inner, cs, theta):
        self.inner = inner
        self.cs = cs
        self.theta = dict(theta)  # (x, y) -> congruence, on inner pairs
        self.pads = []
        self.rows = {}  # pad -> {element -> semilattice value}
        self.cells = {}  # (op, a, b) -> value

    def universe(self):
        return list(self.inner.universe) + self.pads

    def delta(self, x, y):
        if x == y:
            return self.cs.zero
        if (x, y) in self.theta:
            return self.theta[(x, y)]
        if x in self.rows and y in self.rows[x]:
            return self.rows[x][y]
        if y in self.rows and x in self.rows[y]:
            return self.rows[y][x]
        raise KeyError((x, y))

    def cell(self, op, a, b):
        if (op, a, b) in self.cells:
            return self.cells[(op, a, b)]
        return self.inner.ops[op].get((a, b), UNDEFINED)

    def defined_cells(self):
        for op in ("meet", "join"):
            for args, v in self.inner.ops[op].items():
                yield (op, args[0], args[1], v)
        for (op, a, b), v in self.cells.items():
            yield (op, a, b, v)

    def compatible_with(self, op, a, b, v):
        """Distance axiom for operations against every decided cell."""
        for (op2, a2, b2, v2) in self.defined_cells():
            if op2 != op:
                continue
            bound = self.cs.join(self.delta(a, a2), self.delta(b, b2))
            if not self.cs.leq(self.delta(v, v2), bound):
                return False
        return True

    def quick_identities_ok(self, op, a, b, v):
        """Local instances touching the new cell: idempotence, commutativity,
        one-step absorption."""
        if a == b and v != a:
            return False
        mirror = self.cell(op, b, a)
        if mirror is not UNDEFINED and mirror != v:
            return False
        other = "join" if op == "meet" else "meet"
        w = self.cell(other, v, b)
        if w is not UNDEFINED and w != b:
            return False
        w = self.cell(other, a, v)
        if w is not UNDEFINED and w != a:
            return False
        return True

    def full_identities_ok(self):
        from .palg import satisfies_identity

        alg = self.materialize()
        for _, t1, t2 in LATTICE_IDENTITIES:
            ok, _ = satisfies_identity(alg, t1, t2)
            if not ok:
                return False
        return True

    def materialize(self):
        ops = {op: dict(self.inner.ops[op]) for op in ("meet", "join")}
        for (op, a, b), v in self.cells.items():
            ops[op][(a, b)] = v
        return PartialAlgebra(LATTICE_TYPE, self.universe(), ops, validate=False)

    def pregamp(self):
        alg = self.materialize()
        dist = {}
        for x in alg.universe:
            for y in alg.universe:
                dist[(x, y)] = self.delta(x, y)
        return Pregamp(alg, dist, self.cs)

    def gamp(self):
        return Gamp(self.inner, self.pregamp(), validate=False)

    def node_checks(self, label, n):
        """Full node validation; None when fine, a pruning outcome otherwise."""
        pg = self.pregamp()
        ok, viol = check_axioms(pg)
        if not ok:
            return CandidateOutcome("pruned", "distance-axioms", detail=(label, viol))
        if not self.full_identities_ok():
            return CandidateOutcome("pruned", "lattice-identities", detail=label)
        ok, viol = is_pregamp_of(pg, LATTICE_IDENTITIES)
        if not ok:
            return CandidateOutcome("pruned", "lattice-variety", detail=(label, viol))
        deficient = _deficient_tuples(self, n)
        if deficient:
            return CandidateOutcome(
                "pruned", "lattice-n-permutable", detail=(label, deficient[0])
            )
        return None


def _nonzero_row_options(state, pad):
    """Axiom-consistent distance rows for a pad, by entrywise backtracking."""
    others = [x for x in state.universe() if x != pad]
    nonzero = [d for d in state.cs.elements if d != state.cs.zero]
    rows = []

    def extend(row, idx):
        if idx == len(others):
            rows.append(dict(row))
            return
        x = others[idx]
        for d in nonzero:
            row[x] = d
            ok = True
            for y, dy in row.items():
                if y == x:
                    continue
                dxy = state.delta(x, y)
                if not state.cs.leq(d, state.cs.join(dy, dxy)):
                    ok = False
                elif not state.cs.leq(dy, state.cs.join(d, dxy)):
                    ok = False
                elif not state.cs.leq(dxy, state.cs.join(d, dy)):
                    ok = False
                if not ok:
                    break
            if ok:
                extend(row, idx + 1)
            del row[x]

    extend({}, 0)
    return rows


def _witness_options(state, xs, n):
    """Interpolant vectors for one tuple, with the meet cells they force."""
    cs = state.cs
    first = state.inner.ops["meet"][(xs[0], xs[n])]
    last = state.inner.ops["join"][(xs[0], xs[n])]
    joins_even = cs.join_all(state.delta(xs[i], xs[i + 1]) for i in range(n) if i % 2 == 0)
    joins_odd = cs.join_all(state.delta(xs[i], xs[i + 1]) for i in range(n) if i % 2 == 1)
    options = []
    for mid in product(state.universe(), repeat=n - 1):
        ys = (first,) + mid + (last,)
        ok = True
        for k in range(n):
            bound = joins_even if k % 2 == 1 else joins_odd
            if not cs.leq(state.delta(ys[k], ys[k + 1]), bound):
                ok = False
                break
        if not ok:
            continue
        forced = {}
        for i in range(n + 1):
            for j in range(i, n + 1):
                forced[("meet", ys[i], ys[j])] = ys[i]
                forced[("meet", ys[j], ys[i])] = ys[i]
        conflict = False
        for (op, a, b), v in forced.items():
            cur = state.cell(op, a, b)
            if cur is not UNDEFINED and cur != v:
                conflict = True
                break
        if not conflict:
            options.append((ys, forced))
    return options


def _deficient_tuples(state, n):
    """Tuples with no interpolants realized by the already-decided structure."""
    out = []
    for xs in product(state.inner.universe, repeat=n + 1):
        opts = _witness_options(state, xs, n)
        if not any(
            all(state.cell(*k) == v for k, v in forced.items()) for _, forced in opts
        ):
            out.append(xs)
    return out


def _try_add_cells(state, forced):
    """Add cells with the incremental checks; returns the undo list or None."""
    added = []
    for (op, a, b), v in forced.items():
        cur = state.cell(op, a, b)
        if cur is not UNDEFINED:
            if cur != v:
                for k in added:
                    del state.cells[k]
                return None
            continue
        if not state.quick_identities_ok(op, a, b, v) or not state.compatible_with(op, a, b, v):
            for k in added:
                del state.cells[k]
            return None
        state.cells[(op, a, b)] = v
        added.append((op, a, b))
    return added


def _undo_cells(state, added):
    for k in added:
        del state.cells[k]


def enumerate_candidates(square, n, size_bound=1, max_nodes=5_000_000):
    """Exhaustive stream of padded candidate squares at the given bound.

    Enumerates, with constraint propagation, the minimal candidates: outer
    carriers extend the inner algebras by at most size_bound fresh elements
    per node; the decided cells are exactly those forced by operationality,
    by morphism preservation, and by a chosen permutability interpolant per
    witness-deficient tuple; distance rows and arrow images range over all
    axiom-consistent choices. Every candidate at the bound extends one of
    these cellwise with the same rows, and every rejection check is monotone
    under adding cells, so exhausting this stream refutes every candidate at
    the bound. Pads at non-bottom nodes appear exactly when an arrow image
    requires them; a pad never hit by an arrow can only serve as witness
    room, and the nodes here already witness their tuples internally.

    Yields CandidateOutcome items in a fixed order: materialized candidates,
    and pruned branches tagged with the violated constraint. Only padding
    bounds 0 and 1 are supported.
    """
    if size_bound < 0 or size_bound > 1:
        raise BudgetExceeded("only padding bounds 0 and 1 are implemented")
    yield CandidateOutcome("candidate", candidate=algebra_square_candidate(square))
    if size_bound == 0:
        return

    a_algs = {p: square.a_square.objects[p] for p in SQUARE_NODES}
    if any(len(a.universe) > 16 for a in a_algs.values()):
        raise BudgetExceeded(
            "padded enumeration is a desk-scale tool; a node carrier exceeds 16"
        )
    cs = {p: _cong.conc(a_algs[p]) for p in SQUARE_NODES}
    theta = {
        p: {
            (x, y): cs[p].principal(x, y)
            for x in a_algs[p].universe
            for y in a_algs[p].universe
        }
        for p in SQUARE_NODES
    }
    conc_f = {
        (p, q): _cong.conc_morphism(square.a_square.arrows[(p, q)], cs[p], cs[q])
        for p in SQUARE_NODES
        for q in SQUARE_NODES
        if square.a_square.poset.leq(p, q)
    }

    counter = {"nodes": 0}

    def tick():
        counter["nodes"] += 1
        if counter["nodes"] > max_nodes:
            raise BudgetExceeded("enumeration budget exhausted")

    states = {p: _NodeState(a_algs[p], cs[p], theta[p]) for p in SQUARE_NODES}
    pads = {p: f"p{p}" for p in SQUARE_NODES}
    images = {}  # wing or top images of the propagated pads

    def stage_bottom():
        state = states["b"]
        state.pads = [pads["b"]]
        for row in _nonzero_row_options(state, pads["b"]):
            tick()
            state.rows = {pads["b"]: row}
            state.cells = {}
            deficient = _deficient_tuples(state, n)
            yield from choose_witnesses(state, deficient, 0)
        state.pads = []
        state.rows = {}
        state.cells = {}

    def choose_witnesses(state, deficient, idx):
        if idx == len(deficient):
            bad = state.node_checks("b", n)
            if bad is not None:
                yield bad
                return
            yield from stage_wing("l")
            return
        xs = deficient[idx]
        opts = _witness_options(state, xs, n)
        progressed = False
        for ys, forced in opts:
            tick()
            added = _try_add_cells(state, forced)
            if added is None:
                continue
            progressed = True
            yield from choose_witnesses(state, deficient, idx + 1)
            _undo_cells(state, added)
        if not progressed:
            yield CandidateOutcome("pruned", "lattice-n-permutable", detail=("b", xs))

    def stage_wing(node):
        state = states[node]
        arrow = square.a_square.arrows[("b", node)]
        pad_w = pads[node]
        for image in list(state.inner.universe) + [pad_w]:
            tick()
            images[node] = image
            state.pads = [pad_w] if image == pad_w else []
            state.rows = {}
            state.cells = {}
            gmap = {x: arrow(x) for x in a_algs["b"].universe}
            gmap[pads["b"]] = image
            push = conc_f[("b", node)]
            ok = True
            forced_row = {}
            for x in a_algs["b"].universe:
                want = push(states["b"].delta(pads["b"], x))
                if image in state.inner:
                    if state.delta(image, gmap[x]) != want:
                        ok = False
                        break
                else:
                    if forced_row.get(gmap[x], want) != want or (
                        want == cs[node].zero and image != gmap[x]
                    ):
                        ok = False
                        break
                    forced_row[gmap[x]] = want
            if not ok:
                yield CandidateOutcome(
                    "pruned", "distance-equivariance", detail=(node, image)
                )
                continue
            if image == pad_w:
                rows = [
                    row
                    for row in _nonzero_row_options(state, pad_w)
                    if all(row.get(k) == v for k, v in forced_row.items())
                ]
                if not rows:
                    yield CandidateOutcome(
                        "pruned", "distance-equivariance", detail=(node, image)
                    )
                    continue
            else:
                rows = [None]
            for row in rows:
                tick()
                state.rows = {pad_w: row} if row is not None else {}
                added = _push_cells(state, states["b"].cells, gmap)
                if added is None:
                    yield CandidateOutcome("pruned", "morphism", detail=(node, image))
                    continue
                yield from fill_node(
                    node,
                    forced_pool=[image] if image == pad_w else [],
                    after=lambda node=node: stage_wing("r") if node == "l" else stage_top(),
                )
                _undo_cells(state, added)

    def _push_cells(state, src_cells, gmap):
        forced = {}
        for (op, a, b), v in src_cells.items():
            key = (op, gmap[a], gmap[b])
            val = gmap[v]
            if forced.get(key, val) != val:
                return None
            forced[key] = val
        return _try_add_cells(state, forced)

    def fill_node(node, forced_pool, after):
        """Operationality: fill every cell over the inner part and the
        propagated pads, then run the node checks and continue."""
        state = states[node]
        pool = sorted(set(list(state.inner.universe) + forced_pool), key=sort_key)
        missing = [
            (op, a, b)
            for op in ("meet", "join")
            for a in pool
            for b in pool
            if state.cell(op, a, b) is UNDEFINED
        ]

        def fill(idx):
            if idx == len(missing):
                bad = state.node_checks(node, n)
                if bad is not None:
                    yield bad
                    return
                yield from after()
                return
            op, a, b = missing[idx]
            hit = False
            for v in state.universe():
                tick()
                if not state.quick_identities_ok(op, a, b, v):
                    continue
                if not state.compatible_with(op, a, b, v):
                    continue
                hit = True
                state.cells[(op, a, b)] = v
                yield from fill(idx + 1)
                del state.cells[(op, a, b)]
            if not hit:
                yield CandidateOutcome(
                    "pruned", "operational-cell", detail=(node, (op, a, b))
                )

        yield from fill(0)

    def stage_top():
        state = states["t"]
        pad_t = pads["t"]
        l_state, r_state = states["l"], states["r"]
        arrows = {w: square.a_square.arrows[(w, "t")] for w in ("l", "r")}
        options_t = list(state.inner.universe) + [pad_t]

        def images_for(wing):
            st = states[wing]
            if not st.pads:
                yield None
                return
            for v in options_t:
                yield v

        for l_img in images_for("l"):
            for r_img in images_for("r"):
                tick()
                gl = {x: arrows["l"](x) for x in a_algs["l"].universe}
                if l_img is not None:
                    gl[pads["l"]] = l_img
                gr = {x: arrows["r"](x) for x in a_algs["r"].universe}
                if r_img is not None:
                    gr[pads["r"]] = r_img
                top_l = gl[images["l"]]
                top_r = gr[images["r"]]
                if top_l != top_r:
                    yield CandidateOutcome(
                        "pruned", "square-commutes", detail=(top_l, top_r)
                    )
                    continue
                used_pad = pad_t in gl.values() or pad_t in gr.values()
                state.pads = [pad_t] if used_pad else []
                state.rows = {}
                state.cells = {}
                ok = True
                forced_row = {}
                for (w, gm, st) in (("l", gl, l_state), ("r", gr, r_state)):
                    push = conc_f[(w, "t")]
                    for x in st.universe():
                        for y2 in st.universe():
                            want = push(st.delta(x, y2))
                            u, v = gm[x], gm[y2]
                            if u in state.inner and v in state.inner:
                                if state.delta(u, v) != want:
                                    ok = False
                            elif u == v:
                                if want != cs["t"].zero:
                                    ok = False
                            else:
                                other = v if u == pad_t else u
                                if forced_row.get(other, want) != want:
                                    ok = False
                                forced_row[other] = want
                            if not ok:
                                break
                        if not ok:
                            break
                    if not ok:
                        break
                if not ok:
                    yield CandidateOutcome("pruned", "distance-equivariance", detail="t")
                    continue
                if used_pad:
                    rows = [
                        row
                        for row in _nonzero_row_options(state, pad_t)
                        if all(row.get(k) == v for k, v in forced_row.items())
                    ]
                    if not rows:
                        yield CandidateOutcome(
                            "pruned", "distance-equivariance", detail="t"
                        )
                        continue
                else:
                    rows = [None]
                for row in rows:
                    tick()
                    state.rows = {pad_t: row} if row is not None else {}
                    added_l = _push_cells(state, l_state.cells, gl)
                    if added_l is None:
                        yield CandidateOutcome("pruned", "morphism", detail="t")
                        continue
                    added_r = _push_cells(state, r_state.cells, gr)
                    if added_r is None:
                        _undo_cells(state, added_l)
                        yield CandidateOutcome("pruned", "morphism", detail="t")
                        continue
                    yield from fill_node(
                        "t",
                        forced_pool=[pad_t] if used_pad else [],
                        after=lambda gl=gl, gr=gr: iter(
                            [materialize_candidate(gl, gr)]
                        ),
                    )
                    _undo_cells(state, added_r)
                    _undo_cells(state, added_l)

    def materialize_candidate(gl, gr):
        poset = square.a_square.poset
        gamps = {p: states[p].gamp() for p in SQUARE_NODES}
        maps = {
            ("b", "l"): {
                **{x: square.a_square.arrows[("b", "l")](x) for x in a_algs["b"].universe},
                pads["b"]: images["l"],
            },
            ("b", "r"): {
                **{x: square.a_square.arrows[("b", "r")](x) for x in a_algs["b"].universe},
                pads["b"]: images["r"],
            },
            ("l", "t"): dict(gl),
            ("r", "t"): dict(gr),
        }
        try:
            cover_arrows = {}
            for (p, q), mp in maps.items():
                cover_arrows[(p, q)] = GampMorphism(
                    gamps[p], gamps[q],
                    PalgMorphism(gamps[p].outer, gamps[q].outer, mp),
                    SemMorphism(gamps[p].sem, gamps[q].sem, conc_f[(p, q)].mapping),
                )
            diagram = Diagram.from_generators(poset, gamps, cover_arrows)
        except (ValueError, KeyError) as e:
            return CandidateOutcome("pruned", "morphism", detail=str(e))
        padded = [p for p in SQUARE_NODES if states[p].pads]
        return CandidateOutcome(
            "candidate",
            candidate=CandidateSquare(diagram, None, f"padded[{','.join(padded)}]"),
        )

    yield from stage_bottom()
