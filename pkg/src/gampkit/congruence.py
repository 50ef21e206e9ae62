"""Congruences of finite total algebras: principal congruences, the compact
congruence semilattice, Mal'cev witness chains, quotients, n-permutability."""

from dataclasses import dataclass
from itertools import product

from .errors import NotTotal, TooLarge
from .palg import PalgMorphism, PartialAlgebra, Term
from .semilattice import JoinSemilattice, SemMorphism
from .util import sort_key


class Congruence:
    """Partition of an algebra's universe, compatible with all operations.

    Stored as a frozenset of frozenset blocks plus a block lookup; hashable
    and order-comparable via refinement.
    """

    __slots__ = ("blocks", "_block_of", "_key")

    def __init__(self, blocks):
        self.blocks = frozenset(frozenset(b) for b in blocks)
        self._block_of = {}
        for b in self.blocks:
            for x in b:
                self._block_of[x] = b
        self._key = None

    def same(self, x, y):
        return self._block_of[x] is self._block_of[y] or self._block_of[x] == self._block_of[y]

    def block(self, x):
        return self._block_of[x]

    def leq(self, other):
        return all(b <= other._block_of[next(iter(b))] for b in self.blocks)

    def _sort_key(self):
        if self._key is None:
            self._key = tuple(
                sorted(tuple(sorted(map(sort_key, b))) for b in self.blocks)
            )
        return self._key

    def __eq__(self, other):
        return isinstance(other, Congruence) and self.blocks == other.blocks

    def __hash__(self):
        return hash(self.blocks)

    def __repr__(self):
        blocks = sorted((sorted(b, key=sort_key) for b in self.blocks), key=lambda b: sort_key(tuple(b)))
        return "Congruence(" + " | ".join(",".join(map(str, b)) for b in blocks) + ")"

    def pairs(self):
        for b in self.blocks:
            for x in b:
                for y in b:
                    yield (x, y)

    @classmethod
    def identity(cls, universe):
        return cls([{x} for x in universe])

    @classmethod
    def full(cls, universe):
        return cls([set(universe)])


def _require_total(algebra):
    if not algebra.is_total():
        raise NotTotal("operation requires a total algebra")


class _UnionFind:
    def __init__(self, items):
        self.parent = {x: x for x in items}

    def find(self, x):
        p = self.parent
        root = x
        while p[root] != root:
            root = p[root]
        while p[x] != root:
            p[x], x = root, p[x]
        return root

    def union(self, x, y):
        rx, ry = self.find(x), self.find(y)
        if rx == ry:
            return False
        if sort_key(ry) < sort_key(rx):
            rx, ry = ry, rx
        self.parent[ry] = rx
        return True

    def partition(self):
        classes = {}
        for x in self.parent:
            classes.setdefault(self.find(x), set()).add(x)
        return Congruence(classes.values())


def congruence_closure(algebra, pairs):
    """Least congruence containing the given pairs.

    Worklist closure under one-step unary translations: every merge of u and
    v is propagated through each operation with u, v placed in one slot and
    parameters everywhere else. Chained translations are covered by
    transitivity of the union-find, which is the standard generation
    argument.
    """
    _require_total(algebra)
    uf = _UnionFind(algebra.universe)
    work = []
    for x, y in pairs:
        if uf.union(x, y):
            work.append((x, y))
    universe = algebra.universe
    symbols = [(name, ar) for name, ar in algebra.stype.symbols if ar > 0]
    while work:
        u, v = work.pop()
        for name, ar in symbols:
            table = algebra.ops[name]
            for pos in range(ar):
                for params in product(universe, repeat=ar - 1):
                    a = params[:pos] + (u,) + params[pos:]
                    b = params[:pos] + (v,) + params[pos:]
                    fa, fb = table[a], table[b]
                    if uf.union(fa, fb):
                        work.append((fa, fb))
    return uf.partition()


def principal_congruence(algebra, x, y):
    """Least congruence identifying x and y."""
    return congruence_closure(algebra, [(x, y)])


def is_congruence(algebra, partition):
    """Definitional check: equivalence compatible with every operation."""
    _require_total(algebra)
    if isinstance(partition, Congruence):
        theta = partition
    else:
        theta = Congruence(partition)
    covered = set()
    for b in theta.blocks:
        covered |= b
    if covered != set(algebra.universe):
        return False
    for name, ar in algebra.stype.symbols:
        if ar == 0:
            continue
        table = algebra.ops[name]
        for args1 in product(algebra.universe, repeat=ar):
            for args2 in product(algebra.universe, repeat=ar):
                if all(theta.same(a, b) for a, b in zip(args1, args2)):
                    if not theta.same(table[args1], table[args2]):
                        return False
    return True


def _set_partitions(items):
    items = list(items)
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in _set_partitions(rest):
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1 :]
        yield [[first]] + part


def all_congruences_bruteforce(algebra, bound=7):
    """Every compatible partition, by exhausting all partitions of the universe.

    Deliberately independent of the closure machinery; this is the oracle
    the principal-congruence computation is checked against.
    """
    _require_total(algebra)
    if len(algebra.universe) > bound:
        raise TooLarge(f"brute force capped at {bound} elements")
    out = []
    for part in _set_partitions(algebra.universe):
        theta = Congruence(part)
        if is_congruence(algebra, theta):
            out.append(theta)
    return sorted(out, key=lambda t: t._sort_key())


def least_congruence_bruteforce(algebra, x, y, bound=7):
    """Oracle for principal congruences: meet of all congruences containing (x, y)."""
    candidates = [t for t in all_congruences_bruteforce(algebra, bound) if t.same(x, y)]
    best = candidates[0]
    for t in candidates[1:]:
        best = con_meet(best, t)
    assert is_congruence(algebra, best), "meet of congruences must be a congruence"
    return best


def con_join(a, b):
    """Join of congruences: transitive closure of the union (already compatible)."""
    uf = _UnionFind([x for blk in a.blocks for x in blk])
    for theta in (a, b):
        for blk in theta.blocks:
            it = iter(sorted(blk, key=sort_key))
            first = next(it)
            for x in it:
                uf.union(first, x)
    return uf.partition()


def con_meet(a, b):
    """Meet of congruences: blockwise intersection."""
    blocks = []
    for ba in a.blocks:
        for bb in b.blocks:
            c = ba & bb
            if c:
                blocks.append(c)
    return Congruence(blocks)


def _comparable_pairs(algebra):
    """Pairs (u, v) with u = meet(u, v), for the lattice fast path."""
    meet_t = algebra.ops["meet"]
    out = []
    for u in algebra.universe:
        for v in algebra.universe:
            if u != v and meet_t[(u, v)] == u:
                out.append((u, v))
    return out


def _lattice_cover_pairs(algebra):
    comp = set(_comparable_pairs(algebra))
    covers = []
    for (u, v) in comp:
        if not any((u, w) in comp and (w, v) in comp for w in algebra.universe if w != u and w != v):
            covers.append((u, v))
    return covers


def con_lattice(algebra, bound=160):
    """All congruences of a small finite total algebra.

    Every congruence of a finite algebra is a join of principal ones, so the
    lattice is the join closure of the principal congruences. For lattices,
    principal congruences are generated from cover pairs only, which keeps
    medium-sized instances tractable.
    """
    from .palg import is_lattice_algebra

    _require_total(algebra)
    if len(algebra.universe) > bound:
        raise TooLarge(f"con_lattice capped at {bound} elements (got {len(algebra.universe)})")
    if is_lattice_algebra(algebra):
        gen_pairs = _lattice_cover_pairs(algebra)
    else:
        gen_pairs = [
            (x, y)
            for i, x in enumerate(algebra.universe)
            for y in algebra.universe[i + 1 :]
        ]
    principals = {congruence_closure(algebra, [p]) for p in gen_pairs}
    found = {Congruence.identity(algebra.universe)} | principals
    frontier = list(principals)
    while frontier:
        theta = frontier.pop()
        for other in list(found):
            j = con_join(theta, other)
            if j not in found:
                found.add(j)
                frontier.append(j)
    return sorted(found, key=lambda t: t._sort_key())


class ConcSemilattice(JoinSemilattice):
    """Semilattice of compact congruences, with the principal-congruence generator map."""

    def __init__(self, algebra, congruences):
        self.algebra = algebra
        table = {(a, b): con_join(a, b) for a in congruences for b in congruences}
        zero = Congruence.identity(algebra.universe)
        order = sorted(
            congruences,
            key=lambda t: (len(algebra.universe) - len(t.blocks), t._sort_key()),
        )
        super().__init__(order, zero, table, validate=False)
        self._principal = {}

    def principal(self, x, y):
        key = (x, y)
        if key not in self._principal:
            theta = principal_congruence(self.algebra, x, y)
            assert theta in self, "principal congruence missing from Conc"
            self._principal[key] = theta
        return self._principal[key]


def conc(algebra, bound=160):
    """The join-semilattice of compact congruences of a finite algebra.

    For a finite algebra this carries the whole congruence lattice; the
    elements are Congruence values and the generator map is exposed as
    .principal(x, y).
    """
    congruences = con_lattice(algebra, bound)
    return ConcSemilattice(algebra, congruences)


def conc_morphism(f, source_conc=None, target_conc=None):
    """Image of a total-algebra morphism under the compact-congruence functor.

    Sends a congruence to the congruence generated by the images of its
    pairs; on principal congruences this is Theta(f(x), f(y)) extended
    join-linearly.
    """
    src = source_conc if source_conc is not None else conc(f.source)
    tgt = target_conc if target_conc is not None else conc(f.target)
    mapping = {}
    for theta in src.elements:
        pairs = set()
        for b in theta.blocks:
            bl = sorted(b, key=sort_key)
            for x, y in zip(bl, bl[1:]):
                pairs.add((f(x), f(y)))
        image = congruence_closure(f.target, pairs)
        assert image in tgt, "Conc image not a congruence of the target"
        mapping[theta] = image
    return SemMorphism(src, tgt, mapping)


def quotient_algebra(algebra, theta):
    """Total quotient algebra, classes labeled by their first universe member."""
    _require_total(algebra)
    rep = {}
    for x in algebra.universe:
        blk = theta.block(x)
        rep[x] = next(y for y in algebra.universe if y in blk)
    universe = []
    for x in algebra.universe:
        if rep[x] == x:
            universe.append(x)
    ops = {}
    for name, table in algebra.ops.items():
        t = {}
        for args, val in table.items():
            t[tuple(rep[a] for a in args)] = rep[val]
        ops[name] = t
    q = PartialAlgebra(algebra.stype, universe, ops, validate=False)
    proj = PalgMorphism(algebra, q, rep, validate=False)
    return q, proj


def _compose_relation(rel, theta):
    """theta o rel as a successor map: x -> union of theta-blocks over rel[x]."""
    out = {}
    for x, ys in rel.items():
        acc = set()
        for y in ys:
            acc |= theta.block(y)
        out[x] = acc
    return out


def alternating_composite(alpha, beta, n, universe):
    """alpha o beta o alpha o ... with n factors.

    Composition convention, pinned globally: (a o b) relates x to z when some
    y has (x, y) in b and (y, z) in a, so the rightmost factor acts first.
    """
    rel = {x: {x} for x in universe}
    factors = [alpha if i % 2 == 0 else beta for i in range(n)]
    for theta in reversed(factors):
        rel = _compose_relation(rel, theta)
    return rel


def _relational_n_permutable(algebra, n, congruences):
    for alpha in congruences:
        for beta in congruences:
            left = alternating_composite(alpha, beta, n, algebra.universe)
            right = alternating_composite(beta, alpha, n, algebra.universe)
            if left != right:
                return False, (alpha, beta)
    return True, None


def _elementwise_n_permutable(algebra, n, cong_sl):
    """Chain condition: every (n+1)-tuple admits interpolants y with the
    parity containments between generated congruences."""
    universe = algebra.universe
    theta = {}
    for x in universe:
        for y in universe:
            theta[(x, y)] = cong_sl.principal(x, y)
    for xs in product(universe, repeat=n + 1):
        even = cong_sl.join_all(theta[(xs[i], xs[i + 1])] for i in range(n) if i % 2 == 0)
        odd = cong_sl.join_all(theta[(xs[i], xs[i + 1])] for i in range(n) if i % 2 == 1)
        found = False
        for mid in product(universe, repeat=n - 1):
            ys = (xs[0],) + mid + (xs[n],)
            ok = True
            for k in range(n):
                bound = even if k % 2 == 1 else odd
                if not cong_sl.leq(theta[(ys[k], ys[k + 1])], bound):
                    ok = False
                    break
            if ok:
                found = True
                break
        if not found:
            return False, xs
    return True, None


def is_n_permutable(algebra, n, elementwise_limit=2_000_000, conc_bound=160):
    """Congruence n-permutability, by relational composition of congruence pairs.

    The element-wise chain characterization is run as well whenever the
    instance fits under elementwise_limit, and the two answers are asserted
    to agree. Returns (bool, witness) where the witness is a violating
    congruence pair or tuple.
    """
    _require_total(algebra)
    if n < 2:
        raise ValueError("n must be at least 2")
    congruences = con_lattice(algebra, conc_bound)
    ok_rel, wit_rel = _relational_n_permutable(algebra, n, congruences)
    size = len(algebra.universe)
    cost = size ** (n + 1) * max(1, size ** (n - 1))
    if cost <= elementwise_limit:
        cs = ConcSemilattice(algebra, congruences)
        ok_el, wit_el = _elementwise_n_permutable(algebra, n, cs)
        assert ok_rel == ok_el, "n-permutability characterizations disagree"
    return (ok_rel, wit_rel)


@dataclass
class MalcevWitness:
    """Term chain certifying a principal-congruence containment.

    Terms are over 2m + len(params) variables: slots 0..m-1 take the left
    generator entries, m..2m-1 the right ones, the rest the parameters.
    """

    n: int
    params: tuple
    terms: tuple
    m: int

    def _env(self, xs, ys):
        return tuple(xs) + tuple(ys) + tuple(self.params)

    def validate(self, algebra, x, y, xs, ys):
        from .palg import UNDEFINED

        fwd = self._env(xs, ys)
        rev = self._env(ys, xs)
        first = self.terms[0].eval(algebra, fwd)
        last = self.terms[-1].eval(algebra, fwd)
        if first is UNDEFINED or first != x:
            return False
        if last is UNDEFINED or last != y:
            return False
        for j in range(self.n):
            a = self.terms[j].eval(algebra, rev)
            b = self.terms[j + 1].eval(algebra, fwd)
            if a is UNDEFINED or b is UNDEFINED or a != b:
                return False
        return True


@dataclass
class NoContainment:
    """The relational containment Theta(x,y) <= join Theta(xi,yi) fails."""

    theta: Congruence


@dataclass
class UnknownAtBound:
    """Containment holds but no witness surfaced within the stated bounds."""

    bounds: dict


def _translations(algebra, depth_bound):
    """Unary polynomial maps up to the given composition depth.

    Returns {value-tuple: parent}, parent being None for the identity or
    (name, pos, params, inner-tuple) for one basic translation applied on
    top of an already-found map.
    """
    universe = algebra.universe
    ident = tuple(universe)
    parents = {ident: None}
    frontier = [ident]
    depth = 0
    while frontier and depth < depth_bound:
        depth += 1
        new = []
        for f in frontier:
            fmap = dict(zip(universe, f))
            for name, ar in algebra.stype.symbols:
                if ar == 0:
                    continue
                table = algebra.ops[name]
                for pos in range(ar):
                    for params in product(universe, repeat=ar - 1):
                        g = tuple(
                            table[params[:pos] + (fmap[x],) + params[pos:]]
                            for x in universe
                        )
                        if g not in parents:
                            parents[g] = (name, pos, params, f)
                            new.append(g)
        frontier = new
    return parents


def malcev_witness(algebra, x, y, xs, ys, depth_bound=3, param_bound=16):
    """Search for the term chain behind Theta(x,y) <= join of Theta(xi,yi).

    First decides the containment relationally; then hunts for a chain of
    unary-polynomial translation steps between x and y, each step moving
    along one generator pair, and packages it into the multi-variable term
    format with fresh parameter slots. Sound by construction: a returned
    witness always validates. Inconclusive searches report bounds.
    """
    _require_total(algebra)
    xs, ys = tuple(xs), tuple(ys)
    if len(xs) != len(ys):
        raise ValueError("generator tuples must have equal length")
    m = len(xs)
    theta = congruence_closure(algebra, list(zip(xs, ys)))
    if not theta.same(x, y):
        return NoContainment(theta)

    if x == y:
        # degenerate chain: one constant term pinned to x by a parameter
        t = Term.v(2 * m)
        return MalcevWitness(1, (x,), (t, t), m)

    universe = algebra.universe
    trans = _translations(algebra, depth_bound)
    edges = {}
    for f in trans:
        fmap = dict(zip(universe, f))
        for i in range(m):
            a, b = fmap[xs[i]], fmap[ys[i]]
            if a != b:
                edges.setdefault(a, []).append((b, i, False, f))
                edges.setdefault(b, []).append((a, i, True, f))
    from collections import deque

    prev = {x: None}
    queue = deque([x])
    while queue:
        u = queue.popleft()
        if u == y:
            break
        for (v, i, swapped, f) in sorted(edges.get(u, []), key=repr):
            if v not in prev:
                prev[v] = (u, i, swapped, f)
                queue.append(v)
    if y not in prev:
        return UnknownAtBound({"depth_bound": depth_bound, "param_bound": param_bound})

    steps = []
    node = y
    while prev[node] is not None:
        u, i, swapped, f = prev[node]
        steps.append((u, node, i, swapped, f))
        node = u
    steps.reverse()

    # package: term j evaluates to u_j forward and u_{j+1} under swapped blocks
    params = []
    slot_of = {}

    def param_slot(c):
        if c not in slot_of:
            slot_of[c] = 2 * m + len(params)
            params.append(c)
        return slot_of[c]

    def translation_term(f, argument):
        """Rebuild f as a term applied to `argument`, via the BFS parent chain."""
        parent = trans[f]
        if parent is None:
            return argument
        name, pos, ps, inner_f = parent
        inner = translation_term(inner_f, argument)
        args = [Term.v(param_slot(c)) for c in ps]
        args.insert(pos, inner)
        return Term.app(name, *args)

    terms = []
    for (u, v, i, swapped, f) in steps:
        base = Term.v(m + i) if swapped else Term.v(i)
        terms.append(translation_term(f, base))
    terms.append(Term.v(param_slot(y)))
    if len(params) > param_bound:
        return UnknownAtBound({"depth_bound": depth_bound, "param_bound": param_bound})
    witness = MalcevWitness(len(steps), tuple(params), tuple(terms), m)
    assert witness.validate(algebra, x, y, xs, ys), "constructed witness must validate"
    return witness
