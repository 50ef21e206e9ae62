"""Finite join-semilattices with zero: ideals, quotients, ideal-induced maps."""

from dataclasses import dataclass

from .errors import InvalidIdeal, IdealNotMapped, NotGenerated, NotIdealInduced
from .util import sort_key, sorted_elements


class JoinSemilattice:
    """A finite join-semilattice with zero.

    Elements are opaque hashable ids; the order is derived from the join
    table (x <= y iff x v y == y), which is the single source of truth.
    """

    def __init__(self, elements, zero, join_table, validate=True):
        self.elements = tuple(elements)
        self.zero = zero
        self._join = dict(join_table)
        self._index = {x: i for i, x in enumerate(self.elements)}
        if validate:
            self.validate()

    def validate(self):
        els = self.elements
        if len(set(els)) != len(els):
            raise ValueError("duplicate elements")
        if self.zero not in self._index:
            raise ValueError("zero not an element")
        for x in els:
            for y in els:
                v = self._join.get((x, y))
                if v is None or v not in self._index:
                    raise ValueError(f"join table not total at {(x, y)}")
        for x in els:
            if self._join[(self.zero, x)] != x:
                raise ValueError(f"zero not neutral at {x}")
            if self._join[(x, x)] != x:
                raise ValueError(f"join not idempotent at {x}")
            for y in els:
                if self._join[(x, y)] != self._join[(y, x)]:
                    raise ValueError(f"join not commutative at {(x, y)}")
                for z in els:
                    if self._join[(self._join[(x, y)], z)] != self._join[(x, self._join[(y, z)])]:
                        raise ValueError(f"join not associative at {(x, y, z)}")

    def join(self, x, y):
        return self._join[(x, y)]

    def join_all(self, xs):
        v = self.zero
        for x in xs:
            v = self._join[(v, x)]
        return v

    def leq(self, x, y):
        return self._join[(x, y)] == y

    def index(self, x):
        return self._index[x]

    def __contains__(self, x):
        return x in self._index

    def __len__(self):
        return len(self.elements)

    def __eq__(self, other):
        return (
            isinstance(other, JoinSemilattice)
            and set(self.elements) == set(other.elements)
            and self.zero == other.zero
            and self._join == other._join
        )

    def __hash__(self):
        return hash((frozenset(self.elements), self.zero))

    def __repr__(self):
        return f"JoinSemilattice({len(self.elements)} elements)"

    def join_closure(self, subset):
        """Smallest join-closed subset containing `subset` and zero."""
        closed = {self.zero} | set(subset)
        frontier = list(closed)
        while frontier:
            x = frontier.pop()
            for y in list(closed):
                v = self._join[(x, y)]
                if v not in closed:
                    closed.add(v)
                    frontier.append(v)
        return frozenset(closed)

    def sub(self, subset):
        """Join-subsemilattice on a join-closed subset containing zero."""
        subset = set(subset)
        if self.zero not in subset:
            raise ValueError("subsemilattice must contain zero")
        table = {}
        for x in subset:
            for y in subset:
                v = self._join[(x, y)]
                if v not in subset:
                    raise ValueError(f"subset not join-closed at {(x, y)}")
                table[(x, y)] = v
        order = [x for x in self.elements if x in subset]
        return JoinSemilattice(order, self.zero, table, validate=False)

    @classmethod
    def chain(cls, k):
        """Chain 0 < 1 < ... < k-1 as a join-semilattice."""
        els = list(range(k))
        table = {(x, y): max(x, y) for x in els for y in els}
        return cls(els, 0, table, validate=False)

    @classmethod
    def from_leq(cls, elements, leq_pairs):
        """Build from an order relation that happens to have all finite joins."""
        elements = list(elements)
        leq = {(x, y) for x, y in leq_pairs} | {(x, x) for x in elements}
        table = {}
        for x in elements:
            for y in elements:
                ub = [z for z in elements if (x, z) in leq and (y, z) in leq]
                least = [z for z in ub if all((z, w) in leq for w in ub)]
                if len(least) != 1:
                    raise ValueError(f"no join for {(x, y)}")
                table[(x, y)] = least[0]
        zero = [x for x in elements if all((x, y) in leq for y in elements)]
        if len(zero) != 1:
            raise ValueError("no least element")
        return cls(elements, zero[0], table, validate=False)

    @classmethod
    def product(cls, s, t):
        els = [(x, y) for x in s.elements for y in t.elements]
        table = {
            ((x1, y1), (x2, y2)): (s.join(x1, x2), t.join(y1, y2))
            for (x1, y1) in els
            for (x2, y2) in els
        }
        return cls(els, (s.zero, t.zero), table, validate=False)


class SemIdeal:
    """Downward-closed, join-closed, zero-containing subset of a semilattice."""

    def __init__(self, sem, carrier, validate=True):
        self.sem = sem
        self.carrier = frozenset(carrier)
        if validate:
            self.validate()

    def validate(self):
        sem = self.sem
        if sem.zero not in self.carrier:
            raise InvalidIdeal("ideal must contain zero")
        for x in self.carrier:
            if x not in sem:
                raise InvalidIdeal(f"{x!r} not an element")
            for y in self.carrier:
                if sem.join(x, y) not in self.carrier:
                    raise InvalidIdeal(f"not join-closed at {(x, y)}")
        for x in sem.elements:
            for y in self.carrier:
                if sem.leq(x, y) and x not in self.carrier:
                    raise InvalidIdeal(f"not downward closed at {x} <= {y}")

    def __contains__(self, x):
        return x in self.carrier

    def __eq__(self, other):
        return isinstance(other, SemIdeal) and self.carrier == other.carrier and self.sem == other.sem

    def __hash__(self):
        return hash(self.carrier)

    def __repr__(self):
        return f"SemIdeal({sorted_elements(self.carrier)!r})"

    @classmethod
    def generated(cls, sem, gens):
        """Least ideal containing `gens`: downset of the join-closure."""
        closed = sem.join_closure(gens)
        down = {x for x in sem.elements if any(sem.leq(x, y) for y in closed)}
        return cls(sem, down, validate=False)

    @classmethod
    def zero(cls, sem):
        return cls(sem, {sem.zero}, validate=False)


class SemMorphism:
    """Join- and zero-preserving map between finite join-semilattices."""

    def __init__(self, source, target, mapping, validate=True):
        self.source = source
        self.target = target
        self.mapping = dict(mapping)
        if validate:
            self.validate()

    def validate(self):
        s, t, m = self.source, self.target, self.mapping
        for x in s.elements:
            if x not in m or m[x] not in t:
                raise ValueError(f"map not total at {x!r}")
        if m[s.zero] != t.zero:
            raise ValueError("zero not preserved")
        for x in s.elements:
            for y in s.elements:
                if m[s.join(x, y)] != t.join(m[x], m[y]):
                    raise ValueError(f"join not preserved at {(x, y)}")

    def __call__(self, x):
        return self.mapping[x]

    def apply_set(self, xs):
        return {self.mapping[x] for x in xs}

    def is_surjective(self):
        return set(self.mapping.values()) >= set(self.target.elements)

    def is_injective(self):
        vals = list(self.mapping[x] for x in self.source.elements)
        return len(set(vals)) == len(vals)

    def after(self, other):
        """Composition self o other."""
        if other.target != self.source:
            raise ValueError("morphisms not composable")
        return SemMorphism(
            other.source, self.target,
            {x: self.mapping[other.mapping[x]] for x in other.source.elements},
            validate=False,
        )

    def __eq__(self, other):
        return (
            isinstance(other, SemMorphism)
            and self.source == other.source
            and self.target == other.target
            and self.mapping == other.mapping
        )

    def __hash__(self):
        return hash(frozenset(self.mapping.items()))

    def __repr__(self):
        return f"SemMorphism({len(self.source)}->{len(self.target)})"

    @classmethod
    def identity(cls, sem):
        return cls(sem, sem, {x: x for x in sem.elements}, validate=False)

    def restrict(self, sub):
        """Restriction to a join-subsemilattice of the source."""
        return SemMorphism(sub, self.target, {x: self.mapping[x] for x in sub.elements}, validate=False)


def ker0(phi):
    """0-kernel of a morphism: the ideal of elements mapped to zero."""
    carrier = {x for x in phi.source.elements if phi(x) == phi.target.zero}
    return SemIdeal(phi.source, carrier, validate=False)


@dataclass(frozen=True)
class Refusal:
    """Witness that the join-implication transfer fails: f(x) <= vf(ys) but not g(x) <= vg(ys).

    direction is "forward" for the defining implication, "converse" for the
    extra implication checked when an isomorphism was requested.
    """

    x: object
    ys: tuple
    direction: str = "forward"


def _implication_violation(s, t, f, g, xs):
    """First (x, ys) with f(x) <= join f(ys) in s but g(x) !<= join g(ys) in t.

    Arbitrary tuples reduce to finite subsets, and a subset only matters
    through the pair (join f(Y), join g(Y)); these pairs form the
    subsemilattice of s x t generated by the (f, g)-images, which is closed
    incrementally with one witness subset per pair. The empty subset covers
    the f(x) = 0 instances needed for zero preservation.
    """
    xs = sorted_elements(xs)
    pairs = {(s.zero, t.zero): ()}
    frontier = [(s.zero, t.zero)]
    while frontier:
        a, b = frontier.pop()
        ys = pairs[(a, b)]
        for y in xs:
            na, nb = s.join(a, f[y]), t.join(b, g[y])
            if (na, nb) not in pairs:
                pairs[(na, nb)] = ys + (y,)
                frontier.append((na, nb))
    for x in xs:
        for (a, b) in sorted(pairs, key=sort_key):
            if s.leq(f[x], a) and not t.leq(g[x], b):
                return x, pairs[(a, b)]
    return None


def hom_from_generators(s, t, f, g, iso=False):
    """Unique morphism phi: s -> t with phi(f(x)) = g(x), if the transfer holds.

    f, g are dicts on a common generator index set X. Requires f(X) to
    join-generate s. Returns the morphism, or a Refusal carrying a violating
    (x, ys) instance. With iso=True also demands the converse implication and
    that g(X) join-generates t, and then the result is an isomorphism.
    """
    xs = sorted_elements(f.keys())
    if set(g.keys()) != set(xs):
        raise ValueError("f and g must share their index set")
    if s.join_closure(f[x] for x in xs) != frozenset(s.elements):
        raise NotGenerated("f(X) does not join-generate the source")
    bad = _implication_violation(s, t, f, g, xs)
    if bad is not None:
        return Refusal(bad[0], bad[1], "forward")
    if iso:
        bad = _implication_violation(t, s, g, f, xs)
        if bad is not None:
            return Refusal(bad[0], bad[1], "converse")
        if t.join_closure(g[x] for x in xs) != frozenset(t.elements):
            raise NotGenerated("g(X) does not join-generate the target")
    mapping = {}
    for a in s.elements:
        # a is a join of generators; any generating subset gives the same image.
        gens = [x for x in xs if s.leq(f[x], a)]
        if s.join_all(f[x] for x in gens) != a:
            raise NotGenerated(f"{a!r} is not a join of generators")
        mapping[a] = t.join_all(g[x] for x in gens)
    return SemMorphism(s, t, mapping)


def quotient(sem, ideal):
    """Quotient by the congruence x ~ y iff x v u = y v u for some u in the ideal.

    Classes are labeled by their first member in element order. Returns the
    quotient semilattice and the canonical projection, whose 0-kernel is the
    ideal.
    """
    if not isinstance(ideal, SemIdeal) or ideal.sem != sem:
        ideal = SemIdeal(sem, ideal.carrier if isinstance(ideal, SemIdeal) else ideal)
    ideal.validate()

    def related(x, y):
        return any(sem.join(x, u) == sem.join(y, u) for u in ideal.carrier)

    reps = {}
    for x in sem.elements:
        for r in reps.values():
            if related(x, r):
                reps[x] = r
                break
        else:
            reps[x] = x
    classes = [x for x in sem.elements if reps[x] == x]
    table = {(a, b): reps[sem.join(a, b)] for a in classes for b in classes}
    q = JoinSemilattice(classes, reps[sem.zero], table, validate=False)
    proj = SemMorphism(sem, q, {x: reps[x] for x in sem.elements}, validate=False)
    return q, proj


def induced_morphism(phi, ideal_i, ideal_j):
    """The map S/I -> T/J sending a/I to phi(a)/J, when phi(I) is inside J."""
    if not phi.apply_set(ideal_i.carrier) <= ideal_j.carrier:
        raise IdealNotMapped("phi(I) is not contained in J")
    qs, ps = quotient(phi.source, ideal_i)
    qt, pt = quotient(phi.target, ideal_j)
    mapping = {}
    for a in phi.source.elements:
        c = ps(a)
        v = pt(phi(a))
        if mapping.setdefault(c, v) != v:
            raise IdealNotMapped(f"induced map not well-defined at class of {a!r}")
    return SemMorphism(qs, qt, mapping)


def is_ideal_induced(phi):
    """Decide whether phi is (up to isomorphism) a quotient projection.

    Runs both the definitional check (surjective, and every identified pair
    has a join-absorbing z with phi(z) = 0) and the quotient-by-0-kernel
    isomorphism criterion, and insists they agree. Returns (bool, witness):
    the witness maps identified pairs to their absorbers on success, or names
    the failure on refusal.
    """
    s, t = phi.source, phi.target
    definitional = True
    witness = {}
    if not phi.is_surjective():
        definitional = False
        witness = ("not surjective", None)
    else:
        kernel = [z for z in s.elements if phi(z) == t.zero]
        for x in s.elements:
            for y in s.elements:
                if sort_key(x) < sort_key(y) and phi(x) == phi(y):
                    for z in kernel:
                        if s.join(x, z) == s.join(y, z):
                            witness[(x, y)] = z
                            break
                    else:
                        definitional = False
                        witness = ("no absorber", (x, y))
                        break
            if not definitional:
                break

    induced = induced_morphism(phi, ker0(phi), SemIdeal.zero(t))
    via_quotient = induced.is_injective() and induced.is_surjective()
    assert definitional == via_quotient, "ideal-induced characterizations disagree"
    return definitional, witness


def restrict_ideal_induced(phi, xs=()):
    """Finite join-subsemilattice S' containing xs with phi|S' ideal-induced.

    Follows the finite-restriction construction: a section Y of phi extended
    by xs, absorbers u_{x,y} for phi-identified pairs of Y, and the join
    closure of their union.
    """
    ok, _ = is_ideal_induced(phi)
    if not ok:
        raise NotIdealInduced("phi is not ideal-induced")
    s, t = phi.source, phi.target
    xs = set(xs)
    if not xs <= set(s.elements):
        raise ValueError("xs must be source elements")
    section = {}
    for v in t.elements:
        section[v] = next(x for x in s.elements if phi(x) == v)
    y_set = s.join_closure(xs | set(section.values()))
    kernel = [z for z in s.elements if phi(z) == t.zero]
    absorbers = set()
    for x in y_set:
        for y in y_set:
            if sort_key(x) < sort_key(y) and phi(x) == phi(y):
                z = next(z for z in kernel if s.join(x, z) == s.join(y, z))
                absorbers.add(z)
    closed = s.join_closure(y_set | absorbers)
    return s.sub(closed)


def enumerate_ideals(sem, bound=None):
    """All ideals of a finite semilattice, in deterministic (size, id) order.

    Standard closure-system enumeration: grow known ideals by one element at
    a time and re-close.
    """
    zero_ideal = frozenset({sem.zero})
    seen = {zero_ideal}
    frontier = [zero_ideal]
    while frontier:
        cur = frontier.pop()
        for x in sem.elements:
            if x in cur:
                continue
            closed = sem.join_closure(cur | {x})
            down = frozenset(y for y in sem.elements if any(sem.leq(y, z) for z in closed))
            if down not in seen:
                seen.add(down)
                frontier.append(down)
                if bound is not None and len(seen) > bound:
                    from .errors import TooManyIdeals

                    raise TooManyIdeals(f"more than {bound} ideals")
    order = sorted(seen, key=lambda c: (len(c), tuple(sorted(sem.index(x) for x in c))))
    return [SemIdeal(sem, c, validate=False) for c in order]
