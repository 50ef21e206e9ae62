"""Finite partial algebras: term evaluation with definedness, subalgebra
calculus, identity satisfaction, images, and stabilizing chain colimits."""

from dataclasses import dataclass
from itertools import product

from .errors import ArityMismatch, NotComposable, NotSubset


class _Undefined:
    def __repr__(self):
        return "UNDEFINED"

    def __bool__(self):
        return False


UNDEFINED = _Undefined()


@dataclass(frozen=True)
class SimilarityType:
    """Finite list of operation symbols with arities."""

    symbols: tuple

    def __post_init__(self):
        names = [n for n, _ in self.symbols]
        if len(set(names)) != len(names):
            raise ValueError("duplicate symbol names")

    def arity(self, name):
        for n, a in self.symbols:
            if n == name:
                return a
        raise KeyError(name)

    @property
    def names(self):
        return tuple(n for n, _ in self.symbols)


LATTICE_TYPE = SimilarityType((("meet", 2), ("join", 2)))


class PartialAlgebra:
    """A finite universe with per-symbol definedness sets and partial tables.

    ops maps a symbol name to {input tuple: value}; the definedness set of a
    symbol is exactly the key set of its table. Structures compare by
    structural equality on (type, universe-as-set, tables), which is what the
    image/preimage laws are stated in terms of.
    """

    def __init__(self, stype, universe, ops, validate=True):
        self.stype = stype
        self.universe = tuple(universe)
        self.ops = {name: dict(table) for name, table in ops.items()}
        for name, _ in stype.symbols:
            self.ops.setdefault(name, {})
        self._uset = frozenset(self.universe)
        if validate:
            self.validate()

    def validate(self):
        if len(self._uset) != len(self.universe):
            raise ValueError("duplicate universe elements")
        for name, table in self.ops.items():
            ar = self.stype.arity(name)
            for args, val in table.items():
                if len(args) != ar:
                    raise ValueError(f"{name}: arity mismatch at {args}")
                if not set(args) <= self._uset or val not in self._uset:
                    raise ValueError(f"{name}: entry {args}->{val} leaves the universe")

    def defined(self, name):
        return self.ops[name].keys()

    def apply(self, name, args):
        return self.ops[name].get(tuple(args), UNDEFINED)

    def is_total(self):
        n = len(self.universe)
        return all(len(self.ops[name]) == n ** self.stype.arity(name) for name, _ in self.stype.symbols)

    def __contains__(self, x):
        return x in self._uset

    def __len__(self):
        return len(self.universe)

    def __eq__(self, other):
        return (
            isinstance(other, PartialAlgebra)
            and self.stype == other.stype
            and self._uset == other._uset
            and self.ops == other.ops
        )

    def __hash__(self):
        return hash((self.stype, self._uset, tuple(sorted((n, len(t)) for n, t in self.ops.items()))))

    def __repr__(self):
        kind = "total" if self.is_total() else "partial"
        return f"PartialAlgebra({len(self.universe)} elements, {kind})"

    def is_partial_sub_of(self, other):
        """Definedness contained and tables agreeing."""
        if not self._uset <= other._uset or self.stype != other.stype:
            return False
        for name, table in self.ops.items():
            for args, val in table.items():
                if other.ops[name].get(args) != val:
                    return False
        return True

    def restrict_full(self, subset):
        """Induced full partial subalgebra on a subset of the universe."""
        subset = frozenset(subset)
        if not subset <= self._uset:
            raise NotSubset("subset leaves the universe")
        ops = {}
        for name, table in self.ops.items():
            ops[name] = {
                args: val
                for args, val in table.items()
                if set(args) <= subset and val in subset
            }
        order = [x for x in self.universe if x in subset]
        return PartialAlgebra(self.stype, order, ops, validate=False)

    @classmethod
    def total_from_fn(cls, stype, universe, fns):
        universe = list(universe)
        ops = {}
        for name, ar in stype.symbols:
            ops[name] = {args: fns[name](*args) for args in product(universe, repeat=ar)}
        return cls(stype, universe, ops, validate=False)

    @classmethod
    def product(cls, algebras):
        """Direct product of total algebras of one similarity type."""
        algebras = list(algebras)
        stype = algebras[0].stype
        universe = list(product(*(a.universe for a in algebras)))
        ops = {}
        for name, ar in stype.symbols:
            table = {}
            for args in product(universe, repeat=ar):
                val = tuple(
                    a.ops[name][tuple(arg[i] for arg in args)] for i, a in enumerate(algebras)
                )
                if UNDEFINED in val:
                    continue
                table[args] = val
            ops[name] = table
        return cls(stype, universe, ops, validate=False)


class Term:
    """Term tree over numbered variables; evaluation propagates definedness."""

    __slots__ = ("kind", "var", "name", "args")

    def __init__(self, kind, var=None, name=None, args=()):
        self.kind = kind
        self.var = var
        self.name = name
        self.args = tuple(args)

    @classmethod
    def v(cls, i):
        return cls("var", var=i)

    @classmethod
    def app(cls, name, *args):
        return cls("app", name=name, args=args)

    def nvars(self):
        if self.kind == "var":
            return self.var + 1
        return max((a.nvars() for a in self.args), default=0)

    def eval(self, algebra, env):
        if self.kind == "var":
            return env[self.var]
        vals = []
        for a in self.args:
            v = a.eval(algebra, env)
            if v is UNDEFINED:
                return UNDEFINED
            vals.append(v)
        return algebra.apply(self.name, vals)

    def __eq__(self, other):
        return (
            isinstance(other, Term)
            and self.kind == other.kind
            and self.var == other.var
            and self.name == other.name
            and self.args == other.args
        )

    def __hash__(self):
        return hash((self.kind, self.var, self.name, self.args))

    def __repr__(self):
        if self.kind == "var":
            return f"v{self.var}"
        return f"{self.name}({', '.join(map(repr, self.args))})"


def meet(a, b):
    return Term.app("meet", a, b)


def join(a, b):
    return Term.app("join", a, b)


LATTICE_IDENTITIES = [
    ("meet-idempotent", meet(Term.v(0), Term.v(0)), Term.v(0)),
    ("join-idempotent", join(Term.v(0), Term.v(0)), Term.v(0)),
    ("meet-commutative", meet(Term.v(0), Term.v(1)), meet(Term.v(1), Term.v(0))),
    ("join-commutative", join(Term.v(0), Term.v(1)), join(Term.v(1), Term.v(0))),
    ("meet-associative", meet(meet(Term.v(0), Term.v(1)), Term.v(2)), meet(Term.v(0), meet(Term.v(1), Term.v(2)))),
    ("join-associative", join(join(Term.v(0), Term.v(1)), Term.v(2)), join(Term.v(0), join(Term.v(1), Term.v(2)))),
    ("meet-absorption", meet(Term.v(0), join(Term.v(0), Term.v(1))), Term.v(0)),
    ("join-absorption", join(Term.v(0), meet(Term.v(0), Term.v(1))), Term.v(0)),
]

MODULAR_LAW = (
    meet(Term.v(0), join(Term.v(1), meet(Term.v(0), Term.v(2)))),
    join(meet(Term.v(0), Term.v(1)), meet(Term.v(0), Term.v(2))),
)


def eval_term(algebra, term, args):
    if len(args) < term.nvars():
        raise ArityMismatch(f"term needs {term.nvars()} variables, got {len(args)}")
    return term.eval(algebra, tuple(args))


def def_set(algebra, term, nvars=None):
    """All tuples on which the term evaluates; exponential in nvars."""
    n = term.nvars() if nvars is None else nvars
    out = set()
    for args in product(algebra.universe, repeat=n):
        if term.eval(algebra, args) is not UNDEFINED:
            out.add(args)
    return out


class PalgMorphism:
    """Total map preserving every defined operation."""

    def __init__(self, source, target, mapping, validate=True):
        self.source = source
        self.target = target
        self.mapping = dict(mapping)
        if validate:
            self.validate()

    def validate(self):
        if self.source.stype != self.target.stype:
            raise ValueError("similarity types differ")
        for x in self.source.universe:
            if self.mapping.get(x) not in self.target:
                raise ValueError(f"map not into target at {x!r}")
        for name, table in self.source.ops.items():
            for args, val in table.items():
                im = tuple(self.mapping[a] for a in args)
                tv = self.target.ops[name].get(im, UNDEFINED)
                if tv is UNDEFINED:
                    raise ValueError(f"{name}{args} defined in source but image undefined")
                if tv != self.mapping[val]:
                    raise ValueError(f"{name}{args} not preserved")

    def __call__(self, x):
        return self.mapping[x]

    def apply_tuple(self, args):
        return tuple(self.mapping[a] for a in args)

    def is_injective(self):
        vals = [self.mapping[x] for x in self.source.universe]
        return len(set(vals)) == len(vals)

    def is_surjective(self):
        return {self.mapping[x] for x in self.source.universe} == set(self.target.universe)

    def after(self, other):
        if other.target != self.source:
            raise NotComposable("morphisms not composable")
        return PalgMorphism(
            other.source, self.target,
            {x: self.mapping[other.mapping[x]] for x in other.source.universe},
            validate=False,
        )

    def __eq__(self, other):
        return (
            isinstance(other, PalgMorphism)
            and self.source == other.source
            and self.target == other.target
            and self.mapping == other.mapping
        )

    def __repr__(self):
        return f"PalgMorphism({len(self.source)}->{len(self.target)})"

    @classmethod
    def identity(cls, algebra):
        return cls(algebra, algebra, {x: x for x in algebra.universe}, validate=False)


def is_full_sub(sub, algebra):
    """Full partial subalgebra: defined exactly when the ambient value stays inside."""
    if not sub._uset <= algebra._uset:
        raise NotSubset("not a subset")
    if not sub.is_partial_sub_of(algebra):
        return False
    for name, _ in algebra.stype.symbols:
        want = {
            args
            for args, val in algebra.ops[name].items()
            if set(args) <= sub._uset and val in sub._uset
        }
        if set(sub.ops[name].keys()) != want:
            return False
    return True


def is_strong_sub(sub, algebra):
    """Strong partial subalgebra: every tuple over the subset is defined in the ambient."""
    if not sub._uset <= algebra._uset:
        raise NotSubset("not a subset")
    if not sub.is_partial_sub_of(algebra):
        return False
    for name, ar in algebra.stype.symbols:
        for args in product(sorted(sub._uset, key=repr), repeat=ar):
            if args not in algebra.ops[name]:
                return False
    return True


def is_strong_morphism(f):
    """Image tuples all defined in the target."""
    img = sorted({f(x) for x in f.source.universe}, key=repr)
    for name, ar in f.target.stype.symbols:
        for args in product(img, repeat=ar):
            if args not in f.target.ops[name]:
                return False
    return True


def generation_stages(algebra, gens, max_stage):
    """Stages <X>^0, <X>^1, ... as full partial subalgebras; reports the fixpoint.

    Stage 0 is the generators plus any defined constants; each later stage
    adds every defined value on tuples from the previous stage.
    """
    current = set(gens)
    for name, ar in algebra.stype.symbols:
        if ar == 0 and () in algebra.ops[name]:
            current.add(algebra.ops[name][()])
    stages = [algebra.restrict_full(current)]
    stabilized_at = None
    for n in range(1, max_stage + 1):
        nxt = set(current)
        for name, table in algebra.ops.items():
            for args, val in table.items():
                if set(args) <= current:
                    nxt.add(val)
        stages.append(algebra.restrict_full(nxt))
        if nxt == current and stabilized_at is None:
            stabilized_at = n - 1
        current = nxt
    return stages, stabilized_at


def generated_sub(algebra, gens, stage):
    """The full partial subalgebra on <gens>^stage."""
    stages, _ = generation_stages(algebra, gens, stage)
    return stages[stage]


def image_palg(f, sub=None):
    """Image of a partial subalgebra: defined exactly on images of defined tuples."""
    if sub is None:
        sub = f.source
    if not sub.is_partial_sub_of(f.source):
        raise NotSubset("sub is not a partial subalgebra of the source")
    universe = []
    seen = set()
    for x in sub.universe:
        v = f(x)
        if v not in seen:
            seen.add(v)
            universe.append(v)
    ops = {}
    for name, table in sub.ops.items():
        t = {}
        for args, val in table.items():
            t[f.apply_tuple(args)] = f(val)
        ops[name] = t
    return PartialAlgebra(f.source.stype, universe, ops, validate=False)


def preimage_palg(f, sub):
    """Preimage of a partial subalgebra of the target.

    Defined on tuples that are defined in the source and whose image tuple is
    defined in sub; the value then automatically lands in the preimage. This
    is the reading under which f^{-1}(f(A)) = A holds.
    """
    if not sub.is_partial_sub_of(f.target):
        raise NotSubset("sub is not a partial subalgebra of the target")
    universe = [x for x in f.source.universe if f(x) in sub]
    uset = set(universe)
    ops = {}
    for name, table in f.source.ops.items():
        t = {}
        for args, val in table.items():
            if set(args) <= uset and f.apply_tuple(args) in sub.ops[name]:
                t[args] = val
        ops[name] = t
    return PartialAlgebra(f.source.stype, universe, ops, validate=False)


def satisfies_identity(algebra, t1, t2):
    """True iff t1 and t2 agree wherever both are defined; else a counterexample tuple."""
    n = max(t1.nvars(), t2.nvars())
    for args in product(algebra.universe, repeat=n):
        v1 = t1.eval(algebra, args)
        if v1 is UNDEFINED:
            continue
        v2 = t2.eval(algebra, args)
        if v2 is UNDEFINED:
            continue
        if v1 != v2:
            return False, args
    return True, None


def is_lattice_algebra(algebra):
    """Total algebra in the lattice signature satisfying all lattice identities."""
    if set(algebra.stype.names) != {"meet", "join"}:
        return False
    if not algebra.is_total():
        return False
    return all(satisfies_identity(algebra, t1, t2)[0] for _, t1, t2 in LATTICE_IDENTITIES)


def is_palg_isomorphism(f):
    """Bijective morphism that also reflects definedness."""
    if not (f.is_injective() and f.is_surjective()):
        return False
    inv = {f(x): x for x in f.source.universe}
    for name, table in f.target.ops.items():
        for args in table:
            pre = tuple(inv[a] for a in args)
            if pre not in f.source.ops[name]:
                return False
    return True


@dataclass
class ChainColimit:
    obj: PartialAlgebra
    cocone: list
    stabilized: bool


def chain_colimit(morphisms, window=1):
    """Colimit of a finite chain A0 -> A1 -> ... -> Am with stabilization report.

    For a finite prefix the colimit is the final object with the pushed
    structure (every defined tuple of an earlier stage pushes into a defined
    tuple of the last). The last `window` links count as stable when they are
    isomorphisms of partial algebras; when they are moreover strong, the
    colimit of the simulated endless chain is total, which is asserted.
    """
    morphisms = list(morphisms)
    if not morphisms:
        raise NotComposable("empty chain")
    for f, g in zip(morphisms, morphisms[1:]):
        if f.target != g.source:
            raise NotComposable("chain does not compose")
    top = morphisms[-1].target
    cocone = []
    acc = PalgMorphism.identity(top)
    for f in reversed(morphisms):
        acc = acc.after(f)
        cocone.append(acc)
    cocone.reverse()
    cocone.append(PalgMorphism.identity(top))
    tail = morphisms[-window:] if window > 0 else []
    stabilized = all(is_palg_isomorphism(f) for f in tail)
    if stabilized and tail and all(is_strong_morphism(f) for f in tail):
        assert top.is_total(), "stable strong tail must yield a total colimit"
    return ChainColimit(top, cocone, stabilized)


def product_closure(algebra, pairs):
    """Pairs of simultaneous term evaluations under two substitutions.

    Closure of the given pairs, their swaps, and the diagonal inside the
    square of the algebra, applying an operation only when both component
    tuples are defined. Each closure element is exactly (t(sigma), t(sigma'))
    for one term t with parameters, so reachability along these pairs decides
    term-chain existence with definedness. Parent pointers are kept so a
    witness term can be rebuilt.
    """
    parents = {}
    for x in algebra.universe:
        parents.setdefault((x, x), ("param", x))
    for i, (a, b) in enumerate(pairs):
        parents.setdefault((a, b), ("gen", i, False))
        parents.setdefault((b, a), ("gen", i, True))
    members = set(parents.keys())
    fresh = set(members)
    while fresh:
        new = set()
        for name, ar in algebra.stype.symbols:
            if ar == 0:
                continue
            table = algebra.ops[name]
            # semi-naive: only tuples touching a fresh pair can yield new pairs
            fresh_l = sorted(fresh, key=repr)
            members_l = sorted(members, key=repr)
            if ar == 2:
                old = sorted(members - fresh, key=repr)
                candidate_args = [(a, b) for a in fresh_l for b in members_l]
                candidate_args += [(a, b) for a in old for b in fresh_l]
            else:
                candidate_args = [
                    args
                    for args in product(members_l, repeat=ar)
                    if any(a in fresh for a in args)
                ]
            for args in candidate_args:
                left = tuple(p[0] for p in args)
                right = tuple(p[1] for p in args)
                lv = table.get(left, UNDEFINED)
                if lv is UNDEFINED:
                    continue
                rv = table.get(right, UNDEFINED)
                if rv is UNDEFINED:
                    continue
                pair = (lv, rv)
                if pair not in members:
                    members.add(pair)
                    parents[pair] = ("op", name, args)
                    new.add(pair)
        fresh = new
    return parents


def rebuild_term(parents, pair, npairs):
    """Reconstruct a witness term for a closure pair.

    Variables 0..m-1 stand for the left generator entries, m..2m-1 for the
    right ones; parameters get fresh slots past 2m, returned as a list in
    slot order. Evaluating the term at (left gens, right gens, params) gives
    pair[0] and at the blocks swapped gives pair[1].
    """
    params = []
    slot_of = {}

    def build(p):
        tag = parents[p]
        if tag[0] == "param":
            c = tag[1]
            if c not in slot_of:
                slot_of[c] = 2 * npairs + len(params)
                params.append(c)
            return Term.v(slot_of[c])
        if tag[0] == "gen":
            _, i, swapped = tag
            return Term.v(npairs + i if swapped else i)
        _, name, args = tag
        return Term.app(name, *(build(a) for a in args))

    return build(pair), params


def term_chain_search(algebra, x, y, pairs):
    """Chain x = v0, ..., vn = y where consecutive values are joint term evaluations.

    Returns the list of closure pairs along a shortest path, or None. This
    decides exactly whether a term chain in the sense of the congruence
    witness format exists in a partial algebra.
    """
    closure = product_closure(algebra, pairs)
    adj = {}
    for (a, b) in closure:
        adj.setdefault(a, set()).add(b)
    if x == y:
        return []
    from collections import deque

    prev = {x: None}
    queue = deque([x])
    while queue:
        u = queue.popleft()
        for v in sorted(adj.get(u, ()), key=repr):
            if v not in prev:
                prev[v] = u
                if v == y:
                    path = [v]
                    while prev[path[-1]] is not None:
                        path.append(prev[path[-1]])
                    path.reverse()
                    return [(path[i], path[i + 1]) for i in range(len(path) - 1)]
                queue.append(v)
    return None
