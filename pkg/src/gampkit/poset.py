"""Finite poset combinatorics: kernels, norm-coverings, sharp ideals, the
lexicographic tree-over-poset construction with its cover law, and a finite
analogue of the free-set combinatorial relation."""

from dataclasses import dataclass
from itertools import product

from .errors import BudgetExceeded, TooLarge
from .util import sort_key, sorted_elements


class FinitePoset:
    """Explicit order relation, validated for the order axioms."""

    def __init__(self, elements, leq_pairs, validate=True):
        self.elements = tuple(elements)
        self._leq = {(x, x) for x in self.elements} | {tuple(p) for p in leq_pairs}
        if validate:
            self.validate()

    def validate(self):
        els = set(self.elements)
        if len(els) != len(self.elements):
            raise ValueError("duplicate elements")
        for (x, y) in self._leq:
            if x not in els or y not in els:
                raise ValueError(f"relation leaves the universe at {(x, y)}")
        for (x, y) in self._leq:
            if (y, x) in self._leq and x != y:
                raise ValueError(f"antisymmetry fails at {(x, y)}")
        for (x, y) in self._leq:
            for z in self.elements:
                if (y, z) in self._leq and (x, z) not in self._leq:
                    raise ValueError(f"transitivity fails at {(x, y, z)}")

    def leq(self, x, y):
        return (x, y) in self._leq

    def lt(self, x, y):
        return x != y and (x, y) in self._leq

    def downset(self, x):
        return frozenset(y for y in self.elements if (y, x) in self._leq)

    def upset(self, x):
        return frozenset(y for y in self.elements if (x, y) in self._leq)

    def least(self):
        for x in self.elements:
            if all((x, y) in self._leq for y in self.elements):
                return x
        return None

    def maximal_elements(self):
        return [x for x in self.elements if not any(self.lt(x, y) for y in self.elements)]

    def covers(self):
        """Cover pairs (u, v): u < v with nothing strictly between."""
        out = []
        for u in self.elements:
            for v in self.elements:
                if self.lt(u, v) and not any(
                    self.lt(u, w) and self.lt(w, v) for w in self.elements
                ):
                    out.append((u, v))
        return out

    def linear_extension(self):
        remaining = list(self.elements)
        out = []
        while remaining:
            nxt = next(
                x for x in remaining if all(not self.lt(y, x) for y in remaining)
            )
            out.append(nxt)
            remaining.remove(nxt)
        return out

    def __len__(self):
        return len(self.elements)

    def __contains__(self, x):
        return (x, x) in self._leq

    def __eq__(self, other):
        return (
            isinstance(other, FinitePoset)
            and set(self.elements) == set(other.elements)
            and self._leq == other._leq
        )

    def __repr__(self):
        return f"FinitePoset({len(self.elements)} elements)"

    @classmethod
    def chain(cls, k):
        return cls(range(k), [(i, j) for i in range(k) for j in range(i, k)], validate=False)

    @classmethod
    def antichain(cls, k):
        return cls(range(k), [], validate=False)

    @classmethod
    def square(cls):
        """The 2x2 lattice as a poset: bottom, two middles, top."""
        els = ["b", "l", "r", "t"]
        leq = [("b", "l"), ("b", "r"), ("b", "t"), ("l", "t"), ("r", "t")]
        return cls(els, leq, validate=False)

    @classmethod
    def from_covers(cls, elements, cover_pairs):
        elements = list(elements)
        leq = {(x, x) for x in elements} | set(map(tuple, cover_pairs))
        changed = True
        while changed:
            changed = False
            for (x, y) in list(leq):
                for (y2, z) in list(leq):
                    if y2 == y and (x, z) not in leq:
                        leq.add((x, z))
                        changed = True
        return cls(elements, leq)


def is_kernel(poset, v_set):
    """Every element has a largest lower bound inside v_set."""
    v_set = set(v_set)
    for u in poset.elements:
        lowers = [v for v in v_set if poset.leq(v, u)]
        if not lowers:
            return False
        if not any(all(poset.leq(w, v) for w in lowers) for v in lowers):
            return False
    return True


def kernel_containing(poset, f_set):
    """A kernel containing f_set, greedily closed then pruned to local minimality.

    Elements whose lower bounds in the current set lack a top are added
    themselves (fixing them and possibly others); the loop terminates because
    the whole poset is always a kernel.
    """
    v = set(f_set)
    if not v <= set(poset.elements):
        raise ValueError("subset leaves the poset")
    while not is_kernel(poset, v):
        for u in poset.linear_extension():
            if u in v:
                continue
            lowers = [w for w in v if poset.leq(w, u)]
            if not lowers or not any(
                all(poset.leq(w2, w) for w2 in lowers) for w in lowers
            ):
                v.add(u)
                break
        else:
            v = set(poset.elements)
    for u in sorted_elements(set(v) - set(f_set)):
        trial = v - {u}
        if is_kernel(poset, trial):
            v = trial
    assert is_kernel(poset, v)
    return frozenset(v)


def is_supported(poset):
    """Every finite subset extends to a kernel.

    For a finite poset the whole poset is a kernel containing any subset, so
    this is always true; the quantified check is still run with that witness.
    """
    whole = frozenset(poset.elements)
    if not is_kernel(poset, whole):
        return False
    # the single witness settles every subset instance at once
    return True


@dataclass
class NormCovering:
    """Supported poset with an isotone boundary map into the base poset."""

    cover: FinitePoset
    base: FinitePoset
    boundary: dict

    def __post_init__(self):
        for u in self.cover.elements:
            if self.boundary.get(u) not in self.base:
                raise ValueError(f"boundary not into the base at {u!r}")
        for u in self.cover.elements:
            for v in self.cover.elements:
                if self.cover.leq(u, v) and not self.base.leq(self.boundary[u], self.boundary[v]):
                    raise ValueError(f"boundary not isotone at {(u, v)}")
        if not is_supported(self.cover):
            raise ValueError("cover poset is not supported")


def poset_ideals(poset, bound=100_000):
    """Nonempty, downward-closed, directed subsets, smallest first."""
    downs = set()
    frontier = []
    for x in poset.elements:
        d = poset.downset(x)
        if d not in downs:
            downs.add(d)
            frontier.append(d)
    while frontier:
        cur = frontier.pop()
        for x in poset.elements:
            if x in cur:
                continue
            nxt = frozenset(cur | poset.downset(x))
            if nxt not in downs:
                downs.add(nxt)
                frontier.append(nxt)
                if len(downs) > bound:
                    raise TooLarge("too many downsets")

    def directed(c):
        return all(
            any(poset.leq(a, z) and poset.leq(b, z) for z in c) for a in c for b in c
        )

    out = [c for c in downs if directed(c)]
    return sorted(out, key=lambda c: (len(c), tuple(sorted(map(sort_key, c)))))


def sharp_ideals(nc, bound=100_000):
    """Ideals of the covering poset whose boundary image has a largest element."""
    out = []
    for ideal in poset_ideals(nc.cover, bound):
        image = {nc.boundary[u] for u in ideal}
        tops = [p for p in image if all(nc.base.leq(q, p) for q in image)]
        if tops:
            out.append((ideal, tops[0]))
    return out


@dataclass(frozen=True)
class KPosetSpec:
    """Base poset with least element, marked subset, branching sets, depth."""

    base: FinitePoset
    marks: tuple
    branch: tuple  # tuple of (mark, tuple-of-branch-labels)
    depth: int

    def branch_of(self, x):
        for m, r in self.branch:
            if m == x:
                return r
        raise KeyError(x)

    def __post_init__(self):
        if self.base.least() is None:
            raise ValueError("base poset must have a least element")
        if not set(self.marks) <= set(self.base.elements):
            raise ValueError("marks must be base elements")
        if {m for m, _ in self.branch} != set(self.marks):
            raise ValueError("branch sets must index the marks")


def _tree_nodes(spec):
    nodes = [(0, (), ())]
    for n in range(1, spec.depth):
        for xs in product(spec.marks, repeat=n):
            for rs in product(*(spec.branch_of(x) for x in xs)):
                nodes.append((n, xs, rs))
    return nodes


def kposet(spec, budget=100_000):
    """The tree-over-base poset: elements (n, xs, rs, p), ordered by tree
    prefix and, across levels, by the base order against the next mark.

    Returns (poset, tree nodes). The exact size law |A| = |T| * |P| is
    asserted.
    """
    tree = _tree_nodes(spec)
    size = len(tree) * len(spec.base)
    if size > budget:
        raise BudgetExceeded(f"kposet would have {size} elements")
    elements = [(n, xs, rs, p) for (n, xs, rs) in tree for p in spec.base.elements]
    assert len(elements) == len(tree) * len(spec.base)

    def tree_leq(a, b):
        (m, xs, rs), (n, ys, ss) = a, b
        return m <= n and xs == ys[:m] and rs == ss[:m]

    leq = []
    for (m, xs, rs, p) in elements:
        for (n, ys, ss, q) in elements:
            if not tree_leq((m, xs, rs), (n, ys, ss)):
                continue
            if m == n:
                if spec.base.leq(p, q):
                    leq.append(((m, xs, rs, p), (n, ys, ss, q)))
            else:
                if spec.base.leq(p, ys[m]):
                    leq.append(((m, xs, rs, p), (n, ys, ss, q)))
    return FinitePoset(elements, leq), tree


def kposet_cover_check(spec, budget=100_000):
    """The displayed two-case cover law against brute-force covers.

    a < b means a = (t|m, p), b = (t, q); a is covered by b exactly when
    either m = n and p is covered by q in the base, or n = m + 1 with
    p = x_m and q the base's least element.
    """
    poset, _ = kposet(spec, budget)
    base_covers = set(spec.base.covers())
    zero = spec.base.least()
    brute = set(poset.covers())
    predicted = set()
    for a in poset.elements:
        for b in poset.elements:
            if not poset.lt(a, b):
                continue
            (m, xs, rs, p) = a
            (n, ys, ss, q) = b
            case1 = m == n and (p, q) in base_covers
            case2 = n == m + 1 and p == ys[m] and q == zero
            if case1 != case2 and (case1 or case2):
                predicted.add((a, b))
    return predicted == brute, predicted, brute


def bm_le2(m):
    """Subsets of an m-element set of size at most 2, plus the full set,
    ordered by inclusion."""
    if m < 2:
        raise ValueError("m must be at least 2")
    full = frozenset(range(m))
    subsets = {frozenset()} | {frozenset([i]) for i in range(m)}
    subsets |= {frozenset([i, j]) for i in range(m) for j in range(i + 1, m)}
    subsets.add(full)
    els = sorted(subsets, key=lambda s: (len(s), tuple(sorted(s))))
    leq = [(a, b) for a in els for b in els if a <= b]
    return FinitePoset(els, leq, validate=False)


def finite_comb_search(poset, kappa, lam, big_f, budget=2_000_000):
    """Finite-instance analogue of the free-set relation.

    Searches for an injective map f from the poset into range(kappa) with
    big_f(f(down p)) meeting f(down q) only inside f(down p), for all p <= q.
    big_f must send frozensets of integers to sets of fewer than lam
    integers; isotonicity of big_f is the caller's business, and every found
    map is rechecked definitionally over all comparable pairs. Returns the
    assignment dict or None. No claim transfers to the infinite relation.
    """
    order = poset.linear_extension()
    downs = {p: poset.downset(p) for p in poset.elements}
    steps = 0

    def f_down(assign, p):
        return frozenset(assign[x] for x in downs[p] if x in assign)

    def check_pair(assign, p, q):
        fp = f_down(assign, p)
        fq = f_down(assign, q)
        image = big_f(fp)
        if len(image) >= lam:
            raise ValueError("big_f image too large")
        return (image & fq) <= fp

    def ok_so_far(assign):
        placed = set(assign)
        for p in placed:
            for q in placed:
                if poset.leq(p, q) and downs[p] <= placed and downs[q] <= placed:
                    if not check_pair(assign, p, q):
                        return False
        return True

    def extend(assign):
        nonlocal steps
        if len(assign) == len(order):
            return dict(assign)
        p = order[len(assign)]
        for v in range(kappa):
            steps += 1
            if steps > budget:
                raise BudgetExceeded("search budget exhausted")
            if v in assign.values():
                continue
            assign[p] = v
            if ok_so_far(assign):
                res = extend(assign)
                if res is not None:
                    return res
            del assign[p]
        return None

    found = extend({})
    if found is None:
        return None
    for p in poset.elements:
        for q in poset.elements:
            if poset.leq(p, q):
                assert check_pair(found, p, q), "definitional recheck failed"
    return found


def _linear_extensions(poset, cap):
    """All linear extensions as tuples, up to a hard cap."""
    out = []

    def extend(prefix, remaining):
        if len(out) > cap:
            raise TooLarge(f"more than {cap} linear extensions")
        if not remaining:
            out.append(tuple(prefix))
            return
        for x in list(remaining):
            if all(not poset.lt(y, x) for y in remaining if y != x):
                remaining.remove(x)
                prefix.append(x)
                extend(prefix, remaining)
                prefix.pop()
                remaining.add(x)

    extend([], set(poset.elements))
    return out


def order_dimension_at_most(poset, k, extension_cap=3000):
    """Brute-force check that k linear extensions realize the order.

    Plumbing only: intended for k <= 3 and small posets; anything beyond the
    extension cap raises rather than guessing.
    """
    if k < 1 or k > 3:
        raise ValueError("only k <= 3 is supported")
    if len(poset.elements) > 10:
        raise TooLarge("order-dimension plumbing is capped at 10 elements")
    incomparable = [
        (a, b)
        for a in poset.elements
        for b in poset.elements
        if a != b and not poset.leq(a, b) and not poset.leq(b, a)
    ]
    if not incomparable:
        return True  # a chain: one extension realizes it
    exts = _linear_extensions(poset, extension_cap)
    index = {p: i for i, p in enumerate(incomparable)}

    def realized(ext):
        pos = {x: i for i, x in enumerate(ext)}
        mask = 0
        for (a, b) in incomparable:
            if pos[a] < pos[b]:
                mask |= 1 << index[(a, b)]
        return mask

    # both orientations of every incomparable pair carry their own bit, so a
    # realizer is a k-subset of masks whose union covers everything
    masks = sorted({realized(e) for e in exts})
    full = (1 << len(incomparable)) - 1
    if k == 1:
        return False
    if k >= 2:
        for i, m1 in enumerate(masks):
            for m2 in masks[i:]:
                if m1 | m2 == full:
                    return True
    if k >= 3:
        for i, m1 in enumerate(masks):
            for m2 in masks[i:]:
                need = full & ~(m1 | m2)
                if any((m3 & need) == need for m3 in masks):
                    return True
    return False
