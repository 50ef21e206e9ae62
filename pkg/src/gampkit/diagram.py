"""Poset-indexed diagrams of semilattices, algebras, pregamps, and gamps:
validation, quotients, functor application, lifting verification."""

from .errors import DomainMismatch, InvalidIdeal, MissingRealization
from .palg import PalgMorphism, PartialAlgebra
from .pregamp import Pregamp, PregampMorphism
from .semilattice import JoinSemilattice, SemMorphism
from .util import Verdict, combine_verdicts
from . import congruence as _cong
from . import gamp as _gamp
from . import pregamp as _pregamp


def _identity_morphism(obj):
    from .gamp import Gamp, GampMorphism

    if isinstance(obj, JoinSemilattice):
        return SemMorphism.identity(obj)
    if isinstance(obj, PartialAlgebra):
        return PalgMorphism.identity(obj)
    if isinstance(obj, Pregamp):
        return PregampMorphism.identity(obj)
    if isinstance(obj, Gamp):
        return GampMorphism.identity(obj)
    raise DomainMismatch(f"no identity for {type(obj).__name__}")


class Diagram:
    """Objects over a finite poset with arrows for every comparable pair.

    Arrows must include identities and compose on the nose; validate checks
    this exhaustively.
    """

    def __init__(self, poset, objects, arrows, validate=True):
        self.poset = poset
        self.objects = dict(objects)
        self.arrows = dict(arrows)
        if validate:
            ok, viol = self.validate()
            if not ok:
                raise ValueError(f"not a diagram: {viol}")

    def validate(self):
        for p in self.poset.elements:
            if p not in self.objects:
                return False, ("missing object", p)
        for p in self.poset.elements:
            for q in self.poset.elements:
                if self.poset.leq(p, q) and (p, q) not in self.arrows:
                    return False, ("missing arrow", (p, q))
        for p in self.poset.elements:
            if self.arrows[(p, p)] != _identity_morphism(self.objects[p]):
                return False, ("identity arrow", p)
        for p in self.poset.elements:
            for q in self.poset.elements:
                for r in self.poset.elements:
                    if self.poset.leq(p, q) and self.poset.leq(q, r):
                        left = self.arrows[(q, r)].after(self.arrows[(p, q)])
                        if left != self.arrows[(p, r)]:
                            return False, ("composition", (p, q, r))
        return True, None

    def arrow(self, p, q):
        return self.arrows[(p, q)]

    @classmethod
    def from_generators(cls, poset, objects, cover_arrows):
        """Expand a generators-only arrow family to all comparable pairs.

        Compositions along different cover paths must agree; validate will
        reject the result otherwise.
        """
        arrows = {(p, p): _identity_morphism(objects[p]) for p in poset.elements}
        arrows.update(cover_arrows)
        changed = True
        while changed:
            changed = False
            for (p, q), f in list(arrows.items()):
                for (q2, r), g in list(arrows.items()):
                    if q2 == q and (p, r) not in arrows:
                        arrows[(p, r)] = g.after(f)
                        changed = True
        return cls(poset, objects, arrows)


class DiagramIdeal:
    """Per-node semilattice ideal carried forward by every arrow."""

    def __init__(self, diagram, ideals, validate=True):
        self.diagram = diagram
        self.ideals = dict(ideals)
        if validate:
            self.validate()

    def _sem_arrow(self, p, q):
        arrow = self.diagram.arrows[(p, q)]
        return arrow if isinstance(arrow, SemMorphism) else arrow.fsem

    def validate(self):
        d = self.diagram
        for p in d.poset.elements:
            ideal = self.ideals.get(p)
            if ideal is None:
                raise InvalidIdeal(f"missing ideal at {p!r}")
            ideal.validate()
        for p in d.poset.elements:
            for q in d.poset.elements:
                if d.poset.leq(p, q):
                    f = self._sem_arrow(p, q)
                    if not f.apply_set(self.ideals[p].carrier) <= self.ideals[q].carrier:
                        raise InvalidIdeal(f"ideal not carried along {(p, q)}")


class NaturalTransformation:
    """Per-node morphisms commuting with both diagrams' arrows."""

    def __init__(self, source, target, components, validate=True):
        self.source = source
        self.target = target
        self.components = dict(components)
        if validate:
            self.validate()

    def validate(self):
        poset = self.source.poset
        if self.target.poset != poset:
            raise ValueError("index posets differ")
        for p in poset.elements:
            for q in poset.elements:
                if poset.leq(p, q):
                    left = self.components[q].after(self.source.arrows[(p, q)])
                    right = self.target.arrows[(p, q)].after(self.components[p])
                    if left != right:
                        raise ValueError(f"naturality fails at {(p, q)}")


def _quotient_node(obj, ideal):
    from .gamp import Gamp

    if isinstance(obj, JoinSemilattice):
        from .semilattice import quotient

        return quotient(obj, ideal)
    if isinstance(obj, Pregamp):
        return _pregamp.quotient_pregamp(obj, ideal)
    if isinstance(obj, Gamp):
        return _gamp.quotient_gamp(obj, ideal)
    raise DomainMismatch(f"cannot quotient {type(obj).__name__}")


def _induced_arrow(arrow, ideal_p, ideal_q):
    from .gamp import GampMorphism

    if isinstance(arrow, SemMorphism):
        from .semilattice import induced_morphism

        return induced_morphism(arrow, ideal_p, ideal_q)
    if isinstance(arrow, PregampMorphism):
        return _pregamp.induced_pregamp_morphism(arrow, ideal_p, ideal_q)
    if isinstance(arrow, GampMorphism):
        return _gamp.induced_gamp_morphism(arrow, ideal_p, ideal_q)
    raise DomainMismatch(f"cannot induce on {type(arrow).__name__}")


def quotient_diagram(diagram, diagram_ideal, validate=True):
    """Nodewise quotients with induced arrows, plus the projection family.

    validate=False skips the diagram-level functoriality and naturality
    re-checks (each induced arrow is still validated); the refutation trace
    uses this to surface commutation failures at its own named steps.
    """
    diagram_ideal.validate()
    poset = diagram.poset
    new_objects = {}
    projections = {}
    for p in poset.elements:
        q_obj, proj = _quotient_node(diagram.objects[p], diagram_ideal.ideals[p])
        new_objects[p] = q_obj
        projections[p] = proj
    new_arrows = {}
    for (p, q), arrow in diagram.arrows.items():
        new_arrows[(p, q)] = _induced_arrow(
            arrow, diagram_ideal.ideals[p], diagram_ideal.ideals[q]
        )
    result = Diagram(poset, new_objects, new_arrows, validate=validate)
    transform = NaturalTransformation(diagram, result, projections, validate=validate)
    return result, transform


def apply_functor(diagram, name, bound=160):
    """Nodewise functor application: Conc, PGA, GA, CG, PGGL, PGGR."""
    poset = diagram.poset
    if name == "Conc":
        objs = {p: _cong.conc(diagram.objects[p], bound) for p in poset.elements}
        arrows = {
            (p, q): _cong.conc_morphism(diagram.arrows[(p, q)], objs[p], objs[q])
            for (p, q) in diagram.arrows
        }
    elif name == "PGA":
        objs = {p: _pregamp.pga(diagram.objects[p], bound) for p in poset.elements}
        arrows = {
            (p, q): _pregamp.pga_mor(diagram.arrows[(p, q)], objs[p], objs[q])
            for (p, q) in diagram.arrows
        }
    elif name == "GA":
        objs = {p: _gamp.ga(diagram.objects[p], bound) for p in poset.elements}
        arrows = {
            (p, q): _gamp.ga_mor(diagram.arrows[(p, q)], objs[p], objs[q])
            for (p, q) in diagram.arrows
        }
    elif name == "CG":
        objs = {p: _gamp.cg(diagram.objects[p]) for p in poset.elements}
        arrows = {(p, q): a.fsem for (p, q), a in diagram.arrows.items()}
    elif name == "PGGL":
        objs = {p: _gamp.pggl(diagram.objects[p]) for p in poset.elements}
        arrows = {(p, q): _gamp.pggl_mor(a) for (p, q), a in diagram.arrows.items()}
    elif name == "PGGR":
        objs = {p: _gamp.pggr(diagram.objects[p]) for p in poset.elements}
        arrows = {(p, q): _gamp.pggr_mor(a) for (p, q), a in diagram.arrows.items()}
    else:
        raise DomainMismatch(f"unknown functor {name!r}")
    return Diagram(poset, objs, arrows)


def is_operational_diagram(diagram):
    """Every strict arrow operational; returns (bool, witness)."""
    for (p, q), arrow in diagram.arrows.items():
        if p == q:
            continue
        v = _gamp.check_morphism_property(arrow, "operational")
        if not v:
            return False, ((p, q), v.witness)
    return True, None


def is_partial_lifting(
    diagram,
    realizations,
    m_cap=2,
    x_cap=3,
    lattice=False,
    n_permutable=None,
):
    """Verify the partial-lifting conditions on a gamp diagram.

    Per node: strong, congruence-tractable (bounded), distance-generated, and
    a caller-supplied isomorphic realization. Per strict arrow: strong and
    congruence-cuttable (bounded). The lattice flag adds the chain forms;
    n_permutable adds the per-node permutability check. Returns an aggregated
    verdict plus the per-item detail map.
    """
    detail = {}
    verdicts = []
    poset = diagram.poset
    for p in poset.elements:
        g = diagram.objects[p]
        if p not in realizations:
            raise MissingRealization(f"no realization supplied for node {p!r}")
        r = realizations[p]
        v = Verdict.true() if (_gamp.check_realization(g, r) and r.isomorphic) else Verdict.false()
        detail[("realization", p)] = v
        verdicts.append(v)
        for prop in ("strong", "distance_generated"):
            v = _gamp.check_property(g, prop)
            detail[(prop, p)] = v
            verdicts.append(v)
        v = _gamp.check_property(g, "congruence_tractable", m_cap=m_cap)
        detail[("congruence_tractable", p)] = v
        verdicts.append(v)
        if lattice:
            v = _gamp.check_property(g, "distance_generated_chains")
            detail[("distance_generated_chains", p)] = v
            verdicts.append(v)
        if n_permutable is not None:
            v = _gamp.check_property(g, "n_permutable", n=n_permutable)
            detail[("n_permutable", p)] = v
            verdicts.append(v)
    for (p, q), arrow in diagram.arrows.items():
        if p == q:
            continue
        for prop in ("strong", "cuttable") + (("cuttable_chains",) if lattice else ()):
            v = _gamp.check_morphism_property(arrow, prop, m_cap=m_cap, x_cap=x_cap)
            detail[(prop, (p, q))] = v
            verdicts.append(v)
    return combine_verdicts(verdicts), detail


def natural_equivalence_search(d1, d2, budget=200_000):
    """Nodewise pregamp isomorphisms commuting with the arrows.

    Backtracks over per-node isomorphisms in linear-extension order, checking
    the naturality squares into already-assigned nodes. Returns a
    NaturalTransformation, or None when the (budgeted) search is exhausted.
    """
    poset = d1.poset
    if d2.poset != poset:
        return None
    order = poset.linear_extension()
    candidates = {}

    def candidate_isos(p):
        if p not in candidates:
            candidates[p] = _all_pregamp_isos(d1.objects[p], d2.objects[p], budget)
        return candidates[p]

    assignment = {}

    def consistent(p, iso):
        for q in assignment:
            if poset.leq(q, p):
                left = iso.after(d1.arrows[(q, p)])
                right = d2.arrows[(q, p)].after(assignment[q])
                if left != right:
                    return False
            if poset.leq(p, q):
                left = assignment[q].after(d1.arrows[(p, q)])
                right = d2.arrows[(p, q)].after(iso)
                if left != right:
                    return False
        return True

    def extend(i):
        if i == len(order):
            return NaturalTransformation(d1, d2, dict(assignment))
        p = order[i]
        for iso in candidate_isos(p):
            if consistent(p, iso):
                assignment[p] = iso
                res = extend(i + 1)
                if res is not None:
                    return res
                del assignment[p]
        return None

    return extend(0)


def _all_pregamp_isos(pg1, pg2, budget):
    """All pregamp isomorphisms between two small pregamps."""
    from .palg import is_palg_isomorphism
    from .pregamp import _sem_isomorphisms

    out = []
    if len(pg1.carrier) != len(pg2.carrier) or len(pg1.sem) != len(pg2.sem):
        return out
    u1 = list(pg1.carrier.universe)
    for smap in _sem_isomorphisms(pg1.sem, pg2.sem, budget):
        smor = SemMorphism(pg1.sem, pg2.sem, smap, validate=False)

        def extend(mapping, used):
            if len(mapping) == len(u1):
                try:
                    f = PalgMorphism(pg1.carrier, pg2.carrier, dict(mapping))
                except ValueError:
                    return
                if not is_palg_isomorphism(f):
                    return
                m = PregampMorphism(pg1, pg2, f, smor, validate=False)
                try:
                    m.validate()
                except ValueError:
                    return
                out.append(m)
                return
            x = u1[len(mapping)]
            for y in pg2.carrier.universe:
                if y in used:
                    continue
                if any(smor(pg1.delta(x, a)) != pg2.delta(y, fa) for a, fa in mapping.items()):
                    continue
                mapping[x] = y
                used.add(y)
                extend(mapping, used)
                del mapping[x]
                used.discard(y)

        extend({}, set())
    return out
