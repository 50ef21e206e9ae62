import pytest
from hypothesis import given, settings, strategies as st

from gampkit.errors import IdealNotMapped, InvalidIdeal, NotGenerated
from gampkit.semilattice import (
    JoinSemilattice,
    Refusal,
    SemIdeal,
    SemMorphism,
    enumerate_ideals,
    hom_from_generators,
    induced_morphism,
    is_ideal_induced,
    ker0,
    quotient,
    restrict_ideal_induced,
)


def two():
    return JoinSemilattice.chain(2)


def chain3():
    return JoinSemilattice.chain(3)


def square_sem():
    return JoinSemilattice.product(two(), two())


# a random join-subsemilattice of the powerset of {0,1,2}, always containing
# the empty set; gives a varied supply of small semilattices
subset_strategy = st.sets(
    st.frozensets(st.integers(0, 2), max_size=3), min_size=0, max_size=4
)


def powerset_sub(extra):
    base = JoinSemilattice(
        [frozenset(s) for s in ({()} , (0,), (1,), (2,), (0, 1), (0, 2), (1, 2), (0, 1, 2))],
        frozenset(),
        {},
        validate=False,
    )
    els = [frozenset(map(int, s)) for s in
           [(), (0,), (1,), (2,), (0, 1), (0, 2), (1, 2), (0, 1, 2)]]
    table = {(a, b): a | b for a in els for b in els}
    big = JoinSemilattice(els, frozenset(), table, validate=False)
    closed = big.join_closure(extra)
    return big.sub(closed)


class TestBasics:
    def test_validate_rejects_broken_table(self):
        with pytest.raises(ValueError):
            JoinSemilattice([0, 1], 0, {(0, 0): 0, (0, 1): 1, (1, 0): 1, (1, 1): 0})

    def test_leq_from_table(self):
        s = chain3()
        assert s.leq(0, 2) and s.leq(1, 1) and not s.leq(2, 1)

    def test_ideal_validation(self):
        s = chain3()
        SemIdeal(s, {0, 1}).validate()
        with pytest.raises(InvalidIdeal):
            SemIdeal(s, {0, 2})  # not downward closed
        with pytest.raises(InvalidIdeal):
            SemIdeal(s, {1})  # missing zero


class TestHomFromGenerators:
    def test_identity_case(self):
        s = two()
        phi = hom_from_generators(s, s, {"*": 1}, {"*": 1})
        assert isinstance(phi, SemMorphism)
        assert phi(1) == 1 and phi(0) == 0

    def test_collapse_chain(self):
        s = chain3()
        t = two()
        # generated by {a=1, top=2}
        f = {"a": 1, "t": 2}
        g = {"a": 1, "t": 1}
        phi = hom_from_generators(s, t, f, g)
        assert isinstance(phi, SemMorphism)
        # oracle: scan all join equations
        assert phi(0) == 0 and phi(1) == 1 and phi(2) == 1

    def test_refusal_with_witness(self):
        # f(x)=1 in a chain, g(x)=0: converse implication fails with empty ys
        s = two()
        t = two()
        res = hom_from_generators(s, t, {"x": 1}, {"x": 0}, iso=True)
        assert isinstance(res, Refusal)
        assert res.direction == "converse" and res.ys == ()

    def test_not_generated(self):
        s = chain3()
        with pytest.raises(NotGenerated):
            hom_from_generators(s, two(), {"a": 1}, {"a": 1})


class TestQuotient:
    def test_trivial_ideal_is_identity_like(self):
        s = square_sem()
        q, proj = quotient(s, SemIdeal.zero(s))
        assert len(q) == len(s)
        assert all(proj(x) == x for x in s.elements)

    def test_chain_quotient(self):
        s = chain3()
        q, proj = quotient(s, SemIdeal(s, {0, 1}))
        assert len(q) == 2
        assert proj(1) == proj(0)
        ok, _ = is_ideal_induced(proj)
        assert ok
        assert ker0(proj).carrier == frozenset({0, 1})

    def test_square_quotient_to_two(self):
        s = square_sem()
        ideal = SemIdeal(s, {(0, 0), (1, 0)})
        q, proj = quotient(s, ideal)
        assert len(q) == 2

    def test_projection_always_ideal_induced(self):
        s = square_sem()
        for ideal in enumerate_ideals(s):
            q, proj = quotient(s, ideal)
            ok, _ = is_ideal_induced(proj)
            assert ok
            assert ker0(proj) == ideal


class TestInducedMorphism:
    def test_identity(self):
        s = chain3()
        ideal = SemIdeal(s, {0, 1})
        psi = induced_morphism(SemMorphism.identity(s), ideal, ideal)
        assert psi.is_injective() and psi.is_surjective()

    def test_collapse_becomes_iso(self):
        s, t = chain3(), two()
        phi = SemMorphism(s, t, {0: 0, 1: 0, 2: 1})
        psi = induced_morphism(phi, SemIdeal(s, {0, 1}), SemIdeal.zero(t))
        assert psi.is_injective() and psi.is_surjective()

    def test_ideal_not_mapped(self):
        s, t = chain3(), chain3()
        with pytest.raises(IdealNotMapped):
            induced_morphism(SemMorphism.identity(s), SemIdeal(s, {0, 1}), SemIdeal.zero(t))

    def test_trivial_source_ideal_factors_projection(self):
        s = square_sem()
        ideal = SemIdeal(s, {(0, 0), (0, 1)})
        q, proj = quotient(s, ideal)
        psi = induced_morphism(SemMorphism.identity(s), SemIdeal.zero(s), ideal)
        assert psi.mapping == proj.mapping


class TestIdealInduced:
    def test_non_surjective(self):
        s, t = two(), chain3()
        phi = SemMorphism(s, t, {0: 0, 1: 2})
        ok, witness = is_ideal_induced(phi)
        assert not ok and witness[0] == "not surjective"

    def test_projection_with_absorbers(self):
        s, t = square_sem(), two()
        phi = SemMorphism(s, t, {(a, b): a for a in (0, 1) for b in (0, 1)})
        ok, witness = is_ideal_induced(phi)
        assert ok
        assert all(z in {(0, 0), (0, 1)} for z in witness.values())

    def test_round_trip_iso(self):
        # any ideal-induced morphism factors as quotient then bijection
        s = square_sem()
        for ideal in enumerate_ideals(s):
            _, proj = quotient(s, ideal)
            psi = induced_morphism(proj, ker0(proj), SemIdeal.zero(proj.target))
            assert psi.is_injective() and psi.is_surjective()


class TestRestrictIdealInduced:
    def test_bijective_case(self):
        s = chain3()
        phi = SemMorphism.identity(s)
        sub = restrict_ideal_induced(phi, [])
        restricted = phi.restrict(sub)
        ok, _ = is_ideal_induced(restricted)
        assert ok

    def test_projection_with_seed(self):
        s, t = square_sem(), two()
        phi = SemMorphism(s, t, {(a, b): a for a in (0, 1) for b in (0, 1)})
        sub = restrict_ideal_induced(phi, [(0, 1)])
        assert (0, 1) in sub
        ok, _ = is_ideal_induced(phi.restrict(sub))
        assert ok

    def test_identity_whole(self):
        s = square_sem()
        sub = restrict_ideal_induced(SemMorphism.identity(s), s.elements)
        assert set(sub.elements) == set(s.elements)


class TestEnumerateIdeals:
    def test_two(self):
        out = enumerate_ideals(two())
        assert [sorted(i.carrier) for i in out] == [[0], [0, 1]]

    def test_chain(self):
        # oracle: brute force over all subsets
        s = chain3()
        from itertools import combinations

        brute = []
        for r in range(1, 4):
            for sub in combinations(s.elements, r):
                sub = set(sub)
                if 0 not in sub:
                    continue
                if any(s.leq(x, y) and x not in sub for x in s.elements for y in sub):
                    continue
                if any(s.join(x, y) not in sub for x in sub for y in sub):
                    continue
                brute.append(frozenset(sub))
        assert {i.carrier for i in enumerate_ideals(s)} == set(brute)
        assert len(brute) == 3

    def test_square(self):
        # brute force over subsets gives 4: the three-element downset of the
        # two atoms is not join-closed
        s = square_sem()
        from itertools import combinations

        count = 0
        for r in range(1, 5):
            for sub in combinations(s.elements, r):
                sub = set(sub)
                if s.zero not in sub:
                    continue
                if any(s.leq(x, y) and x not in sub for x in s.elements for y in sub):
                    continue
                if any(s.join(x, y) not in sub for x in sub for y in sub):
                    continue
                count += 1
        assert count == 4
        assert len(enumerate_ideals(s)) == 4


@settings(max_examples=40, deadline=None)
@given(subset_strategy)
def test_quotient_round_trip_property(extra):
    s = powerset_sub(extra)
    for ideal in enumerate_ideals(s):
        q, proj = quotient(s, ideal)
        ok, _ = is_ideal_induced(proj)
        assert ok
        assert ker0(proj) == ideal
        # quotient of a quotient is a single quotient up to bijection
        for ideal2 in enumerate_ideals(q):
            q2, proj2 = quotient(q, ideal2)
            composite = proj2.after(proj)
            ok2, _ = is_ideal_induced(composite)
            assert ok2
            q3, proj3 = quotient(s, ker0(composite))
            assert len(q3) == len(q2)
