import random

import pytest

from gampkit import build_named
from gampkit.congruence import (
    Congruence,
    MalcevWitness,
    NoContainment,
    UnknownAtBound,
    all_congruences_bruteforce,
    alternating_composite,
    con_join,
    con_lattice,
    con_meet,
    conc,
    conc_morphism,
    is_congruence,
    is_n_permutable,
    least_congruence_bruteforce,
    malcev_witness,
    principal_congruence,
    quotient_algebra,
)
from gampkit.errors import NotTotal
from gampkit.palg import LATTICE_TYPE, PalgMorphism, PartialAlgebra
from gampkit.semilattice import SemIdeal, is_ideal_induced, ker0


class TestPrincipal:
    def test_reflexive_pair(self, m3):
        theta = principal_congruence(m3, "x1", "x1")
        assert theta == Congruence.identity(m3.universe)

    def test_m3_simple(self, m3):
        theta = principal_congruence(m3, "0", "x1")
        assert theta == Congruence.full(m3.universe)

    def test_x1_meet_of_marked_principals_is_zero(self, x1):
        t1 = principal_congruence(x1, "1", "x1")
        t2 = principal_congruence(x1, "x3", "1")
        assert con_meet(t1, t2) == Congruence.identity(x1.universe)

    def test_requires_total(self):
        alg = PartialAlgebra(LATTICE_TYPE, [0, 1], {})
        with pytest.raises(NotTotal):
            principal_congruence(alg, 0, 1)

    def test_against_bruteforce_oracle(self, fixture_lattices):
        for name, alg in fixture_lattices.items():
            if len(alg.universe) > 6:
                continue
            for x in alg.universe:
                for y in alg.universe:
                    fast = principal_congruence(alg, x, y)
                    slow = least_congruence_bruteforce(alg, x, y)
                    assert fast == slow, (name, x, y)


class TestConLattice:
    def test_two(self, fixture_lattices):
        assert len(con_lattice(fixture_lattices["two"])) == 2

    def test_chain_boolean(self, fixture_lattices):
        # an (n+1)-element chain has a Boolean congruence lattice on n atoms
        for k in (3, 4, 5):
            alg = fixture_lattices[f"chain:{k}"]
            assert len(con_lattice(alg)) == 2 ** (k - 1)

    def test_m3_simple(self, m3):
        assert len(con_lattice(m3)) == 2

    def test_matches_bruteforce(self, fixture_lattices):
        for name, alg in fixture_lattices.items():
            if len(alg.universe) > 6:
                continue
            fast = set(con_lattice(alg))
            slow = set(all_congruences_bruteforce(alg))
            assert fast == slow, name


class TestConc:
    def test_two_point(self, fixture_lattices):
        cs = conc(fixture_lattices["two"])
        assert len(cs) == 2

    def test_chain3_is_square(self, chain3):
        cs = conc(chain3)
        assert len(cs) == 4
        atoms = [cs.principal(0, 1), cs.principal(1, 2)]
        assert cs.join(atoms[0], atoms[1]) == Congruence.full(chain3.universe)

    def test_x1_cross_check(self, x1):
        cs = conc(x1)
        assert set(cs.elements) == set(con_lattice(x1))
        assert len(cs) == 8

    def test_generator_map(self, x1):
        cs = conc(x1)
        for a in x1.universe:
            for b in x1.universe:
                assert cs.principal(a, b) == principal_congruence(x1, a, b)


class TestConcMorphism:
    def test_identity(self, m3):
        f = PalgMorphism.identity(m3)
        cm = conc_morphism(f)
        assert all(cm(t) == t for t in cm.source.elements)

    def test_functoriality(self, chain3, m3):
        f = PalgMorphism(chain3, m3, {0: "0", 1: "x3", 2: "1"})
        g = PalgMorphism.identity(m3)
        assert conc_morphism(g.after(f)).mapping == conc_morphism(g).after(conc_morphism(f)).mapping

    def test_surjection_is_ideal_induced_with_stated_kernel(self, chain3):
        theta = principal_congruence(chain3, 0, 1)
        q, proj = quotient_algebra(chain3, theta)
        cm = conc_morphism(proj)
        ok, _ = is_ideal_induced(cm)
        assert ok
        below = {t for t in cm.source.elements if t.leq(theta)}
        assert ker0(cm).carrier == frozenset(below)

    def test_diagonal_embedding_injective_on_principals(self, chain3):
        prod = PartialAlgebra.product([chain3, chain3])
        f = PalgMorphism(chain3, prod, {x: (x, x) for x in chain3.universe})
        cm = conc_morphism(f)
        principals = {cm.source.principal(x, y) for x in chain3.universe for y in chain3.universe}
        images = {cm(t) for t in principals}
        assert len(images) == len(principals)


class TestQuotientAlgebra:
    def test_identity_theta(self, m3):
        q, _ = quotient_algebra(m3, Congruence.identity(m3.universe))
        assert q == m3

    def test_full_theta(self, m3):
        q, _ = quotient_algebra(m3, Congruence.full(m3.universe))
        assert len(q.universe) == 1

    def test_x1_quotient(self, x1):
        theta = principal_congruence(x1, "x3", "1")
        q, proj = quotient_algebra(x1, theta)
        assert len(q.universe) == len(theta.blocks)
        cm = conc_morphism(proj)
        ok, _ = is_ideal_induced(cm)
        assert ok

    def test_quotients_preserve_n_permutability(self, fixture_lattices):
        for name in ("chain:3", "M3", "X1"):
            alg = fixture_lattices[name]
            for n in (2, 3):
                ok, _ = is_n_permutable(alg, n)
                if not ok:
                    continue
                for theta in con_lattice(alg):
                    q, _ = quotient_algebra(alg, theta)
                    ok_q, _ = is_n_permutable(q, n)
                    assert ok_q, (name, n, theta)


class TestNPermutable:
    def test_two_trivially_permutable(self, fixture_lattices):
        ok, _ = is_n_permutable(fixture_lattices["two"], 2)
        assert ok

    def test_chain_not_2_but_3_permutable(self, chain3):
        ok2, witness = is_n_permutable(chain3, 2)
        assert not ok2 and witness is not None
        ok3, _ = is_n_permutable(chain3, 3)
        assert ok3

    def test_m3_permutable(self, m3):
        ok, _ = is_n_permutable(m3, 2)
        assert ok

    def test_composite_convention(self, chain3):
        alpha = principal_congruence(chain3, 0, 1)
        beta = principal_congruence(chain3, 1, 2)
        # alpha o beta applies beta first: from 0, beta reaches only 0, and
        # alpha takes 0 to {0, 1}, so 2 stays out of reach
        rel = alternating_composite(alpha, beta, 2, chain3.universe)
        assert rel[0] == {0, 1}
        rel_rev = alternating_composite(beta, alpha, 2, chain3.universe)
        assert 2 in rel_rev[0]


class TestMalcev:
    def test_equal_endpoints(self, chain3):
        w = malcev_witness(chain3, 1, 1, (0,), (1,))
        assert isinstance(w, MalcevWitness) and w.n == 1
        assert w.validate(chain3, 1, 1, (0,), (1,))

    def test_chain_through_middle(self, chain3):
        w = malcev_witness(chain3, 0, 2, (0, 1), (1, 2))
        assert isinstance(w, MalcevWitness)
        assert w.validate(chain3, 0, 2, (0, 1), (1, 2))

    def test_no_containment(self, chain3):
        res = malcev_witness(chain3, 0, 2, (0,), (1,))
        assert isinstance(res, NoContainment)

    def test_m3_simple_witness(self, m3):
        w = malcev_witness(m3, "0", "1", ("0",), ("x1",))
        assert isinstance(w, MalcevWitness)
        assert w.validate(m3, "0", "1", ("0",), ("x1",))

    def test_unknown_at_tiny_bound(self, m3):
        res = malcev_witness(m3, "x2", "x3", ("0",), ("x1",), depth_bound=0)
        assert isinstance(res, (UnknownAtBound, MalcevWitness))
        if isinstance(res, MalcevWitness):
            assert res.validate(m3, "x2", "x3", ("0",), ("x1",))

    def test_randomized_soundness(self, fixture_lattices):
        rng = random.Random(7)
        names = sorted(fixture_lattices)
        for _ in range(150):
            alg = fixture_lattices[rng.choice(names)]
            els = list(alg.universe)
            x, y = rng.choice(els), rng.choice(els)
            m = rng.randint(1, 2)
            xs = tuple(rng.choice(els) for _ in range(m))
            ys = tuple(rng.choice(els) for _ in range(m))
            res = malcev_witness(alg, x, y, xs, ys)
            theta = principal_congruence(alg, x, y) if x != y else None
            if isinstance(res, MalcevWitness):
                assert res.validate(alg, x, y, xs, ys)
            elif isinstance(res, NoContainment):
                gen = Congruence.identity(alg.universe)
                for a, b in zip(xs, ys):
                    gen = con_join(gen, principal_congruence(alg, a, b))
                assert not gen.same(x, y)
