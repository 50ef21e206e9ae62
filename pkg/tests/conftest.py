import pytest

from gampkit import build_named
from gampkit.palg import LATTICE_TYPE, PartialAlgebra


FIXTURE_NAMES = ["two", "chain:3", "chain:4", "chain:5", "M3", "N5", "X1", "X2"]


@pytest.fixture(scope="session")
def fixture_lattices():
    return {name: build_named(name).algebra for name in FIXTURE_NAMES}


@pytest.fixture(scope="session")
def m3():
    return build_named("M3").algebra


@pytest.fixture(scope="session")
def n5():
    return build_named("N5").algebra


@pytest.fixture(scope="session")
def x1():
    return build_named("X1").algebra


@pytest.fixture(scope="session")
def chain3():
    return build_named("chain:3").algebra


def total_lattice(elements, leq_pairs):
    leq = set(leq_pairs) | {(x, x) for x in elements}

    def meet(a, b):
        lower = [c for c in elements if (c, a) in leq and (c, b) in leq]
        return next(c for c in lower if all((d, c) in leq for d in lower))

    def join(a, b):
        upper = [c for c in elements if (a, c) in leq and (b, c) in leq]
        return next(c for c in upper if all((c, d) in leq for d in upper))

    return PartialAlgebra.total_from_fn(LATTICE_TYPE, elements, {"meet": meet, "join": join})
