import random

import pytest

from cdalattice.config import load_spec
from cdalattice.lattice import build_lattice


@pytest.fixture(scope="session")
def golden():
    return load_spec("golden")


@pytest.fixture(scope="session")
def perfect4():
    return load_spec("perfect4")


@pytest.fixture(scope="session")
def golden_lattice(golden):
    return build_lattice(golden)


@pytest.fixture(scope="session")
def golden_lattice_lll(golden):
    return build_lattice(golden, reduce=True)


def random_element(spec, rng, bound=3):
    d = spec.lattice_dim
    return spec.from_coords([rng.randint(-bound, bound) for _ in range(d)])


def random_nonzero(spec, rng, bound=3):
    while True:
        x = random_element(spec, rng, bound)
        if not x.is_zero():
            return x


@pytest.fixture
def rng():
    return random.Random(20240611)
