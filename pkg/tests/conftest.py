import numpy as np
import pytest

from trianneal import Couplings, build


@pytest.fixture(scope="session")
def geom66():
    return build(6, 6)


@pytest.fixture(scope="session")
def geom44():
    return build(4, 4)


@pytest.fixture(scope="session")
def geom34():
    return build(3, 4)


@pytest.fixture()
def paper_couplings66(geom66):
    return Couplings(geom66, j=1.0, j_x=0.9)


@pytest.fixture()
def paper_couplings44(geom44):
    return Couplings(geom44, j=1.0, j_x=0.9)


def brute_force_energy(config, couplings, geom):
    """Independent bond-by-bond energy sum used as an oracle in tests."""
    total = 0.0
    for b in range(geom.n_bonds):
        total += couplings.effective(b) * float(config[geom.bond_a[b]]) * float(config[geom.bond_b[b]])
    return total


def random_pm1(rng, n):
    return rng.choice(np.array([-1, 1], dtype=np.int8), size=n)
