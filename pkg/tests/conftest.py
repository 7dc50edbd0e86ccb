from pathlib import Path

import pytest

from src.assets.groupoid import (
    brandt_b2,
    cyclic_group,
    null_semigroup,
    right_zero,
    trivial,
)
from src.assets.instances import enumerate_semigroups

TABLES_DIR = Path(__file__).resolve().parent.parent / "static" / "tables"


@pytest.fixture
def tables_dir():
    return TABLES_DIR


@pytest.fixture
def c2():
    return cyclic_group(2)


@pytest.fixture
def rz2():
    return right_zero(2)


@pytest.fixture
def n2():
    return null_semigroup(2)


@pytest.fixture
def b2():
    return brandt_b2()


@pytest.fixture
def trivial_semigroup():
    return trivial()


@pytest.fixture(scope="session")
def small_corpus():
    """Every semigroup table of order 1 and 2."""
    return [s for n in (1, 2) for s in enumerate_semigroups(n)]


@pytest.fixture(scope="session")
def order3_corpus():
    return list(enumerate_semigroups(3))
