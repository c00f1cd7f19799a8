import pytest

from critlat.lattice import builtin, validate_lattice

from oracles import enumerate_all_lattices


@pytest.fixture(scope="session")
def named():
    """The standing corpus of named lattices."""
    out = {name: builtin(name) for name in
           ("2", "M:3", "M:4", "M:5", "N5", "bool:2", "bool:3", "F22",
            "chain:1", "chain:2", "chain:3", "chain:4", "chain:5")}
    out["one"] = validate_lattice(["*"], [], name="one")
    return out


@pytest.fixture(scope="session")
def small_lattices():
    """Every lattice with at most 6 elements, up to isomorphism."""
    out = []
    for n in range(1, 7):
        out.extend(enumerate_all_lattices(n))
    return out


@pytest.fixture(scope="session")
def corpus(named, small_lattices):
    return list(named.values()) + small_lattices
