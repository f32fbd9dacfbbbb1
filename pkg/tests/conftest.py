import pytest

from sparsecore import Formula, Hypergraph, enumerate_full, enumerate_k_dense


@pytest.fixture(scope="session")
def f_pair():
    """The minimal full formula: a clause and its literal-wise complement."""
    return Formula(3, [(1, 2, 3), (-1, -2, -3)])


@pytest.fixture(scope="session")
def complete3():
    """All eight 3-clauses on three variables (unsatisfiable)."""
    clauses = [
        tuple((v if (s >> i) & 1 else -v) for i, v in enumerate((1, 2, 3)))
        for s in range(8)
    ]
    return Formula(3, clauses)


@pytest.fixture(scope="session")
def k4():
    return Hypergraph(4, [(a, b) for a in range(1, 5) for b in range(a + 1, 5)])


@pytest.fixture(scope="session")
def full_catalog_r3():
    return enumerate_full(3, 2)


@pytest.fixture(scope="session")
def dense_catalog_k3():
    return enumerate_k_dense(2, 3, 2)
