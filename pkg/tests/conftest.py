import random

from hypothesis import HealthCheck, settings, strategies as st

from vhmass.lattice import IntLattice, cartan_matrix, direct_sum, rescale, root_lattice

settings.register_profile(
    "default", max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


def unimodular(n, rng, steps=None):
    """A random matrix in GL_n(Z) built from elementary moves."""
    m = [[int(i == j) for j in range(n)] for i in range(n)]
    for _ in range(steps if steps is not None else 3 * n):
        i, j = rng.sample(range(n), 2) if n > 1 else (0, 0)
        if n > 1 and rng.random() < 0.8:
            c = rng.choice((-2, -1, 1, 2))
            m[i] = [a + c * b for a, b in zip(m[i], m[j])]
        elif n > 1:
            m[i], m[j] = m[j], m[i]
        else:
            m[0] = [-m[0][0]]
    return m


def transform(lat, m):
    g = lat.gram
    n = lat.rank
    return IntLattice(
        [[sum(m[i][a] * g[a][b] * m[j][b] for a in range(n) for b in range(n)) for j in range(n)]
         for i in range(n)],
        lat.label,
    )


SMALL_EVEN = [
    ("A1", root_lattice("A", 1)),
    ("A2", root_lattice("A", 2)),
    ("A3", root_lattice("A", 3)),
    ("A1+A1", direct_sum(root_lattice("A", 1), root_lattice("A", 1))),
    ("D4", root_lattice("D", 4)),
    ("A2+A1", direct_sum(root_lattice("A", 2), root_lattice("A", 1))),
    ("sqrt2A2", rescale(root_lattice("A", 2), 2)),
    ("A4", root_lattice("A", 4)),
    ("D5", root_lattice("D", 5)),
    ("[[2,1],[1,4]]", IntLattice([[2, 1], [1, 4]])),
    ("[[4,1],[1,6]]", IntLattice([[4, 1], [1, 6]])),
    ("[[2,0,1],[0,2,1],[1,1,6]]", IntLattice([[2, 0, 1], [0, 2, 1], [1, 1, 6]])),
]


@st.composite
def small_even_lattice(draw):
    name, lat = draw(st.sampled_from(SMALL_EVEN))
    seed = draw(st.integers(0, 10**6))
    return transform(lat, unimodular(lat.rank, random.Random(seed)))


@st.composite
def random_positive_gram(draw, max_rank=4, even=True):
    """Positive definite Gram matrices B B^T + D from small random data."""
    n = draw(st.integers(1, max_rank))
    b = [[draw(st.integers(-2, 2)) for _ in range(n)] for _ in range(n)]
    d = [draw(st.integers(1, 3)) for _ in range(n)]
    g = [[sum(b[i][k] * b[j][k] for k in range(n)) + (d[i] if i == j else 0) for j in range(n)]
         for i in range(n)]
    if even:
        g = [[2 * x for x in row] for row in g]
    return IntLattice(g)


# one line per acceptance criterion, filled in by test_acceptance.py
ACCEPTANCE: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for n in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[n])
