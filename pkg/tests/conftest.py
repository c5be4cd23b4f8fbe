import numpy as np
import pytest

from fastppr.bench import generate_power_law_graph
from fastppr.graph import load_edge_list
from fastppr.oracle import dense_ppr_matrix

ALPHA = 0.2


@pytest.fixture(scope="session")
def two_cycle():
    return load_edge_list("0 1\n1 0")


@pytest.fixture(scope="session")
def triangle():
    return load_edge_list("0 1\n1 2\n2 0")


@pytest.fixture(scope="session")
def self_loop():
    return load_edge_list("0 0")


@pytest.fixture(scope="session")
def chain3():
    # 0 -> 1 -> 2, node 2 closed with a self-loop
    return load_edge_list("0 1\n1 2")


@pytest.fixture(scope="session")
def two_islands():
    return load_edge_list("0 0\n1 1")


@pytest.fixture(scope="session")
def star_out():
    # hub 0 -> three leaves; leaves are dangling, closed with self-loops
    return load_edge_list("0 1\n0 2\n0 3")


@pytest.fixture(scope="session")
def star_in():
    # three self-looped leaves pointing at a self-looped center 0
    return load_edge_list("1 1\n2 2\n3 3\n1 0\n2 0\n3 0\n0 0")


def random_digraph(n, m, seed):
    """Uniform random directed graph, built through the text loader so it
    carries the loader's first-seen labeling like every production graph."""
    rng = np.random.default_rng([seed, n, m])
    pairs = rng.integers(0, n, size=(m, 2))
    text = "\n".join(f"{u} {v}" for u, v in pairs)
    return load_edge_list(text)


@pytest.fixture(scope="session")
def small_random():
    return random_digraph(30, 120, seed=1)


@pytest.fixture(scope="session")
def ppr_matrix_cache():
    cache = {}

    def get(g, alpha=ALPHA):
        key = (id(g), alpha)
        if key not in cache:
            cache[key] = dense_ppr_matrix(g, alpha)
        return cache[key]

    return get


@pytest.fixture(scope="session")
def power_law_1k():
    return generate_power_law_graph(1000, 5000, seed=4)
