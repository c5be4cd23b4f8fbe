import numpy as np
import pytest

from fastppr.oracle import (brute_force_walk_enum, dense_ppr_matrix,
                            exact_inverse_ppr, global_pagerank,
                            power_iteration_ppr)
from tests.conftest import random_digraph

ALPHA = 0.2

# closed forms for the 2-node cycle and the directed triangle
TWO_CYCLE_SELF = 1.0 / (2.0 - ALPHA)          # 0.5555...
TWO_CYCLE_OTHER = (1.0 - ALPHA) / (2.0 - ALPHA)  # 0.4444...
TRI = ALPHA / (1.0 - (1.0 - ALPHA) ** 3)      # 0.40983...


def test_power_iteration_single_node(self_loop):
    vec = power_iteration_ppr(self_loop, 0, ALPHA, tol=1e-10)
    assert vec.values == pytest.approx([1.0])


def test_power_iteration_two_cycle(two_cycle):
    vec = power_iteration_ppr(two_cycle, 0, ALPHA, tol=1e-10)
    assert vec.values[0] == pytest.approx(TWO_CYCLE_SELF, abs=1e-9)
    assert vec.values[1] == pytest.approx(TWO_CYCLE_OTHER, abs=1e-9)


def test_power_iteration_triangle(triangle):
    vec = power_iteration_ppr(triangle, 0, ALPHA, tol=1e-10)
    expected = [TRI, TRI * (1 - ALPHA), TRI * (1 - ALPHA) ** 2]
    assert vec.values == pytest.approx(expected, abs=1e-9)


def test_forward_vector_sums_to_one(small_random):
    vec = power_iteration_ppr(small_random, 3, ALPHA, tol=1e-10)
    assert vec.values.sum() == pytest.approx(1.0, abs=small_random.n * 1e-10)
    assert (vec.values >= 0).all()


def test_inverse_two_cycle(two_cycle):
    vec = exact_inverse_ppr(two_cycle, 0, ALPHA, tol=1e-9)
    assert vec.values[0] == pytest.approx(TWO_CYCLE_SELF, abs=1e-8)
    assert vec.values[1] == pytest.approx(TWO_CYCLE_OTHER, abs=1e-8)


def test_inverse_unreachable_entry_zero(two_islands):
    vec = exact_inverse_ppr(two_islands, 0, ALPHA, tol=1e-9)
    assert vec.values[1] == 0.0


def test_inverse_column_sum_identity():
    # sum_w inverse_ppr_t(w) equals n * global_pagerank(t), both computed
    # independently
    g = random_digraph(50, 250, seed=12)
    pr = global_pagerank(g, ALPHA, tol=1e-12).values
    tol = 1e-9
    for t in (0, 7, 23):
        vec = exact_inverse_ppr(g, t, ALPHA, tol=tol)
        assert vec.values.sum() == pytest.approx(g.n * pr[t], abs=g.n * tol)


def test_global_pagerank_two_cycle(two_cycle):
    pr = global_pagerank(two_cycle, ALPHA).values
    assert pr == pytest.approx([0.5, 0.5], abs=1e-9)


def test_global_pagerank_triangle(triangle):
    pr = global_pagerank(triangle, ALPHA).values
    assert pr == pytest.approx([1 / 3] * 3, abs=1e-9)


def test_global_pagerank_star_ordering(star_in):
    pr = global_pagerank(star_in, ALPHA).values
    center = pr[star_in.internal_id(0)]
    leaves = [star_in.internal_id(i) for i in (1, 2, 3)]
    assert all(center > pr[leaf] for leaf in leaves)
    assert pr.sum() == pytest.approx(1.0, abs=1e-8)


def test_walk_enum_two_cycle(two_cycle):
    vec = brute_force_walk_enum(two_cycle, 0, ALPHA, l_cap=100)
    assert abs(vec.values[0] - TWO_CYCLE_SELF) < 1e-9
    assert abs(vec.values[1] - TWO_CYCLE_OTHER) < 1e-9


def test_walk_enum_zero_cap(two_cycle):
    vec = brute_force_walk_enum(two_cycle, 0, ALPHA, l_cap=0)
    assert vec.values == pytest.approx([ALPHA, 0.0])


def test_walk_enum_cap_too_small(two_cycle):
    with pytest.raises(ValueError, match="truncation"):
        brute_force_walk_enum(two_cycle, 0, ALPHA, l_cap=3, tol=1e-6)


@pytest.mark.parametrize("seed", range(20))
def test_dual_oracle_agreement(seed):
    # power iteration and truncated walk enumeration are independent
    # routes; they must agree within tol + (1-alpha)^(l_cap+1)
    g = random_digraph(30, 120, seed=100 + seed)
    tol = 1e-10
    l_cap = 120
    for s in (0, g.n // 2):
        a = power_iteration_ppr(g, s, ALPHA, tol=tol).values
        b = brute_force_walk_enum(g, s, ALPHA, l_cap=l_cap).values
        bound = tol + (1 - ALPHA) ** (l_cap + 1)
        assert np.abs(a - b).max() < bound


def test_forward_inverse_duality(small_random):
    tol = 1e-10
    for s, t in [(0, 5), (3, 3), (11, 28)]:
        fwd = power_iteration_ppr(small_random, s, ALPHA, tol=tol).values[t]
        inv = exact_inverse_ppr(small_random, t, ALPHA, tol=tol).values[s]
        assert abs(fwd - inv) < 2 * tol


def test_dense_matrix_matches_iterative(small_random):
    P = dense_ppr_matrix(small_random, ALPHA)
    vec = power_iteration_ppr(small_random, 4, ALPHA, tol=1e-12).values
    assert np.abs(P[4] - vec).max() < 1e-10
    # rows are distributions
    assert np.allclose(P.sum(axis=1), 1.0, atol=1e-10)
