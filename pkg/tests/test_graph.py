import numpy as np
import pytest

from fastppr.graph import (GraphFormatError, degrees, load_edge_list,
                           load_edge_list_path, read_binary_cache,
                           to_edge_list_text, write_binary_cache)
from tests.conftest import random_digraph


def test_two_cycle_load(two_cycle):
    assert two_cycle.n == 2
    assert two_cycle.m == 2
    assert list(two_cycle.out_deg) == [1, 1]
    two_cycle.validate()


def test_remap_and_dangling_closure():
    # one real edge 5->9 remapped to 0->1, plus the self-loop materialized
    # at the dangling node 1
    g = load_edge_list("# c\n5 9")
    assert g.n == 2
    assert g.m == 2
    assert list(g.orig_ids) == [5, 9]
    assert list(g.out_neighbors(0)) == [1]
    assert list(g.out_neighbors(1)) == [1]
    assert g.internal_id(9) == 1


def test_duplicate_edges_removed():
    g = load_edge_list("0 1\n0 1\n1 2\n2 0")
    assert g.n == 3
    assert g.m == 3


def test_undirected_flag():
    g = load_edge_list("0 1", undirected=True)
    assert g.m == 2
    assert list(g.out_neighbors(0)) == [1]
    assert list(g.out_neighbors(1)) == [0]


def test_self_loops_preserved():
    g = load_edge_list("0 0\n0 1\n1 0")
    assert g.m == 3


def test_malformed_line_reports_number():
    with pytest.raises(GraphFormatError, match="line 2"):
        load_edge_list("0 1\n0 1 2")
    with pytest.raises(GraphFormatError, match="line 3"):
        load_edge_list("0 1\n# ok\nx y")


def test_empty_input_rejected():
    with pytest.raises(GraphFormatError):
        load_edge_list("")
    with pytest.raises(GraphFormatError):
        load_edge_list("# only comments\n")


def test_degrees_two_cycle(two_cycle):
    d_out, d_in, d = degrees(two_cycle)
    assert list(d_out) == [1, 1]
    assert list(d_in) == [1, 1]
    assert d == 1.0


def test_degrees_triangle(triangle):
    _, _, d = degrees(triangle)
    assert d == 1.0


def test_degrees_star_with_closure(star_out):
    # 3 hub edges + 3 leaf self-loops
    d_out, d_in, d = degrees(star_out)
    assert star_out.m == 6
    assert d == 1.5
    assert list(d_out) == [3, 1, 1, 1]


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_out_in_adjacency_bijection(seed):
    g = random_digraph(50, 400, seed=seed)
    g.validate()  # includes the full out/in multiset comparison


@pytest.mark.parametrize("text", [
    "0 1\n1 0",
    "5 9",
    "0 1\n1 2\n2 0",
    "3 3\n3 7\n7 2\n2 3",
])
def test_round_trip_canonical_text(text):
    g = load_edge_list(text)
    g2 = load_edge_list(to_edge_list_text(g))
    assert g.structure_equal(g2)


@pytest.mark.parametrize("seed", [3, 4, 5, 6])
def test_round_trip_random(seed):
    g = random_digraph(40, 150, seed=seed)
    g2 = load_edge_list(to_edge_list_text(g))
    assert g.structure_equal(g2)


def test_binary_cache_bit_exact(tmp_path):
    g = random_digraph(25, 100, seed=9)
    path = str(tmp_path / "g.csrcache")
    write_binary_cache(g, path, source_hash=b"abc")
    g2 = read_binary_cache(path, expect_hash=b"abc")
    assert g.structure_equal(g2)
    assert np.array_equal(g.orig_ids, g2.orig_ids)
    with pytest.raises(GraphFormatError):
        read_binary_cache(path, expect_hash=b"other")


def test_load_path_with_cache(tmp_path):
    p = tmp_path / "g.txt"
    p.write_text("0 1\n1 2\n2 0\n")
    g1 = load_edge_list_path(str(p), use_cache=True)
    assert (tmp_path / "g.txt.csrcache").exists()
    g2 = load_edge_list_path(str(p), use_cache=True)  # served from cache
    assert g1.structure_equal(g2)
    # stale cache is rebuilt when the text changes
    p.write_text("0 1\n1 0\n")
    g3 = load_edge_list_path(str(p), use_cache=True)
    assert g3.n == 2
