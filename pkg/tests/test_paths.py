import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from finact.exceptions import BudgetExceeded
from finact.paths import MaterializedGraph, all_pairs_oracle, bounded_dijkstra, diameter


def z13_model_graph():
    g = MaterializedGraph(13)
    for i in range(13):
        g.add_edge(i, (i + 1) % 13, 2.0)
        g.add_edge(i, (i + 2) % 13, 3.0)
    return g


def naive_floyd(n, edges):
    D = [[0.0 if i == j else math.inf for j in range(n)] for i in range(n)]
    for i, j, w in edges:
        D[i][j] = min(D[i][j], w)
        D[j][i] = min(D[j][i], w)
    for k in range(n):
        for i in range(n):
            for j in range(n):
                if D[i][k] + D[k][j] < D[i][j]:
                    D[i][j] = D[i][k] + D[k][j]
    return D


def test_z13_cycle():
    g = z13_model_graph()
    res = bounded_dijkstra(g, 0)
    oracle = naive_floyd(13, g.edges)
    assert res[2] == 3 and res[1] == 2
    assert [res[j] for j in range(13)] == oracle[0]


def test_bound_zero():
    res = bounded_dijkstra(z13_model_graph(), 4, bound=0)
    assert res.dist == {4: 0.0}


def test_isolated():
    res = bounded_dijkstra(MaterializedGraph(2), 0)
    assert 1 not in res


def test_bound_prunes():
    res = bounded_dijkstra(z13_model_graph(), 0, bound=5)
    assert sorted(res.dist.values()) == [0, 2, 2, 3, 3, 5, 5]


def test_vertex_budget():
    with pytest.raises(BudgetExceeded):
        bounded_dijkstra(z13_model_graph(), 0, max_vertices=4)


def test_parallel_edges_collapse():
    g = MaterializedGraph(2, [(0, 1, 5.0), (1, 0, 2.0), (0, 1, 7.0), (0, 0, 1.0)])
    assert g.edges == [(0, 1, 2.0)]


def test_triangle_oracle():
    g = MaterializedGraph(3, [(0, 1, 1.0), (1, 2, 1.0), (0, 2, 3.0)])
    assert all_pairs_oracle(g)[0, 2] == 2.0


def test_single_vertex():
    g = MaterializedGraph(1)
    assert all_pairs_oracle(g).tolist() == [[0.0]]
    assert diameter(g) == 0.0


def test_two_vertices():
    assert diameter(MaterializedGraph(2, [(0, 1, 5.0)])) == 5.0


def test_z13_diameter():
    g = z13_model_graph()
    assert diameter(g) == max(max(row) for row in naive_floyd(13, g.edges)) == 9.0


def test_oracle_matches_dijkstra_rows():
    g = z13_model_graph()
    D = all_pairs_oracle(g)
    for s in range(13):
        res = bounded_dijkstra(g, s)
        assert np.max(np.abs(D[s] - [res[j] for j in range(13)])) <= 1e-12


def test_unreachable_inf():
    D = all_pairs_oracle(MaterializedGraph(3, [(0, 1, 1.0)]))
    assert math.isinf(D[0, 2])
    assert diameter(MaterializedGraph(3, [(0, 1, 1.0)]), component=2) == 0.0


def test_all_pairs_cap():
    with pytest.raises(BudgetExceeded):
        all_pairs_oracle(MaterializedGraph(10), cap=5)


def test_path_reconstruction():
    g = MaterializedGraph(4, [(0, 1, 1.0, "a"), (1, 2, 1.0, "b"), (2, 3, 1.0, "c"), (0, 3, 10.0, "d")])
    res = bounded_dijkstra(g, 0)
    assert [lab for _, _, lab in res.path_to(3)] == ["a", "b", "c"]


edge_lists = st.lists(
    st.tuples(st.integers(0, 9), st.integers(0, 9), st.floats(0.1, 10, allow_nan=False)),
    min_size=1, max_size=40)


@settings(max_examples=60, deadline=None)
@given(edges=edge_lists)
def test_random_graphs_metric(edges):
    g = MaterializedGraph(10, edges)
    D = all_pairs_oracle(g)
    assert np.array_equal(D, D.T)
    via = D[:, :, None] + D[None, :, :]          # via[i, j, l] = D[i, j] + D[j, l]
    fin = np.isfinite(via)
    assert np.all((D[:, None, :] <= via + 1e-9) | ~fin)
    naive = np.array(naive_floyd(10, g.edges))
    assert np.allclose(D, naive, rtol=0, atol=1e-12)
    for s in range(10):
        res = bounded_dijkstra(g, s)
        row = np.array([res.get(j, math.inf) for j in range(10)])
        assert np.allclose(row, D[s], rtol=0, atol=1e-12)
