import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from tridecomp.errors import GraphError
from tridecomp.balance import balance_tripartite, cycle_decompose
from tridecomp.graph import Graph, PartiteView, metrics


def complete_tripartite(n: int) -> tuple[Graph, PartiteView]:
    g = Graph(3 * n)
    parts = tuple(tuple(range(i * n, (i + 1) * n)) for i in range(3))
    for i in range(3):
        for j in range(i + 1, 3):
            for u in parts[i]:
                for v in parts[j]:
                    g.add_edge(u, v)
    return g, PartiteView(g, parts)


def is_balanced(view: PartiteView) -> bool:
    return all(
        view.deg_plus(v) == view.deg_minus(v) for p in view.parts for v in p
    )


def test_already_balanced_zero_deletions():
    g, view = complete_tripartite(4)
    res = balance_tripartite(view)
    assert res.deleted == [] and res.paths == 0


def test_one_missing_edge_restored_with_one_path():
    n = 5
    g, view = complete_tripartite(n)
    # x in V1, y in V2 missing
    g.remove_edge(0, n)
    res = balance_tripartite(view)
    assert res.paths == 1
    assert is_balanced(view)


@pytest.mark.parametrize("seed", range(6))
def test_random_near_complete_30(seed):
    n = 30
    g, view = complete_tripartite(n)
    rng = random.Random(seed)
    removed = rng.sample(g.edges(), 10)
    for e in removed:
        g.remove_edge(*e)
    before = metrics(g, view)
    res = balance_tripartite(view)
    assert is_balanced(view)
    assert len(res.deleted) <= 6 * before.xi * n * n
    assert all(c <= 3 * before.xi * n for c in res.min_degree_drop.values())
    after = metrics(g, view)
    assert after.epsilon == before.epsilon


def test_cycle_decompose_c6():
    g = Graph.from_edges(6, [(i, (i + 1) % 6) for i in range(6)])
    cycles = cycle_decompose(g)
    assert len(cycles) == 1 and len(cycles[0]) == 6
    assert g.edge_count == 0


def test_cycle_decompose_two_triangles_sharing_vertex():
    g = Graph.from_edges(5, [(0, 1), (1, 2), (2, 0), (0, 3), (3, 4), (4, 0)])
    cycles = cycle_decompose(g)
    assert sorted(len(c) for c in cycles) == [3, 3]


def test_cycle_decompose_rejects_odd():
    g = Graph.from_edges(2, [(0, 1)])
    with pytest.raises(GraphError):
        cycle_decompose(g)


@settings(max_examples=40, deadline=None)
@given(st.integers(min_value=0, max_value=10_000))
def test_cycle_decompose_partitions_random_even_graphs(seed):
    # union of random (possibly overlapping) cycles has all-even degrees
    rng = random.Random(seed)
    n = 20
    g = Graph(n)
    for _ in range(rng.randrange(1, 5)):
        k = rng.randrange(3, 9)
        verts = rng.sample(range(n), k)
        for a, b in zip(verts, verts[1:] + verts[:1]):
            if g.has_edge(a, b):
                g.remove_edge(a, b)
            else:
                g.add_edge(a, b)
    # edge toggling keeps all degrees even
    original = set(g.edges())
    count = g.edge_count
    cycles = cycle_decompose(g.copy())
    covered = []
    for c in cycles:
        assert len(c) >= 3
        assert len(set(c)) == len(c)
        for a, b in zip(c, c[1:] + c[:1]):
            covered.append((a, b) if a < b else (b, a))
    assert len(covered) == count
    assert set(covered) == original and len(set(covered)) == len(covered)
