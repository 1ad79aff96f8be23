from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from tridecomp.errors import GraphError, MetricsError, PartitionError
from tridecomp.graph import (
    Graph,
    PartiteView,
    TenPartition,
    TriangleSet,
    admissible_split,
    is_tridivisible,
    metrics,
    partition_vertices,
)


def cycle_graph(n: int) -> Graph:
    return Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def test_no_self_loops_or_duplicates():
    g = Graph(3)
    with pytest.raises(GraphError):
        g.add_edge(1, 1)
    g.add_edge(0, 1)
    with pytest.raises(GraphError):
        g.add_edge(1, 0)


def test_tridivisible_examples():
    assert is_tridivisible(Graph.complete(7))  # degrees 6, 21 edges
    assert is_tridivisible(cycle_graph(6))  # tridivisible yet non-decomposable
    assert not is_tridivisible(Graph.complete(4))  # odd degrees


def test_metrics_whole_k9():
    g = Graph.complete(9)
    e = metrics(g, PartiteView(g, (tuple(range(9)),)))
    assert e.epsilon == Fraction(1, 9)
    assert e.xi == 0


def test_metrics_k9_minus_edge():
    g = Graph.complete(9)
    g.remove_edge(0, 1)
    e = metrics(g, PartiteView(g, (tuple(range(9)),)))
    # solve C(9,2) - xi*81 = 35
    assert e.xi == Fraction(1, 81)


def complete_tripartite(n: int) -> tuple[Graph, PartiteView]:
    g = Graph(3 * n)
    parts = tuple(tuple(range(i * n, (i + 1) * n)) for i in range(3))
    for i in range(3):
        for j in range(i + 1, 3):
            for u in parts[i]:
                for v in parts[j]:
                    g.add_edge(u, v)
    return g, PartiteView(g, parts)


def test_metrics_complete_tripartite():
    g, view = complete_tripartite(3)
    e = metrics(g, view)
    assert e.epsilon == 0 and e.xi == 0


def test_metrics_empty_part_errors():
    g = Graph(4)
    with pytest.raises(MetricsError):
        metrics(g, PartiteView(g, ((0, 1), ())))


@given(st.integers(min_value=2, max_value=12), st.integers(min_value=0, max_value=1000))
def test_complement_xi_identity(k, seed):
    import random

    rng = random.Random(seed)
    g = Graph(k)
    for u in range(k):
        for v in range(u + 1, k):
            if rng.random() < 0.5:
                g.add_edge(u, v)
    view = PartiteView(g, (tuple(range(k)),))
    comp = Graph(k)
    for u in range(k):
        for v in range(u + 1, k):
            if not g.has_edge(u, v):
                comp.add_edge(u, v)
    e = metrics(g, view)
    ec = metrics(comp, PartiteView(comp, (tuple(range(k)),)))
    assert e.xi + ec.xi == Fraction(k * (k - 1) // 2, k * k)


def test_admissible_split_examples():
    assert admissible_split(100) == (9, 19)
    assert admissible_split(63) == (7, 0)
    assert admissible_split(120) == (13, 3)
    with pytest.raises(PartitionError):
        admissible_split(62)


def test_partition_examples():
    g = Graph(100)
    p = partition_vertices(g, seed=7)
    assert p.n == 9 and len(p.remainder) == 19
    sizes = [len(p.blocks[i][j]) for i in range(3) for j in range(3)]
    assert sizes == [9] * 9


@given(st.integers(min_value=63, max_value=220), st.integers(min_value=0, max_value=50))
def test_partition_is_seed_deterministic_and_exact(total, seed):
    try:
        admissible_split(total)
    except PartitionError:
        return
    g = Graph(total)
    p1 = partition_vertices(g, seed)
    p2 = partition_vertices(g, seed)
    assert p1.blocks == p2.blocks and p1.remainder == p2.remainder
    everything = sorted(
        v for i in range(3) for j in range(3) for v in p1.blocks[i][j]
    ) + list(p1.remainder)
    assert sorted(everything) == list(range(total))


def test_triangle_set_validation():
    g = Graph.complete(4)
    ts = TriangleSet([(0, 1, 2), (0, 1, 3)])
    problems = ts.validate_against(g)
    assert any("reused-edge" in p for p in problems)
    ok = TriangleSet([(0, 1, 2)])
    assert ok.validate_against(g) == []
    assert len(ok.edge_list()) == 3 * len(ok)
