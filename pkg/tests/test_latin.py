import random

import pytest
from hypothesis import given, settings, strategies as st

from tridecomp.errors import GraphError
from tridecomp.graph import Graph, PartiteView, TriangleSet
from tridecomp.latin import (
    PartialLatinSquare,
    SparsityProfile,
    complete_pls,
    pls_from_tripartite,
    tripartite_from_pls,
)


def complete_tripartite_view(n: int) -> PartiteView:
    g = Graph(3 * n)
    parts = tuple(tuple(range(i * n, (i + 1) * n)) for i in range(3))
    for i in range(3):
        for j in range(i + 1, 3):
            for u in parts[i]:
                for v in parts[j]:
                    g.add_edge(u, v)
    return PartiteView(g, parts)


def test_pls_rejects_row_conflicts():
    with pytest.raises(GraphError):
        PartialLatinSquare(3, {(0, 0): 1, (0, 1): 1})


def test_empty_and_single_triangle():
    view = complete_tripartite_view(3)
    assert pls_from_tripartite(view, TriangleSet()).cells == {}
    ts = TriangleSet([(0, 3, 6)])  # r0, c0, s0
    p = pls_from_tripartite(view, ts)
    assert p.cells == {(0, 0): 0}
    assert tripartite_from_pls(p) == [(0, 0, 0)]


def test_edge_sharing_triangles_rejected():
    view = complete_tripartite_view(3)
    ts = TriangleSet([(0, 3, 6), (0, 3, 7)])  # share the (r0, c0) edge
    with pytest.raises(GraphError):
        pls_from_tripartite(view, ts)


def test_full_triangulation_round_trip():
    n = 5
    view = complete_tripartite_view(n)
    ts = TriangleSet([(r, n + c, 2 * n + (r + c) % n) for r in range(n) for c in range(n)])
    p = pls_from_tripartite(view, ts)
    assert p.is_complete()
    assert tripartite_from_pls(p) == sorted((r, c, (r + c) % n) for r in range(n) for c in range(n))


def test_complete_already_complete():
    n = 4
    cells = {(r, c): (r + c) % n for r in range(n) for c in range(n)}
    p = PartialLatinSquare(n, cells)
    out = complete_pls(p)
    assert out.cells == cells


def test_complete_empty_order_n():
    out = complete_pls(PartialLatinSquare(7, {}))
    assert out.is_complete()


@settings(max_examples=25, deadline=None)
@given(st.integers(min_value=0, max_value=10_000))
def test_complete_extends_sparse_random(seed):
    rng = random.Random(seed)
    n = rng.randrange(6, 15)
    p = PartialLatinSquare(n, {})
    # scatter a few compatible cells
    for _ in range(n // 2):
        r, c = rng.randrange(n), rng.randrange(n)
        if (r, c) in p.cells:
            continue
        taken_r = {p.cells[k] for k in p.cells if k[0] == r}
        taken_c = {p.cells[k] for k in p.cells if k[1] == c}
        free = sorted(set(range(n)) - taken_r - taken_c)
        if free:
            p.cells[(r, c)] = free[0]
    p.validate()
    out = complete_pls(p, seed=seed)
    assert out.is_complete()
    for k, v in p.cells.items():
        assert out.cells[k] == v
    _assert_latin(out)


def _assert_latin(p: PartialLatinSquare) -> None:
    n = p.order
    for r in range(n):
        assert sorted(p.cells[(r, c)] for c in range(n)) == list(range(n))
    for c in range(n):
        assert sorted(p.cells[(r, c)] for r in range(n)) == list(range(n))


def test_sparsity_profile_region():
    # the quadratic contract region is tiny at this order: 3 cells are in,
    # 16 are already out (bound is (1-12/200)^2/10409 * 200^2 ~ 3.4)
    n = 200
    p3 = PartialLatinSquare(n, {(i, i): (2 * i) % n for i in range(3)})
    assert SparsityProfile.of(p3).in_contract_region(n)
    p16 = PartialLatinSquare(n, {(i, i): (2 * i) % n for i in range(16)})
    prof = SparsityProfile.of(p16)
    assert prof.total_fill == 16
    assert not prof.in_contract_region(n)


def test_order_200_sparse_completion():
    rng = random.Random(1)
    n = 200
    p = PartialLatinSquare(n, {})
    while len(p.cells) < 16:
        r, c = rng.randrange(n), rng.randrange(n)
        if (r, c) in p.cells:
            continue
        taken_r = {p.cells[k] for k in p.cells if k[0] == r}
        taken_c = {p.cells[k] for k in p.cells if k[1] == c}
        free = sorted(set(range(n)) - taken_r - taken_c)
        if free:
            p.cells[(r, c)] = rng.choice(free)
    p.validate()
    out = complete_pls(p, seed=1)
    _assert_latin(out)
