from itertools import combinations

import pytest

from tridecomp.errors import SteinerError
from tridecomp.steiner import build_sts, induced_coloring


def pair_coverage_ok(system) -> bool:
    seen = set()
    for t in system.triples:
        for p in combinations(t, 2):
            if p in seen:
                return False
            seen.add(p)
    return len(seen) == system.order * (system.order - 1) // 2


def test_order_3():
    assert build_sts(3).triples == ((0, 1, 2),)


def test_order_7():
    s = build_sts(7)
    assert len(s.triples) == 7
    assert pair_coverage_ok(s)


def test_order_9_pair_coverage():
    s = build_sts(9)
    assert len(s.triples) == 12
    assert pair_coverage_ok(s)


@pytest.mark.parametrize("n", [13, 15, 19, 21, 25, 27])
def test_mid_orders(n):
    s = build_sts(n)
    assert len(s.triples) == n * (n - 1) // 6
    assert pair_coverage_ok(s)


def test_invalid_orders():
    for n in (2, 4, 5, 6, 8, 11):
        with pytest.raises(SteinerError):
            build_sts(n)


def test_coloring_order_3():
    c = induced_coloring(build_sts(3))
    assert c.of(1, 2) == 0 and c.of(0, 2) == 1 and c.of(0, 1) == 2


@pytest.mark.parametrize("n", [7, 9, 13])
def test_coloring_classes_are_matchings(n):
    c = induced_coloring(build_sts(n))
    classes = c.classes()
    for i, edges in classes.items():
        assert len(edges) == (n - 1) // 2
        touched = [v for e in edges for v in e]
        assert len(touched) == len(set(touched))
        assert i not in touched


@pytest.mark.parametrize("n", [7, 9, 13])
def test_coloring_is_proper(n):
    c = induced_coloring(build_sts(n))
    at_vertex: dict[int, set[int]] = {v: set() for v in range(n)}
    for (x, y), col in c.color.items():
        assert col not in at_vertex[x] and col not in at_vertex[y]
        at_vertex[x].add(col)
        at_vertex[y].add(col)
