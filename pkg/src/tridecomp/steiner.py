"""Steiner triple systems S(2,3,n) and the induced proper edge coloring.

Direct constructions: Bose for n = 3 (mod 6), Skolem for n = 1 (mod 6),
both via commutative quasigroups on Z_m (no search).
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import SteinerError

Triple = tuple[int, int, int]


@dataclass(frozen=True)
class SteinerSystem:
    order: int
    triples: tuple[Triple, ...]


def _bose(n: int) -> list[Triple]:
    # points (x, i) -> 3x + i for x in Z_m, i in {0,1,2}
    m = n // 3
    inv2 = pow(2, -1, m)  # m odd

    def pt(x: int, i: int) -> int:
        return 3 * x + i

    triples = [(pt(x, 0), pt(x, 1), pt(x, 2)) for x in range(m)]
    for i in range(3):
        for x in range(m):
            for y in range(x + 1, m):
                z = ((x + y) * inv2) % m
                triples.append((pt(x, i), pt(y, i), pt(z, (i + 1) % 3)))
    return triples


def _skolem(n: int) -> list[Triple]:
    # points: infinity = n-1, plus (x, i) -> 3x + i for x in Z_2t
    t = (n - 1) // 6
    m = 2 * t
    inf = n - 1

    def pt(x: int, i: int) -> int:
        return 3 * x + i

    def mul(x: int, y: int) -> int:
        # half-idempotent commutative quasigroup on Z_2t
        s = (x + y) % m
        return s // 2 if s % 2 == 0 else (s - 1) // 2 + t

    triples: list[Triple] = [(pt(x, 0), pt(x, 1), pt(x, 2)) for x in range(t)]
    for i in range(3):
        for x in range(t, m):
            triples.append((inf, pt(x, i), pt(x - t, (i + 1) % 3)))
    for i in range(3):
        for x in range(m):
            for y in range(x + 1, m):
                triples.append((pt(x, i), pt(y, i), pt(mul(x, y), (i + 1) % 3)))
    return triples


def build_sts(n: int) -> SteinerSystem:
    """Steiner triple system of order n (n = 1 or 3 mod 6, n >= 3)."""
    if n < 3 or n % 6 not in (1, 3):
        raise SteinerError(f"no Steiner triple system of order {n}")
    if n == 3:
        raw = [(0, 1, 2)]
    elif n % 6 == 3:
        raw = _bose(n)
    else:
        raw = _skolem(n)
    triples = tuple(sorted(tuple(sorted(t)) for t in raw))
    return SteinerSystem(order=n, triples=triples)


@dataclass(frozen=True)
class KirkmanColoring:
    """Proper n-edge-coloring of K_n where color i marks the edges {x,y}
    whose system triple is {i, x, y}; class i is a perfect matching on
    the points other than i."""

    order: int
    color: dict[tuple[int, int], int]

    def of(self, x: int, y: int) -> int:
        return self.color[(x, y) if x < y else (y, x)]

    def classes(self) -> dict[int, list[tuple[int, int]]]:
        out: dict[int, list[tuple[int, int]]] = {i: [] for i in range(self.order)}
        for e, i in self.color.items():
            out[i].append(e)
        for i in out:
            out[i].sort()
        return out


def induced_coloring(system: SteinerSystem) -> KirkmanColoring:
    color: dict[tuple[int, int], int] = {}
    for a, b, c in system.triples:
        color[(b, c)] = a
        color[(a, c)] = b
        color[(a, b)] = c
    return KirkmanColoring(order=system.order, color=color)
