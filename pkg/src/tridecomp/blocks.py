"""Near-triangulation of a dense block: STS template plus rainbow repairs.

A Steiner triple system on the block's vertex count is filtered down to
the triples fully present in the block; vertices whose covered degree lags
far behind are then repaired one at a time with rainbow matchings in their
neighborhoods (star re-centering).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import SteinerError
from .graph import Graph, PartiteView, TriangleSet, metrics, norm_edge
from .matching import rainbow_matching
from .steiner import build_sts, induced_coloring


@dataclass
class RepairStats:
    vertex: int
    deleted: int
    added: int
    max_degree_drop: int


@dataclass
class NearTriangulation:
    covered: TriangleSet
    leftover: Graph
    repairs: list[RepairStats]
    epsilon_h: Fraction
    xi_h: Fraction
    epsilon_r: Fraction


def repair_rounds(n: int, xi_h: Fraction) -> int:
    """ceil(gamma*n) - 1 rounds with gamma = sqrt(xi_h / 3), computed exactly."""
    if xi_h == 0:
        return 0
    # gamma*n = sqrt(n^2 * xi / 3); smallest k with k^2 * den >= num
    num = n * n * xi_h.numerator
    den = 3 * xi_h.denominator
    k = math.isqrt(num // den)
    while k * k * den < num:
        k += 1
    return max(0, k - 1)


def near_triangulate(h: Graph) -> NearTriangulation:
    """Cover almost all edges of h with edge-disjoint triangles.

    Requires h.vertex_count = 1 or 3 (mod 6).  Returns the triangle set,
    the leftover graph, and the exact metrics used by the quality bounds
    eps_R < eps_H + 4*sqrt(3 xi_H) and |leftover| <= (2 xi_H + sqrt(3 xi_H)) n^2.
    """
    n = h.vertex_count
    if n % 6 not in (1, 3):
        raise SteinerError(f"block size {n} not congruent to 1 or 3 mod 6")
    entry = metrics(h, PartiteView(h, (tuple(range(n)),)))
    system = build_sts(n)
    coloring = induced_coloring(system)

    owner: dict[tuple[int, int], tuple[int, int, int]] = {}
    triangles: set[tuple[int, int, int]] = set()

    def tri_edges(t):
        a, b, c = t
        return ((a, b), (a, c), (b, c))

    def add_triangle(t) -> None:
        triangles.add(t)
        for e in tri_edges(t):
            owner[e] = t

    def drop_triangle(t) -> None:
        triangles.discard(t)
        for e in tri_edges(t):
            owner.pop(e, None)

    for t in system.triples:
        if all(h.has_edge(*e) for e in tri_edges(t)):
            add_triangle(t)

    deg_r = [0] * n
    for t in triangles:
        for v in t:
            deg_r[v] += 2

    repairs: list[RepairStats] = []
    for _ in range(repair_rounds(n, entry.xi)):
        v = max(range(n), key=lambda u: (h.degree(u) - deg_r[u], -u))
        if h.degree(v) - deg_r[v] <= 0:
            break
        nbrs = sorted(h.adj[v])
        sub = Graph(n)
        nbr_set = set(nbrs)
        for x in nbrs:
            for y in h.adj[x]:
                if y > x and y in nbr_set:
                    sub.add_edge(x, y)
        m = rainbow_matching(sub, coloring, active=nbrs)

        doomed: set[tuple[int, int, int]] = set()
        for e in m.edges:
            t = owner.get(norm_edge(*e))
            if t is not None:
                doomed.add(t)
        for t in list(triangles):
            if v in t:
                doomed.add(t)
        drop_per_vertex: dict[int, int] = {}
        for t in doomed:
            drop_triangle(t)
            for u in t:
                deg_r[u] -= 2
                drop_per_vertex[u] = drop_per_vertex.get(u, 0) + 2
        added = 0
        for x, y in m.edges:
            t = tuple(sorted((v, x, y)))
            add_triangle(t)
            for u in t:
                deg_r[u] += 2
            added += 1
        repairs.append(
            RepairStats(
                vertex=v,
                deleted=len(doomed),
                added=added,
                max_degree_drop=max(drop_per_vertex.values(), default=0),
            )
        )

    covered = TriangleSet(sorted(triangles))
    leftover = h.copy()
    for t in covered:
        for e in tri_edges(t):
            leftover.remove_edge(*e)
    delta_r = min(deg_r[v] for v in range(n))
    eps_r = Fraction(1) - Fraction(delta_r, n)
    return NearTriangulation(
        covered=covered,
        leftover=leftover,
        repairs=repairs,
        epsilon_h=entry.epsilon,
        xi_h=entry.xi,
        epsilon_r=eps_r,
    )
