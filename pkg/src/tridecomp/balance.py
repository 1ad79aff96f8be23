"""Tripartite degree balancing and cycle decomposition of even graphs.

Balancing deletes short positively-oriented paths (edges always go from
part i to part i+1, mod 3) from a surplus vertex to a deficit vertex until
deg_plus(v) = deg_minus(v) everywhere.  Path shape is forced by the part
offset: offset 1 uses a direct edge (falling back to a 4-path when the
edge is absent), offset 2 a 2-path, offset 0 a 3-path.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .errors import GraphError, PreconditionError, TradeError
from .graph import Graph, PartiteView, metrics


@dataclass
class BalanceResult:
    deleted: list[tuple[int, int]]
    paths: int
    #: edges removed at each vertex (both endpoints counted)
    per_vertex: dict[int, int] = field(default_factory=dict)
    #: drop of min(deg_plus, deg_minus) per vertex; this is the quantity the
    #: per-vertex 3*xi*n budget constrains (surplus/deficit endpoints lose
    #: only their longer side, so only intermediate duty lowers the min)
    min_degree_drop: dict[int, int] = field(default_factory=dict)


def balance_tripartite(view: PartiteView, *, strict: bool = False) -> BalanceResult:
    """Delete positively-oriented paths until deg+ = deg- at every vertex.

    Mutates the underlying graph; returns the deleted edges.  ``strict``
    enforces the sufficient conditions eps < 1/12 and xi < eps/6 (recorded
    but not required for the procedure to run on denser-damage inputs).
    """
    if view.mode != "tripartite":
        raise GraphError("balance_tripartite needs a tripartite view")
    g = view.base
    if strict:
        entry = metrics(g, view)
        if not (entry.epsilon < Fraction(1, 12) and entry.xi < entry.epsilon / 6):
            raise PreconditionError(
                "balance", "eps < 1/12 and xi < eps/6",
                {"eps": entry.epsilon, "xi": entry.xi},
            )

    diff: dict[int, int] = {}
    min0: dict[int, int] = {}
    for p in view.parts:
        for v in p:
            dp, dm = view.deg_plus(v), view.deg_minus(v)
            diff[v] = dp - dm
            min0[v] = min(dp, dm)

    result = BalanceResult(deleted=[], paths=0)

    def delete(u: int, w: int) -> None:
        g.remove_edge(u, w)
        e = (u, w) if u < w else (w, u)
        result.deleted.append(e)
        result.per_vertex[u] = result.per_vertex.get(u, 0) + 1
        result.per_vertex[w] = result.per_vertex.get(w, 0) + 1

    def rank(v: int) -> tuple[int, int]:
        return (-min(view.deg_plus(v), view.deg_minus(v)), v)

    def pick_next(cur: int, target_part: int, last: bool, y: int, used: set[int]):
        cands = []
        for w in g.adj[cur]:
            if view.part_of.get(w) != target_part or w in used:
                continue
            if last and not g.has_edge(w, y):
                continue
            cands.append(w)
        if not cands:
            raise TradeError(
                f"balance: no intermediate vertex in part {target_part} "
                f"(density too low along {cur}->{y})"
            )
        return min(cands, key=rank)

    while True:
        surplus = [v for v, d in diff.items() if d > 0]
        if not surplus:
            break
        x = max(surplus, key=lambda v: (diff[v], -v))
        y = min((v for v, d in diff.items() if d < 0), key=lambda v: (diff[v], v))
        px, py = view.part_of[x], view.part_of[y]
        offset = (py - px) % 3
        if offset == 1 and g.has_edge(x, y):
            delete(x, y)
        else:
            length = {1: 4, 2: 2, 0: 3}[offset]
            used = {x, y}
            path = [x]
            cur = x
            for step in range(1, length):
                target = (px + step) % 3
                w = pick_next(cur, target, step == length - 1, y, used)
                used.add(w)
                path.append(w)
                cur = w
            path.append(y)
            for a, b in zip(path, path[1:]):
                delete(a, b)
        diff[x] -= 1
        diff[y] += 1
        result.paths += 1
    for v, m0 in min0.items():
        drop = m0 - min(view.deg_plus(v), view.deg_minus(v))
        if drop > 0:
            result.min_degree_drop[v] = drop
    return result


def cycle_decompose(g: Graph) -> list[list[int]]:
    """Split an all-even-degree graph into edge-disjoint simple cycles.

    Consumes g's edges; cycles are vertex lists of length >= 3.
    """
    for v in g.vertices():
        if g.degree(v) % 2 != 0:
            raise GraphError(f"cycle decomposition needs even degrees (vertex {v})")
    cycles: list[list[int]] = []
    for start in g.vertices():
        while g.degree(start) > 0:
            path = [start]
            index = {start: 0}
            cur = start
            while True:
                nxt = min(g.adj[cur])
                g.remove_edge(cur, nxt)
                if nxt in index:
                    # splice the closed cycle out; the walk resumes at nxt
                    cycles.append(path[index[nxt]:])
                    for w in path[index[nxt] + 1:]:
                        del index[w]
                    del path[index[nxt] + 1:]
                    cur = nxt
                    if cur == start and g.degree(start) == 0:
                        break
                else:
                    path.append(nxt)
                    index[nxt] = len(path) - 1
                    cur = nxt
    return cycles
