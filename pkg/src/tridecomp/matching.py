"""Bipartite perfect matching, rainbow matchings, and remainder elimination.

The remainder step peels each leftover vertex v: split N(v) into equal
halves, find a perfect matching between the halves, and emit one triangle
per matched pair.  An optional schedule biases which edges the matchings
burn (the pipeline uses this to remove whole triangles, which keeps the
later Latin-square stages sparse).
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

from .errors import GraphError, HallViolationError, PreconditionError
from .graph import Graph, TriangleSet, TenPartition, norm_edge

INF = float("inf")


@dataclass
class Matching:
    edges: list[tuple[int, int]] = field(default_factory=list)

    def vertices(self) -> set[int]:
        out: set[int] = set()
        for u, v in self.edges:
            if u in out or v in out:
                raise GraphError("matching repeats a vertex")
            out.add(u)
            out.add(v)
        return out

    def __len__(self) -> int:
        return len(self.edges)


def _hopcroft_karp(left: list[int], adj: dict[int, list[int]]) -> dict[int, int]:
    """Maximum matching; returns pair_left (partial if no perfect matching)."""
    pair_left: dict[int, int] = {}
    pair_right: dict[int, int] = {}
    dist: dict[int, float] = {}

    def bfs() -> bool:
        q = deque()
        for u in left:
            if u not in pair_left:
                dist[u] = 0
                q.append(u)
            else:
                dist[u] = INF
        found = False
        while q:
            u = q.popleft()
            for w in adj[u]:
                m = pair_right.get(w)
                if m is None:
                    found = True
                elif dist[m] == INF:
                    dist[m] = dist[u] + 1
                    q.append(m)
        return found

    def dfs(u: int) -> bool:
        for w in adj[u]:
            m = pair_right.get(w)
            if m is None or (dist[m] == dist[u] + 1 and dfs(m)):
                pair_left[u] = w
                pair_right[w] = u
                return True
        dist[u] = INF
        return False

    while bfs():
        for u in left:
            if u not in pair_left:
                dfs(u)
    return pair_left


def _hall_witness(left: list[int], adj: dict[int, list[int]], pair_left: dict[int, int]) -> tuple[set[int], set[int]]:
    """Alternating-reachability witness S with |N(S)| < |S| from an
    incomplete maximum matching."""
    pair_right = {w: u for u, w in pair_left.items()}
    frontier = [u for u in left if u not in pair_left]
    s = set(frontier)
    t: set[int] = set()
    queue = deque(frontier)
    while queue:
        u = queue.popleft()
        for w in adj[u]:
            if w in t:
                continue
            t.add(w)
            m = pair_right.get(w)
            if m is not None and m not in s:
                s.add(m)
                queue.append(m)
    return s, t


def perfect_matching(g: Graph, left, right) -> Matching:
    """Perfect matching between two equal-size vertex sets of g.

    Raises HallViolationError with a witness set if none exists.
    """
    left = sorted(left)
    right_set = set(right)
    if len(left) != len(right_set):
        raise GraphError("perfect matching requires equal sides")
    adj = {u: sorted(w for w in g.adj[u] if w in right_set) for u in left}
    pair_left = _hopcroft_karp(left, adj)
    if len(pair_left) < len(left):
        s, t = _hall_witness(left, adj, pair_left)
        raise HallViolationError(s, t)
    return Matching(sorted((u, pair_left[u]) for u in left))


# --- rainbow matching ------------------------------------------------------


@dataclass
class RainbowState:
    matched: list[tuple[int, int]]
    unmatched: list[int]
    colors_used: set[int]


def rainbow_matching(neighborhood: Graph, coloring, active=None) -> Matching:
    """Two-phase rainbow matching on an edge-colored neighborhood graph.

    Phase 1 greedily takes any edge whose color is unused; phase 2 trades a
    matched edge for two fresh-colored edges that also absorb two unmatched
    vertices.  ``coloring`` needs an ``of(x, y) -> color`` method.  ``active``
    restricts the vertex set (defaults to vertices with positive degree).
    """
    if active is None:
        verts = sorted(v for v in neighborhood.vertices() if neighborhood.degree(v) > 0)
    else:
        verts = sorted(active)
    state = RainbowState(matched=[], unmatched=list(verts), colors_used=set())
    in_u = set(verts)

    # phase 1: greedy
    for u in verts:
        if u not in in_u:
            continue
        for w in sorted(neighborhood.adj[u]):
            if w <= u or w not in in_u:
                continue
            c = coloring.of(u, w)
            if c in state.colors_used:
                continue
            state.matched.append((u, w))
            state.colors_used.add(c)
            in_u.discard(u)
            in_u.discard(w)
            break

    # phase 2: exchange until fixpoint
    changed = True
    while changed:
        changed = False
        for idx, (x, y) in enumerate(list(state.matched)):
            hit = None
            for u in sorted(in_u):
                for v in sorted(in_u):
                    if v == u:
                        continue
                    for (a, b) in ((x, y), (y, x)):
                        if not (neighborhood.has_edge(u, a) and neighborhood.has_edge(b, v)):
                            continue
                        c1 = coloring.of(u, a)
                        c2 = coloring.of(b, v)
                        old = coloring.of(x, y)
                        if c1 != c2 and c1 not in state.colors_used and c2 not in state.colors_used:
                            hit = (u, v, a, b, c1, c2, old)
                            break
                    if hit:
                        break
                if hit:
                    break
            if hit:
                u, v, a, b, c1, c2, old = hit
                state.matched[idx] = (u, a) if u < a else (a, u)
                state.matched.append((b, v) if b < v else (v, b))
                state.colors_used.discard(old)
                state.colors_used.update((c1, c2))
                in_u.discard(u)
                in_u.discard(v)
                changed = True
                break

    state.unmatched = sorted(in_u)
    m = Matching(sorted(tuple(sorted(e)) for e in state.matched))
    m.vertices()  # sanity: no repeats
    colors = [coloring.of(*e) for e in m.edges]
    if len(set(colors)) != len(colors):
        raise GraphError("rainbow matching produced a repeated color")
    return m


def rainbow_unmatched(neighborhood: Graph, m: Matching, active=None) -> list[int]:
    if active is None:
        verts = {v for v in neighborhood.vertices() if neighborhood.degree(v) > 0}
    else:
        verts = set(active)
    return sorted(verts - m.vertices())


# --- remainder elimination --------------------------------------------------


@dataclass
class EliminationStep:
    vertex: int
    matched: list[tuple[int, int]]


def split_halves(neighbors: list[int], degree_of, groups=None) -> tuple[list[int], list[int]]:
    """Split into equal halves by descending-degree alternation; when
    ``groups`` maps vertices to class keys, alternation runs inside each
    class so that same-class pairs face each other across the split."""
    ordered = sorted(neighbors, key=lambda v: (-degree_of(v), v))
    n1: list[int] = []
    n2: list[int] = []
    if groups is None:
        for idx, v in enumerate(ordered):
            (n1 if idx % 2 == 0 else n2).append(v)
    else:
        byg: dict = {}
        for v in ordered:
            byg.setdefault(groups(v), []).append(v)
        flip = 0
        for key in sorted(byg):
            for idx, v in enumerate(byg[key]):
                ((n1 if (idx + flip) % 2 == 0 else n2)).append(v)
            flip += len(byg[key]) % 2
    # balance lengths (odd class counts can skew)
    while len(n1) > len(n2):
        n2.append(n1.pop())
    while len(n2) > len(n1):
        n1.append(n2.pop())
    return n1, n2


def eliminate_remainder(
    g: Graph,
    part: TenPartition,
    *,
    scheduler=None,
    strict: bool = False,
    epsilon=None,
) -> tuple[TriangleSet, Graph]:
    """Peel every remainder vertex into triangles; returns (triangles, G').

    The input graph is not modified.  ``scheduler`` (optional) proposes
    forced matching pairs per elimination; anything it cannot place falls
    back to the default split plus Hopcroft-Karp.  With ``strict`` the
    paper-style sufficient condition eps_G <= 1/6 - 70/|V| is enforced
    (it is unsatisfiable below ~420 vertices, so it defaults off and the
    per-step Hall check is the operative guard).
    """
    from fractions import Fraction

    work = g.copy()
    out = TriangleSet()
    if strict and epsilon is not None:
        bound = Fraction(1, 6) - Fraction(70, g.vertex_count)
        if epsilon > bound:
            raise PreconditionError(
                "remainder", "eps_G <= 1/6 - 70/|V|", {"eps_G": epsilon, "bound": bound}
            )
    for v in sorted(part.remainder):
        neighbors = sorted(work.adj[v])
        if len(neighbors) % 2 != 0:
            raise PreconditionError("remainder", "even degree at remainder vertex", {"v": v, "deg": len(neighbors)})
        if not neighbors:
            continue
        forced: list[tuple[int, int]] = []
        if scheduler is not None:
            forced = scheduler.propose(v, neighbors, work)
        pairs = _match_with_forced(work, v, neighbors, forced)
        if scheduler is not None:
            scheduler.commit(v, pairs)
        for x, y in pairs:
            out.add(v, x, y)
            work.remove_edge(x, y)
        for u in neighbors:
            work.remove_edge(v, u)
    return out, work


def _match_with_forced(work: Graph, v: int, neighbors: list[int], forced) -> list[tuple[int, int]]:
    """Perfect matching on N(v) honoring as many forced pairs as possible."""
    forced = list(forced)
    while True:
        used = set()
        ok = True
        for x, y in forced:
            if x in used or y in used or not work.has_edge(x, y):
                ok = False
                break
            used.add(x)
            used.add(y)
        if ok:
            rest = [u for u in neighbors if u not in used]
            try:
                pairs = _default_matching(work, rest)
                return sorted([tuple(sorted(p)) for p in forced] + pairs)
            except HallViolationError:
                ok = False
        if not forced:
            raise HallViolationError(*_final_witness(work, neighbors))
        forced.pop()  # retreat: drop the last forced pair and retry


def _default_matching(work: Graph, rest: list[int]) -> list[tuple[int, int]]:
    if not rest:
        return []
    n1, n2 = split_halves(rest, lambda u: work.degree(u))
    m = perfect_matching(work, n1, n2)
    return [tuple(sorted(e)) for e in m.edges]


def _final_witness(work: Graph, neighbors: list[int]):
    n1, n2 = split_halves(neighbors, lambda u: work.degree(u))
    right = set(n2)
    adj = {u: sorted(w for w in work.adj[u] if w in right) for u in n1}
    pair_left = _hopcroft_karp(n1, adj)
    return _hall_witness(n1, adj, pair_left)
