"""Graph substrate: adjacency-set graphs, partite views, density metrics.

Vertices are dense integers 0..N-1.  All density quantities (epsilon, xi)
are exact :class:`fractions.Fraction` values so that downstream inequality
checks never suffer rounding.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import GraphError, MetricsError, PartitionError

Edge = tuple[int, int]


def norm_edge(u: int, v: int) -> Edge:
    """Normalized (u, v) with u < v."""
    if u == v:
        raise GraphError(f"self-loop at vertex {u}")
    return (u, v) if u < v else (v, u)


class Graph:
    """Undirected simple graph with maintained adjacency sets."""

    __slots__ = ("vertex_count", "adj", "edge_count")

    def __init__(self, vertex_count: int):
        if vertex_count < 0:
            raise GraphError("negative vertex count")
        self.vertex_count = vertex_count
        self.adj: list[set[int]] = [set() for _ in range(vertex_count)]
        self.edge_count = 0

    @classmethod
    def from_edges(cls, vertex_count: int, edges) -> "Graph":
        g = cls(vertex_count)
        for u, v in edges:
            g.add_edge(u, v)
        return g

    @classmethod
    def complete(cls, n: int) -> "Graph":
        g = cls(n)
        for u in range(n):
            for v in range(u + 1, n):
                g.add_edge(u, v)
        return g

    def _check_vertex(self, v: int) -> None:
        if not 0 <= v < self.vertex_count:
            raise GraphError(f"vertex {v} out of range 0..{self.vertex_count - 1}")

    def add_edge(self, u: int, v: int) -> None:
        u, v = norm_edge(u, v)
        self._check_vertex(u)
        self._check_vertex(v)
        if v in self.adj[u]:
            raise GraphError(f"duplicate edge ({u}, {v})")
        self.adj[u].add(v)
        self.adj[v].add(u)
        self.edge_count += 1

    def remove_edge(self, u: int, v: int) -> None:
        u, v = norm_edge(u, v)
        if v not in self.adj[u]:
            raise GraphError(f"edge ({u}, {v}) not present")
        self.adj[u].remove(v)
        self.adj[v].remove(u)
        self.edge_count -= 1

    def has_edge(self, u: int, v: int) -> bool:
        if u == v:
            return False
        return v in self.adj[u]

    def degree(self, v: int) -> int:
        return len(self.adj[v])

    def neighbors(self, v: int) -> set[int]:
        return self.adj[v]

    def edges(self) -> list[Edge]:
        """All edges, sorted (deterministic)."""
        out = []
        for u in range(self.vertex_count):
            for v in self.adj[u]:
                if v > u:
                    out.append((u, v))
        out.sort()
        return out

    def copy(self) -> "Graph":
        g = Graph(self.vertex_count)
        g.adj = [set(s) for s in self.adj]
        g.edge_count = self.edge_count
        return g

    def vertices(self) -> range:
        return range(self.vertex_count)

    def __repr__(self) -> str:  # pragma: no cover
        return f"Graph(n={self.vertex_count}, m={self.edge_count})"


def is_tridivisible(g: Graph) -> bool:
    """True iff every degree is even and the edge count is a multiple of 3."""
    if g.edge_count % 3 != 0:
        return False
    return all(len(g.adj[v]) % 2 == 0 for v in range(g.vertex_count))


MODES = ("whole", "bipartite", "tripartite", "nine-partite")
_MODE_BY_PARTS = {1: "whole", 2: "bipartite", 3: "tripartite", 9: "nine-partite"}


class PartiteView:
    """A graph together with an ordered tuple of disjoint vertex parts.

    With one part the view is "whole" (the induced subgraph on that part);
    with 2, 3 or 9 equal-size parts only cross-part edges are considered.
    """

    def __init__(self, base: Graph, parts):
        parts = tuple(tuple(sorted(p)) for p in parts)
        if len(parts) not in _MODE_BY_PARTS:
            raise GraphError(f"unsupported number of parts: {len(parts)}")
        seen: set[int] = set()
        for p in parts:
            for v in p:
                base._check_vertex(v)
                if v in seen:
                    raise GraphError(f"vertex {v} appears in two parts")
                seen.add(v)
        self.base = base
        self.parts = parts
        self.mode = _MODE_BY_PARTS[len(parts)]
        self.part_of: dict[int, int] = {}
        for i, p in enumerate(parts):
            for v in p:
                self.part_of[v] = i

    def cross_degree(self, v: int, j: int) -> int:
        """Number of edges from v into part j."""
        pj = set(self.parts[j])
        return sum(1 for w in self.base.adj[v] if w in pj)

    def deg_plus(self, v: int) -> int:
        """Tripartite only: edges from v to the next part (indices mod 3)."""
        if self.mode != "tripartite":
            raise GraphError("deg_plus defined for tripartite views only")
        return self.cross_degree(v, (self.part_of[v] + 1) % 3)

    def deg_minus(self, v: int) -> int:
        if self.mode != "tripartite":
            raise GraphError("deg_minus defined for tripartite views only")
        return self.cross_degree(v, (self.part_of[v] - 1) % 3)


@dataclass(frozen=True)
class MetricsEntry:
    """One ledger row: exact (epsilon, xi) for a labelled subgraph."""

    label: str
    stage: str
    mode: str
    part_size: int
    num_parts: int
    edge_count: int
    delta: int
    epsilon: Fraction
    xi: Fraction


def metrics(g: Graph, view: PartiteView, label: str = "", stage: str = "") -> MetricsEntry:
    """Exact (epsilon, xi) for the view, per the defining equations.

    whole mode on k vertices:    |E| = C(k,2) - xi*k^2,  delta = (1-eps)*k
    m-partite, parts of size k:  |E| = C(m,2)*k^2 - xi*k^2, delta = min cross-part degree
    """
    for p in view.parts:
        if not p:
            raise MetricsError("metrics undefined: empty part")
    if view.mode == "whole":
        part = view.parts[0]
        k = len(part)
        pset = set(part)
        m2 = 0
        delta = None
        for v in part:
            d = sum(1 for w in g.adj[v] if w in pset)
            m2 += d
            delta = d if delta is None else min(delta, d)
        edge_count = m2 // 2
        xi = Fraction(k * (k - 1) // 2 - edge_count, k * k)
        eps = Fraction(1) - Fraction(delta, k)
        return MetricsEntry(label, stage, view.mode, k, 1, edge_count, delta, eps, xi)

    sizes = {len(p) for p in view.parts}
    if len(sizes) != 1:
        raise MetricsError("partite metrics require equal part sizes")
    k = sizes.pop()
    m = len(view.parts)
    edge_count = 0
    delta = None
    for i, p in enumerate(view.parts):
        for v in p:
            for j in range(m):
                if j == i:
                    continue
                d = view.cross_degree(v, j)
                if j > i:
                    edge_count += d
                delta = d if delta is None else min(delta, d)
    xi = Fraction((m * (m - 1) // 2) * k * k - edge_count, k * k)
    eps = Fraction(1) - Fraction(delta, k)
    return MetricsEntry(label, stage, view.mode, k, m, edge_count, delta, eps, xi)


@dataclass
class BoundCheck:
    """lhs <= a + b*sqrt(c), checked exactly; kind 'bound' must hold, 'guard'
    is a sufficient condition that is merely recorded at desk scale."""

    stage: str
    name: str
    kind: str
    lhs: Fraction
    a: Fraction
    b: Fraction = Fraction(0)
    c: Fraction = Fraction(0)
    ok: bool = field(init=False)

    def __post_init__(self):
        self.ok = _holds(self.lhs, self.a, self.b, self.c)

    def rhs_str(self) -> str:
        if self.b == 0:
            return _frac(self.a)
        return f"{_frac(self.a)}+{_frac(self.b)}*sqrt({_frac(self.c)})"


def _holds(lhs: Fraction, a: Fraction, b: Fraction, c: Fraction) -> bool:
    t = lhs - a
    if t <= 0:
        return True
    if b <= 0:
        return False
    return t * t <= b * b * c


def _frac(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}" if x.denominator != 1 else str(x.numerator)


class DensityLedger:
    """Per-stage (epsilon, xi) entries plus exact inequality checks."""

    def __init__(self):
        self.entries: list[MetricsEntry] = []
        self.checks: list[BoundCheck] = []

    def add(self, entry: MetricsEntry) -> MetricsEntry:
        self.entries.append(entry)
        return entry

    def check(self, stage: str, name: str, lhs: Fraction, a, b=0, c=0, kind: str = "bound") -> BoundCheck:
        bc = BoundCheck(stage, name, kind, Fraction(lhs), Fraction(a), Fraction(b), Fraction(c))
        self.checks.append(bc)
        return bc

    def violated_bounds(self) -> list[BoundCheck]:
        return [c for c in self.checks if c.kind == "bound" and not c.ok]

    def violated_guards(self) -> list[BoundCheck]:
        return [c for c in self.checks if c.kind == "guard" and not c.ok]

    def report_lines(self) -> list[str]:
        lines = []
        for e in self.entries:
            lines.append(
                f"metric {e.stage} {e.label} mode={e.mode} k={e.part_size} m={e.num_parts} "
                f"edges={e.edge_count} delta={e.delta} eps={_frac(e.epsilon)} xi={_frac(e.xi)}"
            )
        for c in self.checks:
            status = "ok" if c.ok else "VIOLATED"
            lines.append(f"{c.kind} {c.stage} {c.name} lhs={_frac(c.lhs)} rhs={c.rhs_str()} {status}")
        return lines


class TriangleSet:
    """An ordered collection of vertex triples claiming edge-disjointness."""

    def __init__(self, triangles=()):
        self.triangles: list[tuple[int, int, int]] = [tuple(sorted(t)) for t in triangles]

    def add(self, a: int, b: int, c: int) -> None:
        t = tuple(sorted((a, b, c)))
        if len(set(t)) != 3:
            raise GraphError(f"degenerate triangle {t}")
        self.triangles.append(t)

    def extend(self, other: "TriangleSet") -> None:
        self.triangles.extend(other.triangles)

    def __len__(self) -> int:
        return len(self.triangles)

    def __iter__(self):
        return iter(self.triangles)

    def edge_list(self) -> list[Edge]:
        out = []
        for a, b, c in self.triangles:
            out.extend(((a, b), (a, c), (b, c)))
        return out

    def validate_against(self, g: Graph) -> list[str]:
        """Violation records: every edge must exist and be used only once."""
        problems = []
        seen: set[Edge] = set()
        for t in self.triangles:
            a, b, c = t
            for e in ((a, b), (a, c), (b, c)):
                if not g.has_edge(*e):
                    problems.append(f"missing-edge triangle={t} edge={e}")
                if e in seen:
                    problems.append(f"reused-edge triangle={t} edge={e}")
                seen.add(e)
        return problems


# --- ten-part split -------------------------------------------------------

#: remainder may not exceed this (paper splits off at most 35 leftover vertices)
MAX_REMAINDER = 35


def admissible_split(total: int) -> tuple[int, int]:
    """Maximal n >= 7 with n = 1,3 (mod 6) and 0 <= total - 9n <= MAX_REMAINDER."""
    best = None
    for n in range(total // 9, 6, -1):
        if n % 6 in (1, 3) and 0 <= total - 9 * n <= MAX_REMAINDER:
            best = n
            break
    if best is None:
        raise PartitionError(f"no admissible (n, r) split for {total} vertices")
    return best, total - 9 * best


@dataclass
class TenPartition:
    """The ten-part vertex split: nine blocks of size n plus a remainder."""

    n: int
    blocks: tuple[tuple[tuple[int, ...], ...], ...]  # blocks[i][j], each sorted
    remainder: tuple[int, ...]
    part_of: dict[int, int] = field(default_factory=dict, repr=False)
    block_of: dict[int, tuple[int, int]] = field(default_factory=dict, repr=False)

    def __post_init__(self):
        for i in range(3):
            for j in range(3):
                for v in self.blocks[i][j]:
                    self.part_of[v] = i
                    self.block_of[v] = (i, j)

    def part(self, i: int) -> tuple[int, ...]:
        return tuple(sorted(v for j in range(3) for v in self.blocks[i][j]))

    def active_vertices(self) -> tuple[int, ...]:
        return tuple(sorted(self.part_of))

    def tripartite_view(self, g: Graph) -> PartiteView:
        return PartiteView(g, (self.part(0), self.part(1), self.part(2)))

    def part_tripartite_view(self, g: Graph, i: int) -> PartiteView:
        return PartiteView(g, self.blocks[i])

    def block_view(self, g: Graph, i: int, j: int) -> PartiteView:
        return PartiteView(g, (self.blocks[i][j],))

    def nine_view(self, g: Graph) -> PartiteView:
        return PartiteView(g, tuple(self.blocks[i][j] for i in range(3) for j in range(3)))


def partition_vertices(g: Graph, seed: int) -> TenPartition:
    """Seed-deterministic shuffle into nine blocks of size n plus remainder."""
    n, r = admissible_split(g.vertex_count)
    order = list(range(g.vertex_count))
    random.Random(seed).shuffle(order)
    blocks = []
    pos = 0
    for _i in range(3):
        row = []
        for _j in range(3):
            row.append(tuple(sorted(order[pos:pos + n])))
            pos += n
        blocks.append(tuple(row))
    remainder = tuple(sorted(order[pos:]))
    assert len(remainder) == r
    return TenPartition(n=n, blocks=tuple(blocks), remainder=remainder)
