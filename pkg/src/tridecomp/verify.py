"""Independent validation: decomposition checking and brute-force oracles."""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import SizeCapError
from .graph import Graph, TriangleSet


@dataclass
class CheckReport:
    ok: bool
    violations: list[str] = field(default_factory=list)

    def lines(self) -> list[str]:
        return self.violations if self.violations else ["ok"]


def check_decomposition(g: Graph, ts: TriangleSet) -> CheckReport:
    """True iff the triangles partition E(g) exactly; report lists violations."""
    violations: list[str] = []
    seen: set[tuple[int, int]] = set()
    for t in ts:
        a, b, c = t
        for e in ((a, b), (a, c), (b, c)):
            if not g.has_edge(*e):
                violations.append(f"missing-edge triangle={t} edge={e}")
            if e in seen:
                violations.append(f"reused-edge triangle={t} edge={e}")
            seen.add(e)
    if len(seen) < g.edge_count and len(violations) < 1000:
        for e in g.edges():
            if e not in seen:
                violations.append(f"uncovered-edge edge={e}")
    return CheckReport(ok=not violations, violations=violations)


@dataclass
class ProofOfNone:
    """Exhaustion certificate from the brute-force search."""

    nodes_explored: int

    def __bool__(self) -> bool:  # pragma: no cover
        return False


def brute_force_decompose(g: Graph, max_edges: int = 30):
    """Exhaustive backtracking over triangle covers of small graphs.

    Branches on the lowest-indexed uncovered edge; returns a TriangleSet or
    a ProofOfNone exhaustion certificate.
    """
    if g.edge_count > max_edges:
        raise SizeCapError(f"{g.edge_count} edges exceeds the brute-force cap {max_edges}")
    if g.edge_count % 3 != 0:
        return ProofOfNone(nodes_explored=0)
    edges = g.edges()
    nodes = 0

    work = g.copy()
    chosen: list[tuple[int, int, int]] = []

    def lowest_uncovered():
        for e in edges:
            if work.has_edge(*e):
                return e
        return None

    def rec() -> bool:
        nonlocal nodes
        nodes += 1
        e = lowest_uncovered()
        if e is None:
            return True
        u, v = e
        for w in sorted(work.adj[u] & work.adj[v]):
            work.remove_edge(u, v)
            work.remove_edge(u, w)
            work.remove_edge(v, w)
            chosen.append(tuple(sorted((u, v, w))))
            if rec():
                return True
            chosen.pop()
            work.add_edge(u, v)
            work.add_edge(u, w)
            work.add_edge(v, w)
        return False

    if rec():
        return TriangleSet(chosen)
    return ProofOfNone(nodes_explored=nodes)


@dataclass
class BoxProductCertificate:
    """Counting certificate that C4 box K_n admits no triangle decomposition."""

    n: int
    side_edges: int
    corner_edges: int
    triangles_forced_by_sides: int
    infeasible: bool
    argument: str


def c4_box_kn(n: int) -> Graph:
    """Four K_n's on the corners of a square, adjacent corners fully joined."""
    g = Graph(4 * n)

    def vid(group: int, i: int) -> int:
        return group * n + i

    for grp in range(4):
        for i in range(n):
            for j in range(i + 1, n):
                g.add_edge(vid(grp, i), vid(grp, j))
    for grp in range(4):
        nxt = (grp + 1) % 4
        for i in range(n):
            for j in range(n):
                g.add_edge(vid(grp, i), vid(nxt, j))
    return g


def analyze_c4_box_kn(n: int) -> BoxProductCertificate:
    """Build C4 box K_n and certify infeasibility by edge counting.

    Side edges join adjacent corner cliques; a triangle touching a side edge
    must use exactly two side edges and one corner edge (opposite corners are
    non-adjacent), so 4n^2 side edges demand 2n^2 corner edges, but only
    4*C(n,2) = 2n^2 - 2n exist.
    """
    if n < 2:
        raise ValueError("requires n >= 2")
    g = c4_box_kn(n)
    side = 4 * n * n
    corner = 4 * (n * (n - 1) // 2)
    assert g.edge_count == side + corner
    needed = side // 2
    return BoxProductCertificate(
        n=n,
        side_edges=side,
        corner_edges=corner,
        triangles_forced_by_sides=needed,
        infeasible=needed > corner,
        argument=(
            f"{side} side edges need {needed} triangles of shape "
            f"(2 side + 1 corner), but only {corner} corner edges exist"
        ),
    )
