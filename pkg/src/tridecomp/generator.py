"""Seed-deterministic generation of dense tridivisible instances."""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from .errors import InstanceInfeasibleError
from .graph import Graph, is_tridivisible


@dataclass(frozen=True)
class InstanceSpec:
    vertex_count: int
    target_epsilon: Fraction
    target_xi: Fraction
    seed: int


def generate_instance(spec: InstanceSpec) -> Graph:
    """Near-complete tridivisible graph honoring the removal targets.

    Starts from the complete graph, removes a random edge set within the
    per-vertex budget floor(eps*|V|) and total budget floor(xi*|V|^2), then
    repairs tridivisibility (odd degrees fixed by removing a matching on
    the odd vertices, the mod-3 residue by removing a short even cycle).
    The repair step is exempt from the budgets except when both targets
    are exactly zero, which demands the untouched complete graph.
    """
    n = spec.vertex_count
    if n < 3:
        raise InstanceInfeasibleError("need at least 3 vertices")
    g = Graph.complete(n)
    rng = random.Random(spec.seed)
    per_vertex_budget = int(spec.target_epsilon * n)
    total_budget = int(spec.target_xi * n * n)

    removed_at = [0] * n
    removed = 0
    if total_budget > 0 and per_vertex_budget > 0:
        edges = g.edges()
        rng.shuffle(edges)
        for u, v in edges:
            if removed >= total_budget:
                break
            if removed_at[u] < per_vertex_budget and removed_at[v] < per_vertex_budget:
                g.remove_edge(u, v)
                removed_at[u] += 1
                removed_at[v] += 1
                removed += 1

    pristine = spec.target_epsilon == 0 and spec.target_xi == 0
    _repair_parity(g, rng, allow=not pristine)
    _repair_residue(g, rng, allow=not pristine)
    if not is_tridivisible(g):
        raise InstanceInfeasibleError("tridivisibility repair failed")
    return g


def _repair_parity(g: Graph, rng: random.Random, allow: bool) -> None:
    odd = [v for v in g.vertices() if g.degree(v) % 2 == 1]
    if not odd:
        return
    if not allow:
        raise InstanceInfeasibleError(
            "zero removal budget cannot repair odd degrees"
        )
    rng.shuffle(odd)
    unmatched = []
    while odd:
        u = odd.pop()
        partner = None
        for w in odd:
            if g.has_edge(u, w):
                partner = w
                break
        if partner is None:
            unmatched.append(u)
            continue
        odd.remove(partner)
        g.remove_edge(u, partner)
    if unmatched:
        raise InstanceInfeasibleError("could not pair all odd-degree vertices")


def _repair_residue(g: Graph, rng: random.Random, allow: bool) -> None:
    residue = g.edge_count % 3
    if residue == 0:
        return
    if not allow:
        raise InstanceInfeasibleError(
            "zero removal budget cannot fix the edge-count residue"
        )
    # removing a C4 shifts the residue by -1, a C5 by -2; degrees stay even
    length = 4 if residue == 1 else 5
    cycle = _find_cycle(g, length, rng)
    if cycle is None:
        raise InstanceInfeasibleError(f"no {length}-cycle available for repair")
    for a, b in zip(cycle, cycle[1:] + cycle[:1]):
        g.remove_edge(a, b)


def _find_cycle(g: Graph, length: int, rng: random.Random):
    verts = sorted(g.vertices(), key=lambda v: (-g.degree(v), v))[:length + 6]
    from itertools import permutations

    for combo in permutations(verts, length):
        if combo[0] != min(combo):
            continue
        if all(g.has_edge(a, b) for a, b in zip(combo, combo[1:] + combo[:1])):
            return list(combo)
    return None
