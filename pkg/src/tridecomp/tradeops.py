"""Runtime side of the trade machinery: instantiation against a concrete
graph state, shrink chains with the successor-window rule, merge gadget
planning, leftover absorption, and complement preparation.

Every applied trade is re-verified against the exact edge-multiset identity
on concrete vertex pairs before any state is mutated.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product

from .errors import CandidateExhaustionError, TradeError
from .graph import Graph, TriangleSet
from .trades import (
    MAX_P_PER_SHRINK,
    MAX_T_PER_MERGE,
    MAX_T_PER_SHRINK,
    P_FAMILY,
    T_FAMILY,
    Tri,
    _apply,
    _PoolSearch,
    derive_template,
    labeling_transform,
    load_catalog,
    template_variants,
)


def _vedges(tri):
    a, b, c = tri
    return (frozenset((a, b)), frozenset((a, c)), frozenset((b, c)))


class TradeContext:
    """Part labels, sub-block labels, and family adjacency for instantiation."""

    def __init__(self, members: dict[int, tuple[int, ...]], part_of: dict[int, int],
                 t_graph: Graph, p_graph: Graph | None = None,
                 block_of: dict[int, int] | None = None):
        self.members = {p: tuple(sorted(vs)) for p, vs in members.items()}
        self.part_of = part_of
        self.t_graph = t_graph
        self.p_graph = p_graph
        self.block_of = block_of

    def graph_for(self, fam: str) -> Graph:
        if fam == T_FAMILY:
            return self.t_graph
        if self.p_graph is None:
            raise TradeError("within-part triangles unavailable in this context")
        return self.p_graph

    def has_edge(self, fam: str, u: int, v: int) -> bool:
        return self.graph_for(fam).has_edge(u, v)

    def h_degree(self, v: int) -> int:
        d = self.t_graph.degree(v)
        if self.p_graph is not None:
            d += self.p_graph.degree(v)
        return d


@dataclass
class GadgetPlan:
    """A label-level configuration ready for vertex selection."""

    slot_parts: list[int]
    fixed: dict[int, int]
    in_tris: list[tuple[str, Tri]]
    out_tris: list[Tri]
    survivor_slot_paths: list[list[int]] = field(default_factory=list)
    order: list[int] | None = None
    withheld: Tri | None = None


def _csp_blocks(plan: GadgetPlan, ctx: TradeContext):
    """Block assignments for slots appearing in within-part triangles."""
    if ctx.block_of is None:
        yield {}
        return
    p_tris = [tri for fam, tri in plan.in_tris if fam == P_FAMILY]
    if not p_tris:
        yield {}
        return
    variables = sorted({s for tri in p_tris for s in tri if s not in plan.fixed})
    fixed_blocks = {s: ctx.block_of[v] for s, v in plan.fixed.items()}

    def consistent(partial) -> bool:
        for tri in p_tris:
            blocks = [fixed_blocks.get(s, partial.get(s)) for s in tri]
            blocks = [b for b in blocks if b is not None]
            if len(blocks) != len(set(blocks)):
                return False
        return True

    def rec(i, partial):
        if i == len(variables):
            yield dict(partial)
            return
        s = variables[i]
        for b in range(3):
            partial[s] = b
            if consistent(partial):
                yield from rec(i + 1, partial)
        partial.pop(s, None)

    yield from rec(0, {})


def instantiate(plan: GadgetPlan, ctx: TradeContext, exclusions=frozenset(),
                node_cap: int = 6000) -> dict[int, int]:
    """Pick concrete vertices for internal slots.

    Candidates are ranked by descending combined degree (ties to the lowest
    index); placement backtracks within a node budget.  Enforces block
    constraints from the coloring CSP, distinctness, the at-most-three
    configuration vertices per sub-block rule, and adjacency to every
    placed partner in the correct edge family.
    """
    n_slots = len(plan.slot_parts)
    order = plan.order if plan.order is not None else []
    internal = [s for s in range(n_slots) if s not in plan.fixed]
    order = [s for s in order if s not in plan.fixed] or internal
    partner_map: dict[int, list[tuple[str, int]]] = {s: [] for s in range(n_slots)}
    for fam, tri in plan.in_tris:
        for s in tri:
            for x in tri:
                if x != s:
                    partner_map[s].append((fam, x))

    last_error = "no block-coloring satisfies the configuration"
    for blocks in _csp_blocks(plan, ctx):
        assignment = dict(plan.fixed)
        used = set(assignment.values()) | set(exclusions)
        block_count: dict[tuple[int, int], int] = {}
        if ctx.block_of is not None:
            for v in assignment.values():
                key = (ctx.part_of[v], ctx.block_of[v])
                block_count[key] = block_count.get(key, 0) + 1
        nodes = 0

        def candidates(s: int) -> list[int]:
            part = plan.slot_parts[s]
            placed = [(fam, assignment[x]) for fam, x in partner_map[s] if x in assignment]
            if placed:
                fam0, u0 = placed[0]
                base = sorted(w for w in ctx.graph_for(fam0).adj[u0]
                              if ctx.part_of.get(w) == part)
                placed = placed[1:]
            else:
                base = ctx.members[part]
            want_block = blocks.get(s)
            out = []
            for w in base:
                if w in used:
                    continue
                if want_block is not None and ctx.block_of[w] != want_block:
                    continue
                if ctx.block_of is not None and want_block is None:
                    if block_count.get((part, ctx.block_of[w]), 0) >= 3:
                        continue
                if all(ctx.has_edge(fam, u, w) for fam, u in placed):
                    out.append(w)
            out.sort(key=lambda w: (-ctx.h_degree(w), w))
            return out

        def place(i: int) -> bool:
            nonlocal nodes
            if i == len(order):
                return True
            nodes += 1
            if nodes > node_cap:
                return False
            s = order[i]
            for w in candidates(s):
                assignment[s] = w
                used.add(w)
                key = None
                if ctx.block_of is not None:
                    key = (plan.slot_parts[s], ctx.block_of[w])
                    block_count[key] = block_count.get(key, 0) + 1
                if place(i + 1):
                    return True
                if key is not None:
                    block_count[key] -= 1
                used.discard(w)
                del assignment[s]
            return False

        if place(0):
            return assignment
        last_error = "vertex pool exhausted for the configuration"
    raise CandidateExhaustionError(last_error, "density too low (epsilon too large)")


@dataclass
class TradeLedger:
    """Counts and budget checks across an absorption or preparation run."""

    shrink_trades: int = 0
    merge_trades: int = 0
    rewrites: int = 0
    consumed_from_t: int = 0
    consumed_from_part: dict[int, int] = field(default_factory=lambda: {0: 0, 1: 0, 2: 0})
    boundary_occurrences: dict[tuple[int, int], int] = field(default_factory=dict)
    violations: list[str] = field(default_factory=list)

    def record_trade(self, kind: str, consumed, part_of) -> None:
        t_in = sum(1 for fam, _t in consumed if fam == T_FAMILY)
        p_per: dict[int, int] = {}
        for fam, tri in consumed:
            if fam == P_FAMILY:
                p = part_of[tri[0]]
                p_per[p] = p_per.get(p, 0) + 1
        if kind == "shrink":
            self.shrink_trades += 1
            if t_in > MAX_T_PER_SHRINK:
                self.violations.append(f"shrink used {t_in} cross-part triangles")
            if any(v > MAX_P_PER_SHRINK for v in p_per.values()):
                self.violations.append("shrink exceeded a per-part budget")
        else:
            self.merge_trades += 1
            if t_in > MAX_T_PER_MERGE:
                self.violations.append(f"merge used {t_in} cross-part triangles")
            if p_per:
                self.violations.append("merge consumed within-part triangles")
        self.consumed_from_t += t_in
        for p, v in p_per.items():
            self.consumed_from_part[p] = self.consumed_from_part.get(p, 0) + v

    def note_boundary(self, chain_id: int, vertices) -> None:
        for v in vertices:
            key = (chain_id, v)
            self.boundary_occurrences[key] = self.boundary_occurrences.get(key, 0) + 1

    def max_boundary_occurrence(self) -> int:
        return max(self.boundary_occurrences.values(), default=0)


class TradeEngine:
    """Applies shrink trades and merge gadgets to a live state.

    State mutation happens through four callbacks so that absorption (real
    leftover edges) and complement preparation (virtual missing edges) can
    share the machinery:

    - on_consume(fam, triple): a tripartite triangle was taken
    - on_emit(triple): an output triangle (real triangle, or scaffold cell)
    - on_cycle_cover(u, v): a cycle edge was covered by an output triangle
    - on_survivor(u, v): a consumed edge survives as a new cycle edge
    """

    def __init__(self, ctx: TradeContext, ledger: TradeLedger, *, on_consume, on_emit,
                 on_cycle_cover, on_survivor, merge_budget: int = MAX_T_PER_MERGE):
        self.ctx = ctx
        self.ledger = ledger
        self.on_consume = on_consume
        self.on_emit = on_emit
        self.on_cycle_cover = on_cycle_cover
        self.on_survivor = on_survivor
        self.merge_budget = merge_budget
        self._plan_cache: dict = {}
        self._chain_counter = 0

    # ----- shrinking ------------------------------------------------------

    def emit_triangle_cycle(self, cycle: list[int]) -> None:
        if len(cycle) != 3:
            raise TradeError("emit_triangle_cycle needs a 3-cycle")
        for i in range(3):
            self.on_cycle_cover(cycle[i], cycle[(i + 1) % 3])
        self.on_emit(tuple(sorted(cycle)))

    def shrink_chain(self, cycle: list[int], stop_len: int, *, avoid: int | None = None,
                     exclusions=frozenset()) -> list[int] | None:
        """Shrink ``cycle`` by threes until ``stop_len`` (0 absorbs fully).

        Each trade after the first starts from the window holding the fresh
        3-vertex path of the previous trade, so no cycle vertex appears on
        more than two trade boundaries.  When ``avoid`` is given, the chain
        is positioned so that vertex never enters any window and the final
        path lands next to it.
        """
        cycle = list(cycle)
        self._chain_counter += 1
        chain_id = self._chain_counter
        if stop_len and (len(cycle) - stop_len) % 3 != 0:
            raise TradeError("stop length changes the residue class")
        trades = (len(cycle) - stop_len) // 3 if stop_len else None
        if avoid is not None and avoid in cycle and len(cycle) > 6 and trades:
            shift = (cycle.index(avoid) + trades) % len(cycle)
            cycle = cycle[shift:] + cycle[:shift]
        first = True
        retries = len(cycle) + 2
        while True:
            if len(cycle) == stop_len:
                return cycle
            if len(cycle) == 3:
                self.emit_triangle_cycle(cycle)
                self.ledger.note_boundary(chain_id, cycle)
                return None
            if len(cycle) == 6 and stop_len == 0:
                self._hex_trade(cycle, full_cycle=True, exclusions=exclusions,
                                chain_id=chain_id, avoid=avoid)
                return None
            if len(cycle) < 6:
                raise TradeError(f"cannot shrink a {len(cycle)}-cycle to {stop_len}")
            if not first:
                cycle = [cycle[-1]] + cycle[:-1]
            path = cycle[:6]
            try:
                z = self._hex_trade(path, full_cycle=False,
                                    exclusions=frozenset(set(exclusions) | set(cycle)),
                                    chain_id=chain_id, avoid=avoid)
            except CandidateExhaustionError:
                # the pinned window starved: restart from a rotated window
                retries -= 1
                if retries < 0:
                    raise
                cycle = cycle[1:] + cycle[:1]
                first = True
                continue
            cycle = [path[0], z, path[5]] + cycle[6:]
            first = False

    def _hex_trade(self, path: list[int], *, full_cycle: bool, exclusions,
                   chain_id: int, avoid: int | None):
        ctx = self.ctx
        labels = tuple(ctx.part_of[v] for v in path)
        reflect, rot, perm = labeling_transform(labels)
        variants = template_variants(_apply(labels, reflect, rot, perm))
        inv_perm = [0, 0, 0]
        for i, p in enumerate(perm):
            inv_perm[p] = i
        sigma = [(rot - k) % 6 if reflect else (rot + k) % 6 for k in range(6)]
        fixed = {k: path[sigma[k]] for k in range(6)}
        excl = set(exclusions)
        if avoid is not None:
            excl.add(avoid)
        plan = assignment = None
        last_err: Exception | None = None
        for tpl in variants:
            slot_parts = [labels[sigma[k]] for k in range(6)] + [
                inv_perm[p] for p in tpl.internal_parts
            ]
            withheld = None
            if not full_cycle:
                phantom = frozenset((sigma.index(0), sigma.index(5)))
                for tri in tpl.out_tris:
                    if phantom <= set(tri):
                        withheld = tri
                        break
                if withheld is None:
                    raise TradeError("template lacks a phantom-edge triangle")
            plan = GadgetPlan(
                slot_parts=slot_parts,
                fixed=fixed,
                in_tris=list(tpl.in_tris),
                out_tris=list(tpl.out_tris),
                order=list(tpl.order),
            )
            plan.withheld = withheld
            try:
                assignment = instantiate(plan, ctx, exclusions=frozenset(excl - set(path)))
                break
            except CandidateExhaustionError as err:
                last_err = err
                assignment = None
        if assignment is None:
            raise last_err
        withheld = plan.withheld

        consumed = [(fam, tuple(sorted(assignment[s] for s in tri))) for fam, tri in plan.in_tris]
        emitted = []
        survivors: list[tuple[int, int]] = []
        z_vertex = None
        for tri in plan.out_tris:
            if withheld is not None and tri == withheld:
                phantom_slots = {sigma.index(0), sigma.index(5)}
                z_slot = next(s for s in tri if s not in phantom_slots)
                z_vertex = assignment[z_slot]
                survivors = [(path[0], z_vertex), (z_vertex, path[5])]
                continue
            emitted.append(tuple(sorted(assignment[s] for s in tri)))
        boundary_edges = [frozenset((path[i], path[i + 1])) for i in range(5)]
        if full_cycle:
            boundary_edges.append(frozenset((path[5], path[0])))
        _check_identity(boundary_edges, [t for _f, t in consumed], emitted, survivors)

        for fam, vt in consumed:
            self.on_consume(fam, vt)
        for i in range(len(path) - 1):
            self.on_cycle_cover(path[i], path[i + 1])
        if full_cycle:
            self.on_cycle_cover(path[5], path[0])
        for e in survivors:
            self.on_survivor(*e)
        for vt in emitted:
            self.on_emit(vt)
        self.ledger.record_trade("shrink", consumed, self.ctx.part_of)
        self.ledger.note_boundary(chain_id, path)
        return z_vertex

    # ----- merging --------------------------------------------------------

    def merge_pair(self, a: list[int], b: list[int], *, exclusions=frozenset(),
                   ordering: str = "mod3", depth: int = 0) -> list[list[int]]:
        """Merge two cycles of non-zero residue; the output cycles all have
        length 0 or (len(a) + len(b)) mod 3."""
        if depth > 6:
            raise TradeError("merge recursion did not settle")
        residue = (len(a) + len(b)) % 3
        shared = sorted(set(a) & set(b))
        w = shared[0] if shared else None
        first, second = self._preshrink_order(a, b, ordering)
        done = []
        for cyc, other in ((first, second), (second, first)):
            target = 4 if len(cyc) % 3 == 1 else 5
            if len(cyc) > 5:
                excl = frozenset(set(other) | set(exclusions))
                try:
                    cyc = self.shrink_chain(cyc, target, avoid=w, exclusions=excl)
                except CandidateExhaustionError:
                    # the protective exclusion starved the window; shared
                    # vertices it was guarding against are handled downstream
                    cyc = self.shrink_chain(cyc, target, avoid=w,
                                            exclusions=frozenset(exclusions))
            done.append(list(cyc))
        a2, b2 = (done[0], done[1]) if first is a else (done[1], done[0])
        return self._merge_small(a2, b2, exclusions, residue, ordering, depth)

    def _preshrink_order(self, a, b, ordering):
        if ordering == "mod4":
            key = lambda c: (len(c) % 4 == 1, len(c), c)
        else:
            key = lambda c: (len(c) % 3 != 2, len(c), c)
        pair = sorted((a, b), key=key)
        return pair[0], pair[1]

    def _merge_small(self, a, b, exclusions, residue, ordering, depth) -> list[list[int]]:
        shared = sorted(set(a) & set(b))
        if len(shared) >= 2:
            pieces = _resplice(a, b, residue)
            if pieces is not None:
                self.ledger.rewrites += 1
                return pieces
            b = self._bypass(b, shared[1], frozenset(set(exclusions) | set(a)))
            if len(b) > 5:
                return self.merge_pair(a, b, exclusions=exclusions,
                                       ordering=ordering, depth=depth + 1)
            return self._merge_small(a, b, exclusions, residue, ordering, depth + 1)
        if len(shared) == 1:
            merged = self._merge_shared(a, b, shared[0], exclusions)
        else:
            merged = self._merge_disjoint(a, b, exclusions)
        return [merged]

    def _bypass(self, cycle: list[int], m: int, exclusions) -> list[int]:
        """Rewrite the cycle off vertex m (length preserved, or +3)."""
        i = cycle.index(m)
        x = cycle[(i - 1) % len(cycle)]
        y = cycle[(i + 1) % len(cycle)]
        interior = self._run_gadget(
            boundary=[x, m, y],
            removed=[(0, 1), (1, 2)],
            path_spec=(0, 2),
            exclusions=frozenset(set(exclusions) | set(cycle)),
        )
        return cycle[:i] + interior + cycle[i + 1:]

    def _merge_shared(self, a: list[int], b: list[int], w: int, exclusions) -> list[int]:
        a = a[a.index(w):] + a[:a.index(w)]
        b = b[b.index(w):] + b[:b.index(w)]
        last_err: Exception | None = None
        for apos in (1, -1):
            for bpos in (1, -1):
                x, y = a[apos], b[bpos]
                try:
                    interior = self._run_gadget(
                        boundary=[w, x, y],
                        removed=[(0, 1), (0, 2)],
                        path_spec=(1, 2),
                        exclusions=frozenset(set(exclusions) | set(a) | set(b)),
                    )
                except TradeError as err:
                    last_err = err
                    continue
                arc_a = [w] + (a[1:][::-1] if apos == 1 else a[1:])
                arc_b = b[1:] if bpos == 1 else b[1:][::-1]
                return arc_a + interior + arc_b
        raise last_err if last_err else TradeError("shared merge failed")

    def _merge_disjoint(self, a: list[int], b: list[int], exclusions) -> list[int]:
        last_err: Exception | None = None
        excl = frozenset(set(exclusions) | set(a) | set(b))
        for ia in range(len(a)):
            a_rot = a[ia:] + a[:ia]  # removed edge: (a_rot[-1], a_rot[0])
            for ib in range(len(b)):
                for flip in (False, True):
                    b_rot = b[ib:] + b[:ib]
                    if flip:
                        b_rot = [b_rot[0]] + b_rot[1:][::-1]
                    u, v = a_rot[-1], a_rot[0]
                    p, q = b_rot[-1], b_rot[0]
                    try:
                        paths = self._run_gadget(
                            boundary=[u, v, p, q],
                            removed=[(0, 1), (2, 3)],
                            path_spec=((0, 2), (1, 3)),
                            exclusions=excl,
                        )
                    except TradeError as err:
                        last_err = err
                        continue
                    int1, int2 = paths
                    return a_rot + int1 + b_rot[::-1] + int2[::-1]
        raise last_err if last_err else TradeError("disjoint merge failed")

    # ----- gadget planning -------------------------------------------------

    def _run_gadget(self, boundary: list[int], removed, path_spec, exclusions):
        """Plan and apply a merge-type gadget.

        ``path_spec`` is one pair (single survivor path) or a pair of pairs;
        returns the interior vertex list(s) of the survivor path(s).
        """
        single = isinstance(path_spec[0], int)
        specs = [path_spec] if single else list(path_spec)
        ctx = self.ctx
        bparts = tuple(ctx.part_of[v] for v in boundary)
        shapes = self._shape_options(boundary, specs)
        last_err: Exception | None = None
        for interiors in shapes:
            key = (bparts, tuple(removed), tuple(tuple(x) for x in interiors))
            plan = self._plan_cache.get(key)
            if plan is None:
                plan = self._plan_gadget(bparts, removed, specs, interiors)
                self._plan_cache[key] = plan
            if plan is False:
                last_err = TradeError("no gadget for this labeling")
                continue
            # direct survivor edges must exist in the live graph
            ok = True
            for spec, ints in zip(specs, interiors):
                if not ints:
                    u, v = boundary[spec[0]], boundary[spec[1]]
                    if ctx.part_of[u] == ctx.part_of[v] or not ctx.has_edge(T_FAMILY, u, v):
                        ok = False
                        break
            if not ok:
                last_err = TradeError("direct survivor edge missing")
                continue
            fixed = {i: v for i, v in enumerate(boundary)}
            cplan = GadgetPlan(
                slot_parts=list(plan.slot_parts),
                fixed=fixed,
                in_tris=list(plan.in_tris),
                out_tris=list(plan.out_tris),
                survivor_slot_paths=list(plan.survivor_slot_paths),
            )
            try:
                assignment = instantiate(cplan, ctx, exclusions=exclusions)
            except CandidateExhaustionError as err:
                last_err = err
                continue
            return self._apply_gadget(cplan, assignment, boundary, removed)
        raise last_err if last_err else TradeError("gadget search exhausted")

    def _shape_options(self, boundary, specs):
        """Interior part sequences per survivor path, cheapest first."""
        ctx = self.ctx

        def seqs(u, v, length):
            pu, pv = ctx.part_of[u], ctx.part_of[v]
            if length == 0:
                return [()] if pu != pv else []
            out = []
            for combo in product(range(3), repeat=length):
                chain = [pu, *combo, pv]
                if all(chain[i] != chain[i + 1] for i in range(len(chain) - 1)):
                    out.append(combo)
            return out

        if len(specs) == 1:
            u, v = boundary[specs[0][0]], boundary[specs[0][1]]
            return [(c,) for L in (1, 4) for c in seqs(u, v, L)]
        (s1, s2) = specs
        u1, v1 = boundary[s1[0]], boundary[s1[1]]
        u2, v2 = boundary[s2[0]], boundary[s2[1]]
        shapes = []
        for c1 in seqs(u1, v1, 0):
            for c2 in seqs(u2, v2, 0):
                shapes.append((c1, c2))
        for l1, l2 in ((0, 3), (3, 0), (1, 2), (2, 1)):
            for c1 in seqs(u1, v1, l1):
                for c2 in seqs(u2, v2, l2):
                    shapes.append((c1, c2))
        return shapes

    def _plan_gadget(self, bparts, removed, specs, interiors):
        nb = len(bparts)
        parts = list(bparts)
        boundary_flags = [True] * nb
        survivor_paths: list[list[int]] = []
        recycle: list[frozenset] = []
        allowed_pairs = []
        for spec, ints in zip(specs, interiors):
            path = [spec[0]]
            for p in ints:
                parts.append(p)
                boundary_flags.append(False)
                path.append(len(parts) - 1)
            path.append(spec[1])
            survivor_paths.append(path)
            for x, y in zip(path, path[1:]):
                recycle.append(frozenset((x, y)))
            if not ints:
                allowed_pairs.append(frozenset((spec[0], spec[1])))
        pool = {frozenset((i, j)) for i, j in removed}
        search = _PoolSearch(
            parts, boundary_flags, pool, set(),
            budget_t=self.merge_budget,
            budget_p={0: 0, 1: 0, 2: 0},
            fresh_cap=4,
            recycle=recycle,
            allow_p=False,
            allowed_boundary_pairs=allowed_pairs,
            node_cap=120_000,
        )
        res = search.run()
        if res is None:
            return False
        in_tris, out_tris, final_parts = res
        return GadgetPlan(
            slot_parts=list(final_parts),
            fixed={},
            in_tris=list(in_tris),
            out_tris=list(out_tris),
            survivor_slot_paths=[list(p) for p in survivor_paths],
        )

    def _apply_gadget(self, plan: GadgetPlan, assignment, boundary, removed):
        consumed = [(fam, tuple(sorted(assignment[s] for s in tri))) for fam, tri in plan.in_tris]
        emitted = [tuple(sorted(assignment[s] for s in tri)) for tri in plan.out_tris]
        survivors = []
        vertex_paths = []
        for path in plan.survivor_slot_paths:
            vp = [assignment[s] for s in path]
            vertex_paths.append(vp[1:-1])
            for x, y in zip(vp, vp[1:]):
                survivors.append((x, y))
        boundary_edges = [frozenset((boundary[i], boundary[j])) for i, j in removed]
        _check_identity(boundary_edges, [t for _f, t in consumed], emitted, survivors)
        for fam, vt in consumed:
            self.on_consume(fam, vt)
        for i, j in removed:
            self.on_cycle_cover(boundary[i], boundary[j])
        for e in survivors:
            self.on_survivor(*e)
        for vt in emitted:
            self.on_emit(vt)
        self.ledger.record_trade("merge", consumed, self.ctx.part_of)
        if len(vertex_paths) == 1:
            return vertex_paths[0]
        return vertex_paths


def _check_identity(boundary_edges, consumed_tris, emitted_tris, survivors) -> None:
    supply: list[frozenset] = list(boundary_edges)
    for t in consumed_tris:
        supply.extend(_vedges(t))
    demand: list[frozenset] = [frozenset(e) for e in survivors]
    for t in emitted_tris:
        demand.extend(_vedges(t))
    if sorted(tuple(sorted(e)) for e in supply) != sorted(tuple(sorted(e)) for e in demand):
        raise TradeError("trade identity violated at application time")


def _resplice(a: list[int], b: list[int], residue: int) -> list[list[int]] | None:
    """Rewrite two cycles sharing >= 2 vertices as cycles of workable
    lengths (0 or residue mod 3) without any trade."""
    shared = sorted(set(a) & set(b))
    for i in range(len(shared)):
        for j in range(i + 1, len(shared)):
            u, w = shared[i], shared[j]
            ia, ja = a.index(u), a.index(w)
            ib, jb = b.index(u), b.index(w)
            a1 = _arc(a, ia, ja)   # u .. w along a
            a2 = _arc(a, ja, ia)   # w .. u along a
            b1 = _arc(b, ib, jb)   # u .. w along b
            b2 = _arc(b, jb, ib)   # w .. u along b
            candidates = (
                (a1[:-1] + b1[::-1][:-1], a2[:-1] + b2[::-1][:-1]),
                (a1[:-1] + b2[:-1], a2[:-1] + b1[:-1]),
            )
            for c1, c2 in candidates:
                if len(c1) < 3 or len(c2) < 3:
                    continue
                if len(set(c1)) != len(c1) or len(set(c2)) != len(c2):
                    continue
                if (len(c1) % 3 in (0, residue)) and (len(c2) % 3 in (0, residue)):
                    return [c1, c2]
    return None


def _arc(cycle: list[int], i: int, j: int) -> list[int]:
    """Vertices from position i to j inclusive, walking forward."""
    if i <= j:
        return cycle[i:j + 1]
    return cycle[i:] + cycle[:j + 1]


# --- leftover absorption ----------------------------------------------------


@dataclass
class AbsorbResult:
    emitted: TriangleSet
    consumed_t: list[tuple[int, int, int]]
    consumed_p: list[tuple[int, int, int]]
    ledger: TradeLedger


def absorb_leftovers(l_graph: Graph, t_graph: Graph, p_graph: Graph, partition,
                     *, ordering: str = "mod3") -> AbsorbResult:
    """Absorb every leftover edge into triangles, consuming tripartite
    triangles through shrink and merge trades.

    Cycles with length 0 mod 3 shrink directly; a residue-1 and a
    residue-2 cycle merge into workable material; three same-residue
    cycles reduce by merging twice (the intermediate survivor plays the
    classic middle role).  Mutates all three graphs; l_graph ends empty.
    """
    from .balance import cycle_decompose

    members = {i: partition.part(i) for i in range(3)}
    block_of = {v: partition.block_of[v][1] for v in partition.part_of}
    ctx = TradeContext(members, dict(partition.part_of), t_graph, p_graph, block_of)
    ledger = TradeLedger()
    emitted = TriangleSet()
    consumed_t: list[tuple[int, int, int]] = []
    consumed_p: list[tuple[int, int, int]] = []

    def on_consume(fam, vt):
        g = t_graph if fam == T_FAMILY else p_graph
        a, b, c = vt
        g.remove_edge(a, b)
        g.remove_edge(a, c)
        g.remove_edge(b, c)
        (consumed_t if fam == T_FAMILY else consumed_p).append(vt)

    def on_emit(vt):
        emitted.add(*vt)

    def on_cycle_cover(u, v):
        l_graph.remove_edge(u, v)

    def on_survivor(u, v):
        l_graph.add_edge(u, v)

    engine = TradeEngine(ctx, ledger, on_consume=on_consume, on_emit=on_emit,
                         on_cycle_cover=on_cycle_cover, on_survivor=on_survivor)

    cycles = cycle_decompose(l_graph.copy())
    pools: dict[int, list[list[int]]] = {0: [], 1: [], 2: []}
    for c in cycles:
        pools[len(c) % 3].append(c)

    def sort_pools():
        for r in pools:
            pools[r].sort(key=lambda c: (len(c), c))

    def dispatch(piece: list[int]):
        pools[len(piece) % 3].append(piece)

    sort_pools()
    guard = 3 * sum(len(c) for c in cycles) + 100
    while True:
        guard -= 1
        if guard < 0:
            raise TradeError("absorption failed to settle")
        if pools[0]:
            cyc = pools[0].pop(0)
            engine.shrink_chain(cyc, 0)
            continue
        if pools[1] and pools[2]:
            a = pools[1].pop(0)
            b = pools[2].pop(0)
            for piece in engine.merge_pair(a, b, ordering=ordering):
                dispatch(piece)
            sort_pools()
            continue
        rest = pools[1] or pools[2]
        if not rest:
            break
        if len(rest) < 3:
            raise TradeError(
                f"cycle residues cannot reach 0 mod 3 ({len(rest)} stragglers)"
            )
        a = rest.pop(0)
        b = rest.pop(0)
        # keep the intermediate survivor off the third cycle where possible
        shield = frozenset(rest[0])
        try:
            pieces = engine.merge_pair(a, b, exclusions=shield, ordering=ordering)
        except TradeError:
            pieces = engine.merge_pair(a, b, ordering=ordering)
        for piece in pieces:
            dispatch(piece)
        sort_pools()
    if l_graph.edge_count != 0:
        raise TradeError("leftover edges survived absorption")
    return AbsorbResult(emitted=emitted, consumed_t=consumed_t,
                        consumed_p=consumed_p, ledger=ledger)


# --- complement preparation --------------------------------------------------


@dataclass
class PrepResult:
    cells: list[tuple[int, int, int]]
    emitted: TriangleSet
    ledger: TradeLedger
    walk_cycles: int = 0


def prepare_complement(tri_graph: Graph, members3: dict[int, tuple],
                       registry: list[tuple[int, int, int]] = ()) -> PrepResult:
    """Decompose the tripartite complement into scaffold cells, consuming
    (and re-emitting as real triangles) triangles of the live graph.

    Registry triples (triangles whose edges were removed earlier as whole
    units) become direct cells; remaining missing edges are carved into
    positively-oriented triangles where possible and walk-decomposed into
    positively-oriented cycles otherwise, which then shrink via the
    standard templates.
    """
    part_of: dict[int, int] = {}
    for p, vs in members3.items():
        for v in vs:
            part_of[v] = p
    nmax = max(part_of) + 1
    comp = Graph(nmax)
    order = [tuple(sorted(members3[i])) for i in range(3)]
    for i in range(3):
        for j in range(i + 1, 3):
            for u in order[i]:
                for v in order[j]:
                    if not tri_graph.has_edge(u, v):
                        comp.add_edge(u, v)

    cells: list[tuple[int, int, int]] = []
    emitted = TriangleSet()
    ledger = TradeLedger()

    def take_cell(a, b, c):
        comp.remove_edge(a, b)
        comp.remove_edge(a, c)
        comp.remove_edge(b, c)
        cells.append(tuple(sorted((a, b, c))))

    for t in registry:
        a, b, c = t
        if not (comp.has_edge(a, b) and comp.has_edge(a, c) and comp.has_edge(b, c)):
            raise TradeError(f"registry triple {t} is not fully missing")
        take_cell(a, b, c)

    # greedy cross-part triangles among the remaining missing edges
    for a in order[0]:
        progress = True
        while progress:
            progress = False
            for b in sorted(comp.adj[a]):
                if part_of.get(b) != 1:
                    continue
                for c in sorted(comp.adj[b]):
                    if part_of.get(c) == 2 and comp.has_edge(a, c):
                        take_cell(a, b, c)
                        progress = True
                        break
                if progress:
                    break

    # all residual missing edges must balance for the oriented walk
    for v in sorted(part_of):
        plus = sum(1 for w in comp.adj[v] if part_of[w] == (part_of[v] + 1) % 3)
        minus = sum(1 for w in comp.adj[v] if part_of[w] == (part_of[v] - 1) % 3)
        if plus != minus:
            raise TradeError(f"complement is not balanced at vertex {v}")

    cycles = _oriented_cycles(comp, part_of)

    ctx = TradeContext(members3, part_of, tri_graph, None, None)

    def on_consume(fam, vt):
        a, b, c = vt
        tri_graph.remove_edge(a, b)
        tri_graph.remove_edge(a, c)
        tri_graph.remove_edge(b, c)
        emitted.add(a, b, c)

    def on_emit(vt):
        cells.append(tuple(sorted(vt)))

    engine = TradeEngine(ctx, ledger, on_consume=on_consume, on_emit=on_emit,
                         on_cycle_cover=lambda u, v: None,
                         on_survivor=lambda u, v: None)
    for cyc in sorted(cycles, key=lambda c: (len(c), c)):
        if len(cyc) % 3 != 0:
            raise TradeError("oriented complement cycle has bad residue")
        engine.shrink_chain(cyc, 0)
    return PrepResult(cells=cells, emitted=emitted, ledger=ledger,
                      walk_cycles=len(cycles))


def _oriented_cycles(comp: Graph, part_of: dict[int, int]) -> list[list[int]]:
    """Split the complement into positively-oriented simple cycles."""
    cycles: list[list[int]] = []
    for start in sorted(part_of):
        while any(part_of.get(w) == (part_of[start] + 1) % 3 for w in comp.adj[start]):
            path = [start]
            index = {start: 0}
            cur = start
            while True:
                nxt = min(w for w in comp.adj[cur] if part_of.get(w) == (part_of[cur] + 1) % 3)
                comp.remove_edge(cur, nxt)
                if nxt in index:
                    cycles.append(path[index[nxt]:])
                    for w in path[index[nxt] + 1:]:
                        del index[w]
                    del path[index[nxt] + 1:]
                    cur = nxt
                    if cur == start and not any(
                        part_of.get(w) == (part_of[start] + 1) % 3 for w in comp.adj[start]
                    ):
                        break
                else:
                    path.append(nxt)
                    index[nxt] = len(path) - 1
                    cur = nxt
    return cycles
