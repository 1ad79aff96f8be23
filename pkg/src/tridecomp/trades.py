"""Trade catalog and scheduling: hexagon shrink templates, merge gadgets,
leftover absorption, and complement preparation.

A trade exchanges one decomposition of an edge set for another.  Shrink
trades replace a 6-cycle (or a 6-vertex path of a longer cycle) plus a few
tripartite triangles with output triangles, shortening leftover cycles by
three.  Merge gadgets rewire two cycles of bad residue into material whose
lengths are workable mod 3, consuming triangles from the coarse tripartite
graph only.

Templates are label-level objects (slots carry part labels); block
refinement happens at instantiation through a small coloring CSP, and
every application is re-verified against the exact edge-multiset identity:

    out-triangles (+ surviving cycle edges) == boundary edges (+ consumed).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product

from .errors import CandidateExhaustionError, TradeError
from .graph import Graph, TriangleSet

Slot = int
SEdge = frozenset  # frozenset of two slot ids
Tri = tuple[int, int, int]

T_FAMILY = "T"   # one slot in each of the three parts
P_FAMILY = "P"   # all slots in one part (distinct sub-blocks at runtime)

MAX_T_PER_SHRINK = 7
MAX_P_PER_SHRINK = 2  # per part
MAX_T_PER_MERGE = 4


# --- hexagon labelings ------------------------------------------------------


def _transforms():
    out = []
    for reflect in (False, True):
        for rot in range(6):
            for perm in _perms3():
                out.append((reflect, rot, perm))
    return out


def _perms3():
    return [p for p in product(range(3), repeat=3) if len(set(p)) == 3]


def _apply(labels, reflect: bool, rot: int, perm) -> tuple[int, ...]:
    n = len(labels)
    pos = [(rot - k) % n if reflect else (rot + k) % n for k in range(n)]
    return tuple(perm[labels[p]] for p in pos)


_ALL_TRANSFORMS = _transforms()


def canonical_labeling(labels) -> tuple[int, ...]:
    labels = tuple(labels)
    return min(_apply(labels, *t) for t in _ALL_TRANSFORMS)


def enumerate_hex_labelings() -> list[tuple[int, ...]]:
    """Distinct classes of {0,1,2}-labeled 6-cycles under rotation,
    reflection, and label permutation."""
    return sorted({canonical_labeling(ls) for ls in product(range(3), repeat=6)})


def labeling_transform(labels) -> tuple[bool, int, tuple[int, ...]]:
    """First transform carrying ``labels`` onto its canonical form."""
    labels = tuple(labels)
    canon = canonical_labeling(labels)
    for t in _ALL_TRANSFORMS:
        if _apply(labels, *t) == canon:
            return t
    raise TradeError("unreachable: no transform found")


# --- templates --------------------------------------------------------------


@dataclass(frozen=True)
class TradeTemplate:
    """Label-level hexagon trade: boundary slots 0..5, internals 6..."""

    labels: tuple[int, ...]
    internal_parts: tuple[int, ...]
    in_tris: tuple[tuple[str, Tri], ...]
    out_tris: tuple[Tri, ...]
    order: tuple[int, ...]

    def slot_part(self, s: Slot) -> int:
        return self.labels[s] if s < 6 else self.internal_parts[s - 6]

    def num_slots(self) -> int:
        return 6 + len(self.internal_parts)


def _tri_edges(t: Tri):
    a, b, c = t
    return (frozenset((a, b)), frozenset((a, c)), frozenset((b, c)))


def hexagon_edges() -> list[SEdge]:
    return [frozenset((k, (k + 1) % 6)) for k in range(6)]


def verify_template(tpl: TradeTemplate) -> None:
    """Exact trade identity plus structural side conditions; raises on failure."""
    hexes = set(hexagon_edges())
    consumed: set[SEdge] = set()
    t_count = 0
    p_count = {0: 0, 1: 0, 2: 0}
    for fam, tri in tpl.in_tris:
        if len(set(tri)) != 3:
            raise TradeError(f"degenerate in-triangle {tri}")
        parts = [tpl.slot_part(s) for s in tri]
        if fam == T_FAMILY:
            if sorted(parts) != [0, 1, 2]:
                raise TradeError(f"in-triangle {tri} not one-per-part")
            t_count += 1
        elif fam == P_FAMILY:
            if len(set(parts)) != 1:
                raise TradeError(f"in-triangle {tri} not within one part")
            p_count[parts[0]] += 1
        else:
            raise TradeError(f"unknown family {fam}")
        if sum(1 for s in tri if s < 6) > 1:
            raise TradeError(f"in-triangle {tri} uses two boundary slots")
        for e in _tri_edges(tri):
            if e in hexes:
                raise TradeError(f"in-triangle {tri} consumes a hexagon edge")
            if e in consumed:
                raise TradeError(f"edge {sorted(e)} consumed twice")
            consumed.add(e)
    if t_count > MAX_T_PER_SHRINK:
        raise TradeError(f"{t_count} cross-part triangles exceeds {MAX_T_PER_SHRINK}")
    if any(v > MAX_P_PER_SHRINK for v in p_count.values()):
        raise TradeError("per-part triangle budget exceeded")

    supply = hexes | consumed
    covered: set[SEdge] = set()
    for tri in tpl.out_tris:
        if len(set(tri)) != 3:
            raise TradeError(f"degenerate out-triangle {tri}")
        bcount = sum(1 for s in tri if s < 6)
        for e in _tri_edges(tri):
            if e not in supply:
                raise TradeError(f"out-triangle {tri} uses unavailable edge {sorted(e)}")
            if e in covered:
                raise TradeError(f"edge {sorted(e)} covered twice")
            covered.add(e)
        if bcount >= 2:
            pairs = [e for e in _tri_edges(tri) if all(s < 6 for s in e)]
            if any(e not in hexes for e in pairs):
                raise TradeError(f"out-triangle {tri} uses a boundary chord")
    if covered != supply:
        raise TradeError("trade identity violated: covered != hexagon + consumed")

    placed = set(range(6))
    for s in tpl.order:
        neighbor_count = 0
        for _fam, tri in tpl.in_tris:
            if s in tri:
                neighbor_count += sum(1 for x in tri if x != s and x in placed)
        if neighbor_count > 4:
            raise TradeError(f"slot {s} would need {neighbor_count} placed neighbors")
        placed.add(s)
    if placed != set(range(tpl.num_slots())):
        raise TradeError("instantiation order misses internal slots")


# --- pool search ------------------------------------------------------------


class _PoolSearch:
    """Bounded exhaustive completion of a trade configuration.

    Maintains a pool of consumed-but-uncovered edges; repeatedly covers the
    smallest pool edge with an out-triangle, consuming new in-triangles as
    needed.  ``recycle`` edges must be consumed but survive (they become
    cycle edges instead of being covered).
    """

    def __init__(self, parts, boundary, pool, used, budget_t, budget_p,
                 fresh_cap, recycle=(), allow_p=True, node_cap=250_000,
                 allowed_boundary_pairs=()):
        self.parts = list(parts)
        self.boundary = list(boundary)
        self.pool: set[SEdge] = set(pool)
        self.used: set[SEdge] = set(used) | self.pool
        self.budget_t = budget_t
        self.budget_p = dict(budget_p)
        self.fresh_cap = fresh_cap
        self.recycle = [frozenset(r) for r in recycle]
        self.allow_p = allow_p
        self.allowed_boundary_pairs = {frozenset(p) for p in allowed_boundary_pairs}
        self.in_tris: list[tuple[str, Tri]] = []
        self.out_tris: list[Tri] = []
        self.nodes = 0
        self.node_cap = node_cap

    def _slot_candidates(self, want_fresh=True):
        slots = list(range(len(self.parts)))
        if want_fresh and self.fresh_cap > 0:
            slots.extend(("fresh", p) for p in range(3))
        return slots

    def _materialize(self, cand):
        if isinstance(cand, tuple):
            self.parts.append(cand[1])
            self.boundary.append(False)
            self.fresh_cap -= 1
            return len(self.parts) - 1, True
        return cand, False

    def _unmaterialize(self, was_fresh: bool):
        if was_fresh:
            self.parts.pop()
            self.boundary.pop()
            self.fresh_cap += 1

    def _tri_family(self, tri: Tri):
        ps = [self.parts[s] for s in tri]
        if sorted(ps) == [0, 1, 2]:
            return T_FAMILY
        if len(set(ps)) == 1 and self.allow_p:
            return P_FAMILY
        return None

    def _can_afford(self, fam: str, part: int) -> bool:
        if fam == T_FAMILY:
            return self.budget_t > 0
        return self.budget_p.get(part, 0) > 0

    def _charge(self, fam: str, part: int, sign: int):
        if fam == T_FAMILY:
            self.budget_t -= sign
        else:
            self.budget_p[part] = self.budget_p.get(part, 0) - sign

    def _tri_boundary_ok(self, tri: Tri) -> bool:
        bslots = [s for s in tri if self.boundary[s]]
        if len(bslots) <= 1:
            return True
        if len(bslots) == 2:
            return frozenset(bslots) in self.allowed_boundary_pairs
        return False

    def _consume_options(self, a: Slot, b: Slot):
        """Ways to consume edge (a,b): in-triangles {a,b,t}."""
        if frozenset((a, b)) in self.used:
            return
        if self.boundary[a] and self.boundary[b] and \
                frozenset((a, b)) not in self.allowed_boundary_pairs:
            return
        for cand in self._slot_candidates():
            t, fresh = self._materialize(cand)
            tri = tuple(sorted((a, b, t)))
            ok = (
                len(set(tri)) == 3
                and self._tri_boundary_ok(tri)
                and all(e not in self.used for e in _tri_edges(tri))
            )
            fam = self._tri_family(tri) if ok else None
            if fam is not None and self._can_afford(fam, self.parts[a]):
                yield tri, fam, fresh
                continue
            self._unmaterialize(fresh)

    def _add_in_tri(self, tri: Tri, fam: str, skip: set[SEdge]):
        self.in_tris.append((fam, tri))
        self._charge(fam, self.parts[tri[0]], +1)
        added = []
        for e in _tri_edges(tri):
            self.used.add(e)
            if e not in skip:
                self.pool.add(e)
                added.append(e)
        return added

    def _remove_in_tri(self, tri: Tri, fam: str, added):
        self.in_tris.pop()
        self._charge(fam, self.parts[tri[0]], -1)
        for e in _tri_edges(tri):
            self.used.discard(e)
        for e in added:
            self.pool.discard(e)

    def run(self):
        try:
            if self._dfs(0):
                return self.in_tris[:], self.out_tris[:], self.parts[:]
        except RecursionError:  # pragma: no cover
            pass
        return None

    def _dfs(self, recycle_idx: int) -> bool:
        self.nodes += 1
        if self.nodes > self.node_cap:
            return False
        if recycle_idx < len(self.recycle):
            r = sorted(self.recycle[recycle_idx])
            for tri, fam, fresh in self._consume_options(*r):
                added = self._add_in_tri(tri, fam, skip={frozenset(r)})
                self.used.add(frozenset(r))
                if self._dfs(recycle_idx + 1):
                    return True
                self.used.discard(frozenset(r))
                self._remove_in_tri(tri, fam, added)
                self._unmaterialize(fresh)
            return False
        if not self.pool:
            return True
        pivot = min(self.pool, key=sorted)
        u, v = sorted(pivot)
        for cand in self._slot_candidates():
            z, fresh_z = self._materialize(cand)
            if z == u or z == v:
                self._unmaterialize(fresh_z)
                continue
            if self._try_cover(u, v, z, recycle_idx):
                return True
            self._unmaterialize(fresh_z)
        return False

    def _try_cover(self, u: Slot, v: Slot, z: Slot, recycle_idx: int) -> bool:
        ea, eb = frozenset((u, z)), frozenset((v, z))
        if ea == eb:
            return False

        def resolve(e, cont) -> bool:
            if e in self.pool:
                return cont()
            a, b = sorted(e)
            for tri, fam, fresh in self._consume_options(a, b):
                added = self._add_in_tri(tri, fam, skip=set())
                if cont():
                    return True
                self._remove_in_tri(tri, fam, added)
                self._unmaterialize(fresh)
            return False

        def after_both() -> bool:
            out = tuple(sorted((u, v, z)))
            removed = [e for e in (frozenset((u, v)), ea, eb)]
            for e in removed:
                self.pool.discard(e)
            self.out_tris.append(out)
            if self._dfs(recycle_idx):
                return True
            self.out_tris.pop()
            for e in removed:
                self.pool.add(e)
            return False

        return resolve(ea, lambda: resolve(eb, after_both))


# --- template derivation (apex ring family + closure search) ----------------


def _third(a: int, b: int) -> int:
    return 3 - a - b


def derive_template(labels, *, catalog=None) -> TradeTemplate:
    """Primary template for a canonical hexagon labeling."""
    return template_variants(labels, catalog=catalog)[0]


def template_variants(labels, *, catalog=None) -> list[TradeTemplate]:
    """All cataloged templates for a labeling (alternates cover boundary
    refinements that starve the primary's within-part triangles)."""
    labels = tuple(labels)
    if labels != canonical_labeling(labels):
        raise TradeError("expected a canonical labeling")
    if catalog is None:
        catalog = load_catalog()
    if labels in catalog:
        return catalog[labels]
    variants = _search_template_variants(labels)
    if not variants:
        raise TradeError(f"no valid template found for labeling {labels}")
    return variants


def _search_template(labels) -> TradeTemplate | None:
    variants = _search_template_variants(labels, max_variants=1)
    return variants[0] if variants else None


def _p_signature(tpl: TradeTemplate):
    sig: dict[int, int] = {}
    for fam, tri in tpl.in_tris:
        if fam == P_FAMILY:
            p = tpl.slot_part(tri[0])
            sig[p] = sig.get(p, 0) + 1
    return frozenset(sig.items())


def _search_template_variants(labels, max_variants: int = 4) -> list[TradeTemplate]:
    from itertools import combinations

    out: list[TradeTemplate] = []
    signatures: set = set()
    for split_count in (0, 1, 2):
        for split_positions in combinations(range(6), split_count):
            for pis in product(range(3), repeat=6):
                tpl = _build_ring(labels, pis, set(split_positions))
                if tpl is None:
                    continue
                sig = _p_signature(tpl)
                if sig in signatures:
                    continue
                signatures.add(sig)
                out.append(tpl)
                if len(out) >= max_variants:
                    return out
    return out


def _build_ring(labels, pis, splits) -> TradeTemplate | None:
    """Apex-ring construction: apex m_k per hexagon edge k, joint in-tri per
    non-split vertex, leg/bridge gadget per split vertex, pool-search closure
    of the residual ring."""
    parts: list[int] = list(labels)
    boundary = [True] * 6
    in_tris: list[tuple[str, Tri]] = []
    out_tris: list[Tri] = []
    t_used = 0
    p_used = {0: 0, 1: 0, 2: 0}

    def new_slot(p: int) -> int:
        parts.append(p)
        boundary.append(False)
        return len(parts) - 1

    apex = [new_slot(pis[k]) for k in range(6)]
    ring: list[int] = []
    used: set[SEdge] = set(hexagon_edges())

    def add_in(fam, tri) -> bool:
        nonlocal t_used
        tri = tuple(sorted(tri))
        if any(e in used for e in _tri_edges(tri)):
            return False
        if fam == T_FAMILY:
            if t_used >= MAX_T_PER_SHRINK:
                return False
            t_used += 1
        else:
            p = parts[tri[0]]
            if p_used[p] >= MAX_P_PER_SHRINK:
                return False
            p_used[p] += 1
        in_tris.append((fam, tri))
        used.update(_tri_edges(tri))
        return True

    for k in range(6):
        out_tris.append(tuple(sorted((k, (k + 1) % 6, apex[k]))))

    for k in range(6):
        prev = apex[(k - 1) % 6]
        cur = apex[k]
        lk = labels[k]
        if k not in splits:
            trio = {lk, pis[(k - 1) % 6], pis[k]}
            if len(trio) == 3:
                fam = T_FAMILY
            elif len(trio) == 1:
                fam = P_FAMILY
            else:
                return None
            if not add_in(fam, (k, prev, cur)):
                return None
            ring.append(prev)
        else:
            leg_parts = []
            for m_part in (pis[(k - 1) % 6], pis[k]):
                if m_part == lk:
                    leg_parts.append(lk)  # within-part leg
                else:
                    leg_parts.append(_third(lk, m_part))
            sa = new_slot(leg_parts[0])
            sb = new_slot(leg_parts[1])
            fam_a = P_FAMILY if leg_parts[0] == lk == pis[(k - 1) % 6] else T_FAMILY
            fam_b = P_FAMILY if leg_parts[1] == lk == pis[k] else T_FAMILY
            if not add_in(fam_a, (k, prev, sa)):
                return None
            if not add_in(fam_b, (k, cur, sb)):
                return None
            if parts[sa] == parts[sb]:
                tau = new_slot(parts[sa])
                fam_c = P_FAMILY
            else:
                tau = new_slot(_third(parts[sa], parts[sb]))
                fam_c = T_FAMILY
            if not add_in(fam_c, (sa, sb, tau)):
                return None
            out_tris.append(tuple(sorted((k, sa, sb))))
            ring.extend((prev, sa, tau, sb))

    # residual ring: consecutive pairs around `ring` order; with no splits it
    # is apex[0]..apex[5]; with splits the inserted chains replace ring edges
    ring_sequence = _ring_sequence(apex, splits, in_tris)
    pool = {frozenset((ring_sequence[i], ring_sequence[(i + 1) % len(ring_sequence)]))
            for i in range(len(ring_sequence))}
    if len(pool) != len(ring_sequence):
        return None
    search = _PoolSearch(
        parts, boundary, pool, used,
        budget_t=MAX_T_PER_SHRINK - t_used,
        budget_p={p: MAX_P_PER_SHRINK - p_used[p] for p in range(3)},
        fresh_cap=2,
    )
    res = search.run()
    if res is None:
        return None
    closure_in, closure_out, final_parts = res
    all_in = in_tris + closure_in
    all_out = out_tris + closure_out
    internal_parts = tuple(final_parts[6:])
    order = _instantiation_order(final_parts, all_in)
    if order is None:
        return None
    tpl = TradeTemplate(
        labels=tuple(labels),
        internal_parts=internal_parts,
        in_tris=tuple((f, tuple(sorted(t))) for f, t in all_in),
        out_tris=tuple(tuple(sorted(t)) for t in all_out),
        order=tuple(order),
    )
    try:
        verify_template(tpl)
    except TradeError:
        return None
    return tpl


def _ring_sequence(apex, splits, in_tris) -> list[int]:
    """Residual ring order: apexes, with split chains spliced in.

    For each split vertex k the slots (sa, sb, tau) were created in that
    order right after the apexes, and the chain sa - tau - sb replaces the
    ring edge between apex[k-1] and apex[k].
    """
    seq: list[int] = []
    chains: dict[int, list[int]] = {}
    next_id = 12  # 6 boundary + 6 apexes
    for k in sorted(splits):
        chains[k] = [next_id, next_id + 2, next_id + 1]  # sa, tau, sb
        next_id += 3
    for k in range(6):
        seq.append(apex[(k - 1) % 6])
        if k in chains:
            seq.extend(chains[k])
    return seq


def _instantiation_order(parts, in_tris) -> list[int] | None:
    """Order of internal slots with at most 4 placed neighbors each.

    Built by reverse peeling: the last slot sees all its configuration
    neighbors already placed, so repeatedly peel off any slot whose current
    neighbor count (boundary plus surviving internals) is at most 4.
    """
    internals = list(range(6, len(parts)))
    neighbors: dict[int, set[int]] = {s: set() for s in internals}
    for _fam, tri in in_tris:
        for s in tri:
            if s >= 6:
                neighbors[s].update(x for x in tri if x != s)
    remaining = set(internals)
    suffix: list[int] = []
    while remaining:
        pick = None
        for s in sorted(remaining):
            load = sum(1 for x in neighbors[s] if x < 6 or x in remaining)
            if load <= 4:
                pick = s
                break
        if pick is None:
            return None
        remaining.discard(pick)
        suffix.append(pick)
    return list(reversed(suffix))


# --- catalog ----------------------------------------------------------------

_CATALOG_CACHE: dict | None = None


def build_catalog() -> dict[tuple[int, ...], list[TradeTemplate]]:
    out = {}
    for labels in enumerate_hex_labelings():
        variants = _search_template_variants(labels)
        if not variants:
            raise TradeError(f"catalog build failed for labeling {labels}")
        out[labels] = variants
    return out


def catalog_to_lines(catalog) -> list[str]:
    lines = []
    for labels in sorted(catalog):
        for tpl in catalog[labels]:
            lines.append("template " + "".join(str(l + 1) for l in labels))
            for idx, p in enumerate(tpl.internal_parts):
                lines.append(f"slot {idx + 6} {p + 1}")
            for fam, tri in tpl.in_tris:
                lines.append(f"tri in {fam} {tri[0]} {tri[1]} {tri[2]}")
            for tri in tpl.out_tris:
                lines.append(f"tri out {tri[0]} {tri[1]} {tri[2]}")
            lines.append("order " + " ".join(str(s) for s in tpl.order))
            lines.append("end")
    return lines


def catalog_from_lines(lines) -> dict[tuple[int, ...], list[TradeTemplate]]:
    out: dict[tuple[int, ...], list[TradeTemplate]] = {}
    labels = None
    internal: list[tuple[int, int]] = []
    in_tris: list[tuple[str, Tri]] = []
    out_tris: list[Tri] = []
    order: tuple[int, ...] = ()
    for raw in lines:
        tokens = raw.split()
        if not tokens:
            continue
        if tokens[0] == "template":
            labels = tuple(int(ch) - 1 for ch in tokens[1])
            internal, in_tris, out_tris, order = [], [], [], ()
        elif tokens[0] == "slot":
            internal.append((int(tokens[1]), int(tokens[2]) - 1))
        elif tokens[0] == "tri" and tokens[1] == "in":
            in_tris.append((tokens[2], tuple(int(x) for x in tokens[3:6])))
        elif tokens[0] == "tri" and tokens[1] == "out":
            out_tris.append(tuple(int(x) for x in tokens[2:5]))
        elif tokens[0] == "order":
            order = tuple(int(x) for x in tokens[1:])
        elif tokens[0] == "end":
            tpl = TradeTemplate(
                labels=labels,
                internal_parts=tuple(p for _s, p in sorted(internal)),
                in_tris=tuple(in_tris),
                out_tris=tuple(out_tris),
                order=order,
            )
            verify_template(tpl)
            out.setdefault(labels, []).append(tpl)
    return out


def load_catalog() -> dict[tuple[int, ...], list[TradeTemplate]]:
    global _CATALOG_CACHE
    if _CATALOG_CACHE is None:
        import importlib.resources as res

        try:
            text = (res.files("tridecomp") / "data" / "hex_catalog.txt").read_text()
            _CATALOG_CACHE = catalog_from_lines(text.splitlines())
        except (FileNotFoundError, ModuleNotFoundError):
            _CATALOG_CACHE = build_catalog()
    return _CATALOG_CACHE
