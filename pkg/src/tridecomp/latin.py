"""Partial Latin squares, the tripartite correspondence, and completion.

Completion strategy is layered: cyclic-biased greedy row matching first,
then seeded randomized restarts, then bounded cell-level backtracking.
Success inside the contracted sparsity region is validated empirically by
the test suite; callers outside the region may still attempt completion.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from .errors import CompletionStuckError, GraphError
from .graph import PartiteView, TriangleSet


@dataclass
class PartialLatinSquare:
    order: int
    cells: dict[tuple[int, int], int]

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        rows: dict[tuple[int, int], tuple[int, int]] = {}
        cols: dict[tuple[int, int], tuple[int, int]] = {}
        n = self.order
        for (r, c), s in self.cells.items():
            if not (0 <= r < n and 0 <= c < n and 0 <= s < n):
                raise GraphError(f"cell out of range: ({r},{c})={s}")
            if (r, s) in rows:
                raise GraphError(f"symbol {s} repeated in row {r}")
            if (c, s) in cols:
                raise GraphError(f"symbol {s} repeated in column {c}")
            rows[(r, s)] = (r, c)
            cols[(c, s)] = (r, c)

    def is_complete(self) -> bool:
        return len(self.cells) == self.order * self.order

    def copy(self) -> "PartialLatinSquare":
        return PartialLatinSquare(self.order, dict(self.cells))


@dataclass
class SparsityProfile:
    max_row_fill: int
    max_col_fill: int
    max_symbol_use: int
    total_fill: int

    @classmethod
    def of(cls, p: PartialLatinSquare) -> "SparsityProfile":
        rows: dict[int, int] = {}
        cols: dict[int, int] = {}
        syms: dict[int, int] = {}
        for (r, c), s in p.cells.items():
            rows[r] = rows.get(r, 0) + 1
            cols[c] = cols.get(c, 0) + 1
            syms[s] = syms.get(s, 0) + 1
        return cls(
            max_row_fill=max(rows.values(), default=0),
            max_col_fill=max(cols.values(), default=0),
            max_symbol_use=max(syms.values(), default=0),
            total_fill=len(p.cells),
        )

    def in_contract_region(self, n: int) -> bool:
        """eps1 < 1/12 and total <= (1-12*eps1)^2 / 10409 * n^2, exactly."""
        eps1 = Fraction(max(self.max_row_fill, self.max_col_fill, self.max_symbol_use), n)
        if eps1 >= Fraction(1, 12):
            return False
        bound = (1 - 12 * eps1) ** 2 / 10409 * n * n
        return Fraction(self.total_fill) <= bound


# --- tripartite correspondence ---------------------------------------------


def pls_from_tripartite(view: PartiteView, triangles: TriangleSet) -> PartialLatinSquare:
    """Cell (r,c)=s for each triangle with one vertex per part (rows are
    part 0, columns part 1, symbols part 2, indexed inside each part)."""
    if view.mode != "tripartite":
        raise GraphError("needs a tripartite view")
    index = [{v: k for k, v in enumerate(p)} for p in view.parts]
    n = len(view.parts[0])
    cells: dict[tuple[int, int], int] = {}
    used: set[tuple[int, int]] = set()
    for t in triangles:
        slots = [None, None, None]
        for v in t:
            i = view.part_of.get(v)
            if i is None or slots[i] is not None:
                raise GraphError(f"triangle {t} does not span the three parts")
            slots[i] = index[i][v]
        r, c, s = slots
        for e in ((0, r, c), (1, r, s), (2, c, s)):
            if e in used:
                raise GraphError(f"triangles share an edge at {t}")
            used.add(e)
        cells[(r, c)] = s
    return PartialLatinSquare(n, cells)


def tripartite_from_pls(p: PartialLatinSquare) -> list[tuple[int, int, int]]:
    """Inverse correspondence: (row, column, symbol) index triples."""
    return sorted((r, c, s) for (r, c), s in p.cells.items())


# --- completion engine ------------------------------------------------------


def complete_pls(
    p: PartialLatinSquare,
    *,
    seed: int = 0,
    restarts: int = 60,
    max_ops: int | None = None,
) -> PartialLatinSquare:
    """Complete a partial Latin square, never overwriting filled cells.

    Raises CompletionStuckError (carrying the input) when every layer of
    the strategy exhausts its budget.
    """
    n = p.order
    if n == 0:
        return p.copy()
    if max_ops is None:
        max_ops = min(2 * n ** 4, 60_000_000) + 200_000
    full = (1 << n) - 1
    row_used0 = [0] * n
    col_used0 = [0] * n
    grid0: list[list[int]] = [[-1] * n for _ in range(n)]
    for (r, c), s in p.cells.items():
        row_used0[r] |= 1 << s
        col_used0[c] |= 1 << s
        grid0[r][c] = s

    ops = 0

    def attempt(order_rows: list[int], rng: random.Random | None) -> list[list[int]] | None:
        nonlocal ops
        row_used = list(row_used0)
        col_used = list(col_used0)
        grid = [list(row) for row in grid0]
        for r in order_rows:
            cols = [c for c in range(n) if grid[r][c] < 0]
            if rng is not None:
                rng.shuffle(cols)
            # most-constrained columns first
            cols.sort(key=lambda c: bin(full & ~(row_used[r] | col_used[c])).count("1"))
            assign: dict[int, int] = {}
            sym_of: dict[int, int] = {}

            def try_col(c: int, visited: set[int]) -> bool:
                nonlocal ops
                ops += 1
                if ops > max_ops:
                    raise CompletionStuckError(p.copy())
                avail = full & ~(row_used[r] | col_used[c])
                candidates = []
                base = (r + c) % n
                for k in range(n):
                    s = (base + k) % n
                    if avail >> s & 1:
                        candidates.append(s)
                if rng is not None and len(candidates) > 1:
                    rng.shuffle(candidates)
                for s in candidates:
                    if s not in sym_of:
                        assign[c] = s
                        sym_of[s] = c
                        return True
                for s in candidates:
                    other = sym_of[s]
                    if other in visited:
                        continue
                    visited.add(other)
                    if try_col(other, visited):
                        assign[c] = s
                        sym_of[s] = c
                        return True
                return False

            ok = True
            for c in cols:
                if not try_col(c, {c}):
                    ok = False
                    break
            if not ok:
                return None
            for c, s in assign.items():
                grid[r][c] = s
                row_used[r] |= 1 << s
                col_used[c] |= 1 << s
        return grid

    # layer 1: deterministic, rows with the most fills first
    fill_per_row = [sum(1 for c in range(n) if grid0[r][c] >= 0) for r in range(n)]
    base_order = sorted(range(n), key=lambda r: (-fill_per_row[r], r))
    grid = attempt(base_order, None)
    # layer 2: seeded randomized restarts
    tries = 0
    while grid is None and tries < restarts:
        rng = random.Random(seed * 9973 + tries)
        order = list(range(n))
        rng.shuffle(order)
        order.sort(key=lambda r: -fill_per_row[r])
        grid = attempt(order, rng)
        tries += 1
    if grid is None:
        grid = _backtrack_cells(n, grid0, row_used0, col_used0, max_ops)
    if grid is None:
        raise CompletionStuckError(p.copy())
    cells = {(r, c): grid[r][c] for r in range(n) for c in range(n)}
    for (r, c), s in p.cells.items():
        assert cells[(r, c)] == s
    out = PartialLatinSquare(n, cells)
    assert out.is_complete()
    return out


def _backtrack_cells(n: int, grid0, row_used0, col_used0, max_ops: int):
    """Cell-level MRV backtracking with forward checking (last resort)."""
    full = (1 << n) - 1
    row_used = list(row_used0)
    col_used = list(col_used0)
    grid = [list(row) for row in grid0]
    empties = [(r, c) for r in range(n) for c in range(n) if grid[r][c] < 0]
    ops = 0
    trail: list[tuple[int, int, int, list[int]]] = []

    def choices(r: int, c: int) -> int:
        return full & ~(row_used[r] | col_used[c])

    while empties or trail:
        ops += 1
        if ops > max_ops:
            return None
        if not empties:
            return grid
        best = min(empties, key=lambda rc: (bin(choices(*rc)).count("1"), rc))
        avail = choices(*best)
        if avail == 0:
            # backtrack
            while trail:
                r, c, s, rest = trail.pop()
                grid[r][c] = -1
                row_used[r] &= ~(1 << s)
                col_used[c] &= ~(1 << s)
                empties.append((r, c))
                if rest:
                    s = rest.pop(0)
                    grid[r][c] = s
                    row_used[r] |= 1 << s
                    col_used[c] |= 1 << s
                    empties.remove((r, c))
                    trail.append((r, c, s, rest))
                    break
            else:
                return None
            continue
        r, c = best
        syms = [s for s in range(n) if avail >> s & 1]
        s = syms[0]
        grid[r][c] = s
        row_used[r] |= 1 << s
        col_used[c] |= 1 << s
        empties.remove((r, c))
        trail.append((r, c, s, syms[1:]))
    return grid  # complete input

