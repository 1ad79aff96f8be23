"""Bit-exact file formats: graphs, triangle sets, partial Latin squares.

Graph:     "p tri <V> <E>" header, then "e <u> <v>" lines with u < v in
           ascending lexicographic order.  LF endings, ASCII decimal.
Triangles: "t <a> <b> <c>" lines, each triple sorted, lines sorted.
PLS:       "pls <n>" header, then "c <row> <col> <sym>" lines for filled
           cells (absent cells omitted).
"""

from __future__ import annotations

from .errors import ParseError
from .graph import Graph, TriangleSet
from .latin import PartialLatinSquare


def write_graph(g: Graph) -> str:
    lines = [f"p tri {g.vertex_count} {g.edge_count}"]
    lines.extend(f"e {u} {v}" for u, v in g.edges())
    return "\n".join(lines) + "\n"


def read_graph(text: str) -> Graph:
    g = None
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        tokens = line.split()
        if tokens[0] == "p":
            if g is not None:
                raise ParseError(line_no, "duplicate header")
            if len(tokens) != 4 or tokens[1] != "tri":
                raise ParseError(line_no, f"bad header {line!r}")
            try:
                g = Graph(int(tokens[2]))
            except ValueError:
                raise ParseError(line_no, "non-integer vertex count")
        elif tokens[0] == "e":
            if g is None:
                raise ParseError(line_no, "edge before header")
            try:
                u, v = int(tokens[1]), int(tokens[2])
            except (ValueError, IndexError):
                raise ParseError(line_no, f"bad edge line {line!r}")
            if not (0 <= u < g.vertex_count and 0 <= v < g.vertex_count):
                raise ParseError(line_no, f"vertex out of range in {line!r}")
            try:
                g.add_edge(u, v)
            except Exception as exc:
                raise ParseError(line_no, str(exc))
        else:
            raise ParseError(line_no, f"unknown record {tokens[0]!r}")
    if g is None:
        raise ParseError(1, "missing header")
    return g


def write_triangles(ts: TriangleSet) -> str:
    lines = [f"t {a} {b} {c}" for a, b, c in sorted(ts)]
    return "\n".join(lines) + ("\n" if lines else "")


def read_triangles(text: str) -> TriangleSet:
    out = TriangleSet()
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        tokens = line.split()
        if tokens[0] != "t" or len(tokens) != 4:
            raise ParseError(line_no, f"bad triangle line {line!r}")
        try:
            a, b, c = (int(x) for x in tokens[1:])
        except ValueError:
            raise ParseError(line_no, "non-integer vertex")
        out.add(a, b, c)
    return out


def write_pls(p: PartialLatinSquare) -> str:
    lines = [f"pls {p.order}"]
    lines.extend(f"c {r} {c} {s}" for (r, c), s in sorted(p.cells.items()))
    return "\n".join(lines) + "\n"


def read_pls(text: str) -> PartialLatinSquare:
    order = None
    cells = {}
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        tokens = line.split()
        if tokens[0] == "pls":
            order = int(tokens[1])
        elif tokens[0] == "c":
            if order is None:
                raise ParseError(line_no, "cell before header")
            try:
                r, c, s = (int(x) for x in tokens[1:4])
            except (ValueError, IndexError):
                raise ParseError(line_no, f"bad cell line {line!r}")
            if (r, c) in cells:
                raise ParseError(line_no, f"duplicate cell ({r},{c})")
            cells[(r, c)] = s
        else:
            raise ParseError(line_no, f"unknown record {tokens[0]!r}")
    if order is None:
        raise ParseError(1, "missing header")
    try:
        return PartialLatinSquare(order, cells)
    except Exception as exc:
        raise ParseError(1, str(exc))
