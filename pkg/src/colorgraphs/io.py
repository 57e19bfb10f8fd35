"""Text formats for colored graphs, the bundled fixtures, and JSON/atomic output.

Two record conventions are supported, one record per line:

``table3``
    ``n=8; 3: {1,3},{2,6},...`` -- 1-based labels, only color-3 edges given;
    E1 = {1,2},{3,4},... and E2 = {2,3},...,{2n,1} are implied.
``explicit``
    ``n=2; 1: {0,1},{2,3}; 2: {1,2},{0,3}; 3: {0,2},{1,3}`` -- 0-based, all colors.

Lines starting with ``#`` and blank lines are ignored.
"""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
from collections.abc import Iterator
from contextlib import contextmanager
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import IO

from .graphcore import COLORS, ColoredGraph, cycle_graph_matchings

FORMAT_VERSION = 1
FIXTURE_SHA256 = "3de1c1568e6d93204d3a9505fc0c02d3104598d37b4f8ce602f024f6d0e19d84"
CONVENTIONS = ("table3", "explicit")


class ParseError(ValueError):
    def __init__(self, message: str, line: int, column: int) -> None:
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


class FixtureTampered(RuntimeError):
    pass


@dataclass(frozen=True)
class GraphRecord:
    n: int
    convention: str
    edges: dict[int, list[tuple[int, int]]]


class _Scanner:
    def __init__(self, text: str, line: int) -> None:
        self.text = text
        self.pos = 0
        self.line = line

    def error(self, message: str, pos: int | None = None) -> ParseError:
        return ParseError(message, self.line, (self.pos if pos is None else pos) + 1)

    def skip(self) -> None:
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def at_end(self) -> bool:
        self.skip()
        return self.pos >= len(self.text)

    def expect(self, token: str) -> None:
        self.skip()
        if not self.text.startswith(token, self.pos):
            found = self.text[self.pos:self.pos + 1] or "end of line"
            raise self.error(f"expected {token!r}, found {found!r}")
        self.pos += len(token)

    def peek(self, token: str) -> bool:
        self.skip()
        return self.text.startswith(token, self.pos)

    def integer(self) -> tuple[int, int]:
        self.skip()
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos].isdigit():
            self.pos += 1
        if start == self.pos:
            raise self.error("expected an integer")
        return int(self.text[start:self.pos]), start


def parse_record(text: str, line: int = 1) -> tuple[GraphRecord, dict[tuple[int, int], int]]:
    """Parse one record; also returns the column of every listed pair."""
    sc = _Scanner(text, line)
    sc.expect("n")
    sc.expect("=")
    n, npos = sc.integer()
    if n < 1:
        raise sc.error("n must be positive", npos)
    edges: dict[int, list[tuple[int, int]]] = {}
    where: dict[tuple[int, int], int] = {}
    while not sc.at_end():
        sc.expect(";")
        color, cpos = sc.integer()
        if color not in COLORS:
            raise sc.error(f"unknown color {color}", cpos)
        if color in edges:
            raise sc.error(f"color {color} listed twice", cpos)
        sc.expect(":")
        pairs = []
        while True:
            sc.skip()
            ppos = sc.pos
            sc.expect("{")
            a, _ = sc.integer()
            sc.expect(",")
            b, _ = sc.integer()
            sc.expect("}")
            pairs.append((a, b))
            where[(color, len(pairs) - 1)] = ppos + 1
            if not sc.peek(","):
                break
            sc.expect(",")
        edges[color] = pairs
    if not edges:
        raise sc.error("no edge lists")
    convention = "table3" if set(edges) == {3} else "explicit"
    if convention == "explicit" and set(edges) != set(COLORS):
        raise sc.error(f"explicit records need colors 1, 2 and 3, got {sorted(edges)}")
    return GraphRecord(n, convention, edges), where


def _build(record: GraphRecord, where: dict[tuple[int, int], int], line: int) -> ColoredGraph:
    n = record.n
    size = 2 * n
    base = 1 if record.convention == "table3" else 0
    e1, e2 = cycle_graph_matchings(n)
    partners = {1: list(e1), 2: list(e2)} if record.convention == "table3" else {}
    for color, pairs in record.edges.items():
        partner = [-1] * size
        for k, (a, b) in enumerate(pairs):
            col = where[(color, k)]
            for x in (a, b):
                if not base <= x < size + base:
                    raise ParseError(f"color {color}: label {x} outside {base}..{size - 1 + base}", line, col)
            if a == b:
                raise ParseError(f"color {color}: loop at vertex {a}", line, col)
            for x in (a, b):
                if partner[x - base] != -1:
                    raise ParseError(f"color {color}: vertex {x} matched twice", line, col)
            partner[a - base], partner[b - base] = b - base, a - base
        missing = [v + base for v, w in enumerate(partner) if w == -1]
        if missing:
            raise ParseError(f"color {color}: vertex {missing[0]} unmatched", line, 1)
        partners[color] = partner
    return ColoredGraph(n, tuple(tuple(partners[c]) for c in COLORS))  # type: ignore[arg-type]


def _records(text: str) -> list[tuple[int, str]]:
    out = []
    for no, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.strip()
        if stripped and not stripped.startswith("#"):
            out.append((no, raw))
    return out


def parse_graphs(text: str, convention: str = "auto") -> list[ColoredGraph]:
    if convention not in CONVENTIONS + ("auto",):
        raise ValueError(f"unknown convention {convention!r}")
    graphs = []
    for no, raw in _records(text):
        record, where = parse_record(raw, no)
        if convention != "auto" and record.convention != convention:
            raise ParseError(f"record is in {record.convention} form, expected {convention}", no, 1)
        graphs.append(_build(record, where, no))
    return graphs


def parse_graph(text: str, convention: str = "auto") -> ColoredGraph:
    graphs = parse_graphs(text, convention)
    if len(graphs) != 1:
        raise ParseError(f"expected one graph record, found {len(graphs)}", 1, 1)
    return graphs[0]


def read_graph(path: str | Path, convention: str = "auto") -> ColoredGraph:
    return parse_graph(Path(path).read_text(), convention)


def _pairs_text(pairs: list[tuple[int, int]]) -> str:
    return ",".join(f"{{{a},{b}}}" for a, b in sorted(pairs))


def serialize_graph(G: ColoredGraph, convention: str = "table3") -> str:
    """Normalized single-line record: pairs ascending, rows by first endpoint."""
    if convention == "table3":
        if (G.partners[0], G.partners[1]) != cycle_graph_matchings(G.n):
            raise ValueError("graph does not use the fixed E1/E2 of the table3 convention; use 'explicit'")
        pairs = [(u + 1, v + 1) for u, v in G.edges(3)]
        return f"n={G.n}; 3: {_pairs_text(pairs)}"
    if convention == "explicit":
        parts = [f"{c}: {_pairs_text(G.edges(c))}" for c in COLORS]
        return f"n={G.n}; " + "; ".join(parts)
    raise ValueError(f"unknown convention {convention!r}")


def fixture_text() -> str:
    return resources.files("colorgraphs").joinpath("data/table3.txt").read_text()


def load_fixtures(path: str | Path | None = None) -> list[ColoredGraph]:
    """The 41 sixteen-vertex graphs, or graphs from ``path``.

    The bundled file is checked against its pinned SHA-256.
    """
    if path is not None:
        return parse_graphs(Path(path).read_text())
    text = fixture_text()
    digest = hashlib.sha256(text.encode()).hexdigest()
    if digest != FIXTURE_SHA256:
        raise FixtureTampered(f"bundled fixture hash {digest} != pinned {FIXTURE_SHA256}")
    return parse_graphs(text, "table3")


@contextmanager
def atomic_open(path: str | Path, mode: str = "wb") -> Iterator[IO]:
    """Write to a temporary sibling of ``path``; rename over it on success."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, mode) as fh:
            yield fh
            fh.flush()
            os.fsync(fh.fileno())
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def atomic_write_bytes(path: str | Path, data: bytes) -> None:
    with atomic_open(path, "wb") as fh:
        fh.write(data)


def dumps_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def write_json(path: str | Path, obj) -> None:
    atomic_write_bytes(Path(path), dumps_json(obj).encode())


def load_schema() -> dict:
    return json.loads(resources.files("colorgraphs").joinpath("data/report.schema.json").read_text())
