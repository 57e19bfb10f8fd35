"""Color-0 (Wick) matchings and the face count F(M, G)."""

from __future__ import annotations

import struct
from collections.abc import Iterator, Sequence
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path

import numpy as np

from . import _kernels
from .graphcore import ColoredGraph, GraphValidationError, cycle_graph_matchings, cycles_of

# Identifies the enumeration order (smallest free vertex first, partners ascending).
ENUMERATION_RULE = 1
TABLE_MAGIC = b"CGF0TBL\x00"
TABLE_VERSION = 1
DEFAULT_MEMORY_CAP = 1 << 30


def double_factorial(k: int) -> int:
    out = 1
    while k > 1:
        out *= k
        k -= 2
    return out


def matching_count(m: int) -> int:
    """(2m - 1)!!"""
    return double_factorial(2 * m - 1)


@dataclass(frozen=True)
class Matching:
    partner: tuple[int, ...]

    def __post_init__(self) -> None:
        size = len(self.partner)
        if size == 0 or size % 2:
            raise GraphValidationError(f"matching needs a positive even vertex count, got {size}")
        for v, w in enumerate(self.partner):
            if not 0 <= w < size or w == v or self.partner[w] != v:
                raise GraphValidationError(f"color 0: vertex {v} is not properly matched")

    @classmethod
    def from_edges(cls, edges: Sequence[Sequence[int]], size: int | None = None) -> Matching:
        if size is None:
            size = 2 * len(edges)
        partner = [-1] * size
        for u, v in edges:
            if partner[u] != -1 or partner[v] != -1 or u == v:
                raise GraphValidationError(f"color 0: edge ({u}, {v}) overlaps another edge")
            partner[u], partner[v] = v, u
        return cls(tuple(partner))

    @classmethod
    def from_index(cls, m: int, index: int) -> Matching:
        total = matching_count(m)
        if not 0 <= index < total:
            raise IndexError(f"matching index {index} outside 0..{total - 1}")
        out = np.empty(2 * m, np.int64)
        _kernels.unrank_matching(index, m, out)
        return cls(tuple(int(x) for x in out))

    @property
    def m(self) -> int:
        return len(self.partner) // 2

    @cached_property
    def index(self) -> int:
        """Position in the enumeration order."""
        return int(_kernels.rank_matching(np.array(self.partner, dtype=np.int64)))

    def edges(self) -> list[tuple[int, int]]:
        return [(v, w) for v, w in enumerate(self.partner) if v < w]


@dataclass(frozen=True)
class MaxFaceResult:
    """Outcome of a maximization over color-0 matchings.

    ``exact`` is False when the search stopped early (budget or a target was
    reached); ``max_f`` is then only a lower bound.  ``maximizer_count`` is
    None unless every maximizer was visited.
    """

    max_f: int
    witness: Matching
    maximizer_count: int | None
    matchings_examined: int
    pruned: int
    exact: bool = True


def enumerate_matchings(m: int) -> Iterator[Matching]:
    """All perfect matchings of ``0..2m-1`` by plain backtracking.

    The smallest unmatched vertex is paired with each unmatched vertex above
    it in increasing order, so the i-th item equals ``Matching.from_index(m, i)``.
    """
    if m < 1:
        raise ValueError(f"m must be positive, got {m}")
    size = 2 * m
    partner = [-1] * size

    def rec(u: int) -> Iterator[Matching]:
        while u < size and partner[u] != -1:
            u += 1
        if u == size:
            yield Matching(tuple(partner))
            return
        for v in range(u + 1, size):
            if partner[v] == -1:
                partner[u], partner[v] = v, u
                yield from rec(u + 1)
                partner[u] = partner[v] = -1

    yield from rec(0)


def _check_sizes(G: ColoredGraph, M: Matching) -> None:
    if len(M.partner) != G.size:
        raise ValueError(f"matching on {len(M.partner)} vertices, graph has {G.size}")


def faces_with_color0(G: ColoredGraph, M: Matching) -> int:
    """F(M, G): the number of (0, i) faces of G + M summed over i = 1, 2, 3."""
    _check_sizes(G, M)
    return sum(cycles_of(M.partner, p) for p in G.partners)


def _as_result(G: ColoredGraph, raw, count_exact: bool) -> MaxFaceResult:
    best, witness, count, leaves, pruned, complete = raw
    if witness[0] < 0:
        raise RuntimeError("search ended without a witness; the seeded lower bound was not attainable")
    M = Matching(tuple(int(x) for x in witness))
    return MaxFaceResult(
        max_f=int(best),
        witness=M,
        maximizer_count=int(count) if (complete and count_exact) else None,
        matchings_examined=int(leaves),
        pruned=int(pruned),
        exact=bool(complete),
    )


def max_faces(
    G: ColoredGraph,
    budget: int | None = None,
    *,
    bound: str = "tight",
    count_maximizers: bool = False,
    lower_bound: int | None = None,
    stop_above: int | None = None,
) -> MaxFaceResult:
    """Maximum of F(M, G) over all color-0 matchings, by branch and bound.

    ``bound`` selects the pruning rule: ``"simple"`` charges 3 faces per color-0
    edge still to place; ``"tight"`` additionally uses that
    ``r - cycles(A + B)`` is a metric on perfect matchings of 2r points, so
    the remaining faces are at most ``(3r + c12 + c13 + c23) / 2`` where the
    ``c`` are the cycle counts between the contracted open paths; ``"none"``
    visits every matching.

    ``budget`` caps the number of edge placements.  ``lower_bound`` (a value
    known to be attained) only speeds up pruning; the witness is still the
    first maximizer in enumeration order.  With ``stop_above`` the search
    returns as soon as some matching beats that value; the result is then
    flagged inexact.
    """
    if bound not in ("tight", "simple", "none"):
        raise ValueError(f"unknown bound {bound!r}")
    prune = bound != "none"
    seed = -1 if lower_bound is None else lower_bound - 1
    hist = np.zeros(3 * G.n + 1, np.int64)
    raw = _kernels.search_faces(
        G.array, seed, -1 if stop_above is None else stop_above,
        prune, bound == "tight", count_maximizers or not prune,
        0 if budget is None else budget, hist,
    )
    return _as_result(G, raw, count_maximizers or not prune)


def face_histogram(G: ColoredGraph) -> dict[int, int]:
    """Number of color-0 matchings achieving each value of F(M, G)."""
    hist = np.zeros(3 * G.n + 1, np.int64)
    _kernels.search_faces(G.array, -1, -1, False, False, True, 0, hist)
    return {int(f): int(c) for f, c in enumerate(hist) if c}


class MemoryCapExceeded(MemoryError):
    pass


class PartialFaceTable:
    """F01 and F02 for every matching, in enumeration order, with E1 and E2 fixed."""

    def __init__(self, m: int, e1: np.ndarray, e2: np.ndarray, matchings: np.ndarray,
                 f01: np.ndarray, f02: np.ndarray) -> None:
        self.m = m
        self.e1 = e1
        self.e2 = e2
        self.matchings = matchings
        self.f01 = f01
        self.f02 = f02
        for arr in (e1, e2, matchings, f01, f02):
            arr.setflags(write=False)

    def __len__(self) -> int:
        return len(self.f01)

    def __getitem__(self, index: int) -> tuple[int, int]:
        return int(self.f01[index]), int(self.f02[index])

    def max_faces(self, e3: Sequence[int]) -> MaxFaceResult:
        """Exhaustive maximum for G = (E1, E2, e3); only F03 is computed per matching."""
        hist = np.zeros(3 * self.m + 1, np.int64)
        best, first, count = _kernels.table_scan(
            self.matchings, self.f01, self.f02, np.asarray(e3, dtype=np.int64), hist)
        witness = Matching(tuple(int(x) for x in self.matchings[first]))
        return MaxFaceResult(int(best), witness, int(count), len(self), 0, True)

    def save(self, path: str | Path) -> None:
        header = TABLE_MAGIC + struct.pack("<HHH", TABLE_VERSION, self.m, ENUMERATION_RULE)
        payload = (np.asarray(self.e1, np.int8).tobytes() + np.asarray(self.e2, np.int8).tobytes()
                   + self.f01.tobytes() + self.f02.tobytes())
        from .io import atomic_write_bytes

        atomic_write_bytes(Path(path), header + payload)

    @classmethod
    def load(cls, path: str | Path) -> PartialFaceTable:
        data = Path(path).read_bytes()
        head = len(TABLE_MAGIC) + 6
        if data[: len(TABLE_MAGIC)] != TABLE_MAGIC:
            raise ValueError(f"{path}: not a partial-face table")
        version, m, rule = struct.unpack("<HHH", data[len(TABLE_MAGIC):head])
        if version != TABLE_VERSION or rule != ENUMERATION_RULE:
            raise ValueError(f"{path}: unsupported version {version} / enumeration rule {rule}")
        total = matching_count(m)
        size = 2 * m
        if len(data) != head + 2 * size + 2 * total:
            raise ValueError(f"{path}: truncated table")
        off = head
        e1 = np.frombuffer(data, np.int8, size, off).astype(np.int64)
        off += size
        e2 = np.frombuffer(data, np.int8, size, off).astype(np.int64)
        off += size
        f01 = np.frombuffer(data, np.int8, total, off).copy()
        off += total
        f02 = np.frombuffer(data, np.int8, total, off).copy()
        matchings = _kernels.all_matchings(m, total)
        return cls(m, e1, e2, matchings, f01, f02)


def table_bytes(m: int) -> int:
    """Memory needed for the matching list plus the two count columns."""
    return matching_count(m) * (2 * m + 2)


def precompute_partial_faces(
    m: int,
    e1: Sequence[int] | None = None,
    e2: Sequence[int] | None = None,
    memory_cap: int = DEFAULT_MEMORY_CAP,
) -> PartialFaceTable:
    """Cycle counts of (M, E1) and (M, E2) for every matching M.

    E1 and E2 default to the survey's fixed matchings.
    """
    need = table_bytes(m)
    if need > memory_cap:
        raise MemoryCapExceeded(f"table for m={m} needs {need} bytes, cap is {memory_cap}")
    if 2 * m > 127:
        raise ValueError("vertex labels must fit in int8")
    d1, d2 = cycle_graph_matchings(m)
    a1 = np.asarray(d1 if e1 is None else e1, dtype=np.int64)
    a2 = np.asarray(d2 if e2 is None else e2, dtype=np.int64)
    total = matching_count(m)
    matchings = _kernels.all_matchings(m, total)
    f01, f02 = _kernels.partial_face_table(matchings, a1, a2)
    return PartialFaceTable(m, a1, a2, matchings, f01, f02)
