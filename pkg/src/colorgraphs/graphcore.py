"""3-regular 3-edge-colored multigraphs and their faces."""

from __future__ import annotations

import random
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from functools import cached_property

import numpy as np

COLORS = (1, 2, 3)
COLOR_PAIRS = ((1, 2), (1, 3), (2, 3))

Edge = tuple[int, int]


class GraphValidationError(ValueError):
    pass


def _check_involution(partner: Sequence[int], color: int | str) -> None:
    size = len(partner)
    for v, w in enumerate(partner):
        if not 0 <= w < size:
            raise GraphValidationError(f"color {color}: vertex {v} matched to {w}, outside 0..{size - 1}")
        if w == v:
            raise GraphValidationError(f"color {color}: vertex {v} matched to itself")
        if partner[w] != v:
            raise GraphValidationError(f"color {color}: vertex {v} -> {w} but {w} -> {partner[w]}")


def partner_from_edges(edges: Iterable[Sequence[int]], size: int, color: int | str) -> tuple[int, ...]:
    """Turn a list of vertex pairs into a partner vector, naming the first defect."""
    partner = [-1] * size
    for edge in edges:
        if len(edge) != 2:
            raise GraphValidationError(f"color {color}: edge {tuple(edge)} is not a pair")
        u, v = int(edge[0]), int(edge[1])
        for x in (u, v):
            if not 0 <= x < size:
                raise GraphValidationError(f"color {color}: vertex {x} outside 0..{size - 1}")
        if u == v:
            raise GraphValidationError(f"color {color}: loop at vertex {u}")
        for x in (u, v):
            if partner[x] != -1:
                raise GraphValidationError(f"color {color}: vertex {x} matched twice")
        partner[u], partner[v] = v, u
    missing = [v for v, w in enumerate(partner) if w == -1]
    if missing:
        raise GraphValidationError(f"color {color}: vertex {missing[0]} unmatched")
    return tuple(partner)


@dataclass(frozen=True)
class ColoredGraph:
    """Vertices ``0..2n-1``; ``partners[c - 1][v]`` is the color-``c`` neighbor of ``v``."""

    n: int
    partners: tuple[tuple[int, ...], tuple[int, ...], tuple[int, ...]]

    def __post_init__(self) -> None:
        if self.n < 1:
            raise GraphValidationError(f"n must be positive, got {self.n}")
        if len(self.partners) != 3:
            raise GraphValidationError(f"expected 3 colors, got {len(self.partners)}")
        for c, partner in zip(COLORS, self.partners):
            if len(partner) != 2 * self.n:
                raise GraphValidationError(f"color {c}: expected {2 * self.n} vertices, got {len(partner)}")
            _check_involution(partner, c)

    @classmethod
    def from_partners(cls, partners: Sequence[Sequence[int]]) -> ColoredGraph:
        size = len(partners[0])
        if size % 2:
            raise GraphValidationError(f"odd vertex count {size}")
        return cls(size // 2, tuple(tuple(int(x) for x in p) for p in partners))  # type: ignore[arg-type]

    @property
    def size(self) -> int:
        return 2 * self.n

    def partner(self, color: int, v: int) -> int:
        return self.partners[color - 1][v]

    def edges(self, color: int) -> list[Edge]:
        p = self.partners[color - 1]
        return [(v, w) for v, w in enumerate(p) if v < w]

    @cached_property
    def array(self) -> np.ndarray:
        arr = np.array(self.partners, dtype=np.int64)
        arr.setflags(write=False)
        return arr

    def relabel(self, perm: Sequence[int]) -> ColoredGraph:
        """Graph with vertex ``v`` renamed ``perm[v]``."""
        size = self.size
        new = []
        for p in self.partners:
            q = [0] * size
            for v in range(size):
                q[perm[v]] = perm[p[v]]
            new.append(tuple(q))
        return ColoredGraph(self.n, tuple(new))  # type: ignore[arg-type]


@dataclass(frozen=True)
class FaceProfile:
    f12: int
    f13: int
    f23: int
    connected: bool
    bipartite: bool

    @property
    def is_mst(self) -> bool:
        return self.f12 == self.f13 == self.f23 == 1

    def count(self, i: int, j: int) -> int:
        key = (min(i, j), max(i, j))
        return {(1, 2): self.f12, (1, 3): self.f13, (2, 3): self.f23}[key]

    def as_tuple(self) -> tuple[int, int, int]:
        return (self.f12, self.f13, self.f23)


def make_graph(n: int, edges1: Iterable[Sequence[int]], edges2: Iterable[Sequence[int]],
               edges3: Iterable[Sequence[int]]) -> ColoredGraph:
    """Build a graph from three edge lists over ``0..2n-1``."""
    if n < 1:
        raise GraphValidationError(f"n must be positive, got {n}")
    partners = []
    for c, edges in zip(COLORS, (edges1, edges2, edges3)):
        edges = list(edges)
        if len(edges) != n:
            raise GraphValidationError(f"color {c}: expected {n} edges, got {len(edges)}")
        partners.append(partner_from_edges(edges, 2 * n, c))
    return ColoredGraph(n, tuple(partners))  # type: ignore[arg-type]


def cycles_of(a: Sequence[int], b: Sequence[int]) -> int:
    """Components of the union of two perfect matchings given as partner vectors."""
    size = len(a)
    seen = [False] * size
    cycles = 0
    for s in range(size):
        if seen[s]:
            continue
        cycles += 1
        v = s
        while True:
            seen[v] = True
            w = a[v]
            seen[w] = True
            v = b[w]
            if v == s:
                break
    return cycles


def _check_pair(i: int, j: int) -> None:
    if i not in COLORS or j not in COLORS or i == j:
        raise ValueError(f"need two distinct colors from 1..3, got ({i}, {j})")


def count_faces(G: ColoredGraph, i: int, j: int) -> int:
    _check_pair(i, j)
    return cycles_of(G.partners[i - 1], G.partners[j - 1])


def faces(G: ColoredGraph, i: int, j: int) -> list[tuple[int, ...]]:
    """The (i, j) faces as vertex cycles.

    Each cycle starts at its smallest vertex and leaves it along color ``i``,
    so positions (0, 1), (2, 3), ... are color-``i`` edges.
    """
    _check_pair(i, j)
    pi, pj = G.partners[i - 1], G.partners[j - 1]
    seen = [False] * G.size
    out = []
    for s in range(G.size):
        if seen[s]:
            continue
        seq = []
        v = s
        while True:
            seq.append(v)
            seen[v] = True
            w = pi[v]
            seq.append(w)
            seen[w] = True
            v = pj[w]
            if v == s:
                break
        out.append(tuple(seq))
    return out


def is_connected(G: ColoredGraph) -> bool:
    seen = {0}
    stack = [0]
    while stack:
        v = stack.pop()
        for p in G.partners:
            w = p[v]
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return len(seen) == G.size


def is_bipartite(G: ColoredGraph) -> bool:
    side = [-1] * G.size
    for s in range(G.size):
        if side[s] != -1:
            continue
        side[s] = 0
        stack = [s]
        while stack:
            v = stack.pop()
            for p in G.partners:
                w = p[v]
                if side[w] == -1:
                    side[w] = 1 - side[v]
                    stack.append(w)
                elif side[w] == side[v]:
                    return False
    return True


def face_profile(G: ColoredGraph) -> FaceProfile:
    f12, f13, f23 = (count_faces(G, i, j) for i, j in COLOR_PAIRS)
    return FaceProfile(f12, f13, f23, is_connected(G), is_bipartite(G))


def is_mst(G: ColoredGraph) -> bool:
    return all(count_faces(G, i, j) == 1 for i, j in COLOR_PAIRS)


def disjoint_union(G: ColoredGraph, H: ColoredGraph) -> ColoredGraph:
    off = G.size
    partners = tuple(tuple(g) + tuple(w + off for w in h) for g, h in zip(G.partners, H.partners))
    return ColoredGraph(G.n + H.n, partners)  # type: ignore[arg-type]


def components(G: ColoredGraph) -> list[ColoredGraph]:
    """Connected components, each relabelled to ``0..2k-1`` in increasing vertex order."""
    seen = [False] * G.size
    out = []
    for s in range(G.size):
        if seen[s]:
            continue
        comp = [s]
        seen[s] = True
        k = 0
        while k < len(comp):
            v = comp[k]
            k += 1
            for p in G.partners:
                w = p[v]
                if not seen[w]:
                    seen[w] = True
                    comp.append(w)
        comp.sort()
        index = {v: i for i, v in enumerate(comp)}
        out.append(ColoredGraph.from_partners([[index[p[v]] for v in comp] for p in G.partners]))
    return out


def random_matching(size: int, rng: random.Random) -> tuple[int, ...]:
    order = list(range(size))
    rng.shuffle(order)
    partner = [0] * size
    for k in range(0, size, 2):
        u, v = order[k], order[k + 1]
        partner[u], partner[v] = v, u
    return tuple(partner)


def random_graph(n: int, rng: random.Random) -> ColoredGraph:
    """Three independent uniform perfect matchings on ``2n`` vertices."""
    return ColoredGraph(n, tuple(random_matching(2 * n, rng) for _ in COLORS))  # type: ignore[arg-type]


def cycle_graph_matchings(n: int) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """The fixed E1 = {0,1},{2,3},... and E2 = {1,2},...,{2n-1,0} partner vectors."""
    size = 2 * n
    e1 = tuple(v ^ 1 for v in range(size))
    e2 = tuple(((v + 1) if v % 2 else (v - 1)) % size for v in range(size))
    return e1, e2
