"""Constructive lower bounds on max_M F(M, G) with checkable witnesses.

Copying one color into color 0 gives n + F_ij + F_ik faces.  When a face of
colors (i, j) and a face of colors (i, k) share three or more color-i edges,
two of them are co-oriented and swapping their color-0 copies crosswise
splits both faces, gaining exactly one face overall.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass
from fractions import Fraction

from .graphcore import COLORS, ColoredGraph, face_profile, faces
from .matching import Matching, faces_with_color0

THEOREM_MAX_N = 9


class LemmaInapplicable(ValueError):
    """The two faces share fewer than three edges of their common color."""


class TheoremViolation(RuntimeError):
    """A residual case had no face pair to flip; must not happen for n <= 9."""


class Rule(str, enum.Enum):
    PARALLEL = "parallel"
    PARALLEL_BEST_COLOR = "parallel_best_color"
    FLIP = "flip"


@dataclass(frozen=True)
class Face:
    """A bicolored cycle; ``cycle[2t] -> cycle[2t + 1]`` are its color-``i`` edges."""

    i: int
    j: int
    cycle: tuple[int, ...]

    def color_i_edges(self) -> list[tuple[int, int]]:
        c = self.cycle
        return [(c[t], c[t + 1]) for t in range(0, len(c), 2)]


@dataclass(frozen=True)
class SharedEdge:
    tail: int
    head: int
    same_direction: bool

    @property
    def key(self) -> tuple[int, int]:
        return (min(self.tail, self.head), max(self.tail, self.head))


@dataclass(frozen=True)
class FlipData:
    colors: tuple[int, int, int]
    e: tuple[int, int]
    f: tuple[int, int]
    e_new: tuple[int, int]
    f_new: tuple[int, int]

    def to_dict(self) -> dict:
        return {"colors": list(self.colors), "e": list(self.e), "f": list(self.f),
                "e_new": list(self.e_new), "f_new": list(self.f_new)}


@dataclass(frozen=True)
class BoundCertificate:
    bound: int
    witness: Matching
    rule: Rule
    color: int
    flip: FlipData | None = None

    def to_dict(self) -> dict:
        return {
            "rule": self.rule.value,
            "bound": self.bound,
            "color": self.color,
            "witness": [list(e) for e in self.witness.edges()],
            "flip": None if self.flip is None else self.flip.to_dict(),
        }


def graph_faces(G: ColoredGraph, i: int, j: int) -> list[Face]:
    return [Face(i, j, c) for c in faces(G, i, j)]


def parallel_matching(G: ColoredGraph, i: int) -> Matching:
    """Color-0 edges copying the color-``i`` edges."""
    if i not in COLORS:
        raise ValueError(f"color must be 1, 2 or 3, got {i}")
    return Matching(G.partners[i - 1])


def shared_color_edges(G: ColoredGraph, faceA: Face, faceB: Face) -> list[SharedEdge]:
    """Color-i edges lying on both faces.

    Each edge is oriented as ``faceB`` traverses it; ``same_direction`` tells
    whether ``faceA`` traverses it the same way.
    """
    if faceA.i != faceB.i or faceA.j == faceB.j or faceA.j == faceA.i or faceB.j == faceB.i:
        raise ValueError("faces must have colors (i, j) and (i, k) with i, j, k distinct")
    along_a = {}
    for tail, head in faceA.color_i_edges():
        along_a[(min(tail, head), max(tail, head))] = tail
    out = []
    for tail, head in faceB.color_i_edges():
        key = (min(tail, head), max(tail, head))
        if key in along_a:
            out.append(SharedEdge(tail, head, along_a[key] == tail))
    out.sort(key=lambda e: e.key)
    return out


def _flip(G: ColoredGraph, M: Matching, C: Face, C2: Face) -> tuple[Matching, FlipData]:
    i = C.i
    if M.partner != G.partners[i - 1]:
        raise ValueError(f"flip needs the color-0 matching parallel to color {i}")
    shared = shared_color_edges(G, C, C2)
    if len(shared) < 3:
        raise LemmaInapplicable(f"faces share {len(shared)} color-{i} edges, need at least 3")
    pair = next(((a, b) for a, b in itertools.combinations(shared, 2)
                 if a.same_direction == b.same_direction), None)
    # three edges, two orientations: a co-oriented pair always exists
    assert pair is not None, "no co-oriented pair among three shared edges"
    e, f = pair
    v1, v2, w1, w2 = e.tail, e.head, f.tail, f.head
    partner = list(M.partner)
    partner[v1], partner[w2] = w2, v1
    partner[w1], partner[v2] = v2, w1
    new = Matching(tuple(partner))
    gained = faces_with_color0(G, new) - faces_with_color0(G, M)
    assert gained == 1, f"flip changed the face count by {gained}"
    data = FlipData((i, C.j, C2.j), e.key, f.key, (v1, w2), (w1, v2))
    return new, data


def flip_improve(G: ColoredGraph, M: Matching, faceC: Face, faceC2: Face) -> Matching:
    """Swap two co-oriented shared edges of M = E_i crosswise; gains one face."""
    return _flip(G, M, faceC, faceC2)[0]


def find_flip(G: ColoredGraph, i: int, j: int, k: int) -> tuple[Matching, FlipData] | None:
    """First (i, j) / (i, k) face pair sharing >= 3 color-i edges, flipped."""
    M = parallel_matching(G, i)
    for C in graph_faces(G, i, j):
        for C2 in graph_faces(G, i, k):
            if len(shared_color_edges(G, C, C2)) >= 3:
                return _flip(G, M, C, C2)
    return None


def _others(i: int) -> tuple[int, int]:
    j, k = (c for c in COLORS if c != i)
    return j, k


def certified_lower_bound(G: ColoredGraph) -> BoundCertificate:
    """Best parallel matching, plus one flip in the two residual face patterns.

    The residual patterns are one color pair with two faces and the others
    with one, or two faces for every pair.  For n <= 9 a flip must exist
    there whenever the parallel bound alone does not exceed 3n/2; otherwise
    :class:`TheoremViolation` is raised.
    """
    prof = face_profile(G)
    sums = {i: prof.count(i, _others(i)[0]) + prof.count(i, _others(i)[1]) for i in COLORS}
    best = max(COLORS, key=lambda i: (sums[i], -i))
    M = parallel_matching(G, best)
    bound = G.n + sums[best]
    rule = Rule.PARALLEL if sums[1] == sums[best] else Rule.PARALLEL_BEST_COLOR
    if rule is Rule.PARALLEL:
        best, M = 1, parallel_matching(G, 1)

    counts = prof.as_tuple()
    if sorted(counts) == [1, 1, 2]:
        a, b = ((1, 2), (1, 3), (2, 3))[counts.index(2)]
        candidates = [(a, b, next(c for c in COLORS if c not in (a, b))),
                      (b, a, next(c for c in COLORS if c not in (a, b)))]
    elif counts == (2, 2, 2):
        candidates = [(i, *_others(i)) for i in COLORS]
    else:
        candidates = []

    for i, j, k in candidates:
        found = find_flip(G, i, j, k)
        if found is not None:
            new, data = found
            cert = BoundCertificate(bound + 1, new, Rule.FLIP, i, data)
            break
    else:
        if candidates and G.n <= THEOREM_MAX_N and bound <= Fraction(3 * G.n, 2):
            raise TheoremViolation(f"face profile {counts} at n={G.n}: no face pair shares 3 edges")
        cert = BoundCertificate(bound, M, rule, best)

    actual = faces_with_color0(G, cert.witness)
    assert actual == cert.bound, f"certificate claims {cert.bound}, witness has {actual}"
    return cert


def improve_by_swaps(G: ColoredGraph, M: Matching, max_rounds: int = 100) -> tuple[Matching, int]:
    """Hill-climb over 2-edge swaps of M.  Experimental: no guarantee of any gain."""
    current = M
    value = faces_with_color0(G, current)
    for _ in range(max_rounds):
        improved = False
        edges = current.edges()
        for (a, b), (c, d) in itertools.combinations(edges, 2):
            for x, y in (((a, c), (b, d)), ((a, d), (b, c))):
                partner = list(current.partner)
                partner[x[0]], partner[x[1]] = x[1], x[0]
                partner[y[0]], partner[y[1]] = y[1], y[0]
                cand = Matching(tuple(partner))
                f = faces_with_color0(G, cand)
                if f > value:
                    current, value, improved = cand, f, True
                    break
            if improved:
                break
        if not improved:
            break
    return current, value
