"""Color-preserving canonical forms and isomorphism tests.

A color-preserving isomorphism of a connected 3-colored graph is fixed by
where it sends a single vertex: every other vertex is reached by a word in
the three colors.  Canonical labelling therefore only has to try the 2n
possible roots.
"""

from __future__ import annotations

import itertools
import struct
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .graphcore import ColoredGraph, components


@dataclass(frozen=True, order=True)
class CanonicalForm:
    code: bytes
    n: int

    def hex(self) -> str:
        return self.code.hex()


def encode_labels(n: int, labels: np.ndarray) -> bytes:
    """Pack a canonical label table behind a 2-byte size header."""
    dtype = "u1" if 2 * n <= 256 else ">u2"
    return struct.pack(">H", n) + np.asarray(labels).astype(dtype).tobytes()


def connected_code(G: ColoredGraph) -> bytes:
    out = np.empty(3 * G.size, np.int64)
    _kernels.canonical_code(G.array, out)
    return encode_labels(G.n, out)


def canonical_form(G: ColoredGraph, permute_colors: bool = False) -> CanonicalForm:
    """Canonical code of ``G`` up to vertex relabelling.

    Disconnected graphs get their component codes sorted and concatenated.
    With ``permute_colors`` the code is minimized over the six color
    permutations as well; this orbit code is meant for reporting only.
    """
    if permute_colors:
        codes = [canonical_form(permute(G, sigma)).code for sigma in itertools.permutations(range(3))]
        return CanonicalForm(min(codes), G.n)
    if _kernels.is_connected(G.array):
        return CanonicalForm(connected_code(G), G.n)
    parts = sorted(connected_code(H) for H in components(G))
    return CanonicalForm(b"".join(struct.pack(">H", len(p)) + p for p in parts), G.n)


def permute(G: ColoredGraph, sigma: tuple[int, ...]) -> ColoredGraph:
    """Recolor so that new color ``k + 1`` is old color ``sigma[k] + 1``."""
    return ColoredGraph(G.n, tuple(G.partners[s] for s in sigma))  # type: ignore[arg-type]


def is_isomorphic(G: ColoredGraph, H: ColoredGraph) -> bool:
    if G.n != H.n:
        return False
    return canonical_form(G) == canonical_form(H)


def find_isomorphism(G: ColoredGraph, H: ColoredGraph) -> list[int] | None:
    """Explicit color-preserving bijection G -> H for connected graphs, or None.

    Tries each image of vertex 0 and propagates along colors; O(n) per root.
    """
    if G.n != H.n:
        return None
    size = G.size
    for root in range(size):
        image = [-1] * size
        used = [False] * size
        image[0] = root
        used[root] = True
        stack = [0]
        ok = True
        while stack and ok:
            v = stack.pop()
            for pg, ph in zip(G.partners, H.partners):
                w, target = pg[v], ph[image[v]]
                if image[w] == -1:
                    if used[target]:
                        ok = False
                        break
                    image[w] = target
                    used[target] = True
                    stack.append(w)
                elif image[w] != target:
                    ok = False
                    break
        if ok and -1 not in image:
            return image
    return None


def brute_force_isomorphic(G: ColoredGraph, H: ColoredGraph) -> bool:
    """Try every vertex permutation; only for tiny graphs."""
    if G.n != H.n:
        return False
    target = H.partners
    return any(G.relabel(perm).partners == target for perm in itertools.permutations(range(G.size)))
