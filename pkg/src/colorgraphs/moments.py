"""Gaussian moments of trace invariants.

With covariance <T_abc T_a'b'c'> = N^-nu delta delta delta, Wick's theorem gives
<Tr_G(T)> = N^(-nu n) * sum over color-0 matchings M of N^F(M, G).
"""

from __future__ import annotations

import string
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .graphcore import COLORS, ColoredGraph, disjoint_union, is_connected
from .matching import enumerate_matchings, face_histogram, max_faces

DEFAULT_NU = 2
MAX_EXACT_N = 8
MAX_MC_N = 4
MAX_MC_DIM = 6
MAX_PAIR_N = 3
RNG_NAME = "numpy.PCG64"


@dataclass(frozen=True)
class MomentPolynomial:
    """Multiplicity of each power of N in <Tr_G(T)>; exponents may be negative."""

    nu: int
    n: int
    terms: dict[int, int] = field(default_factory=dict)

    @property
    def top_exponent(self) -> int:
        return max(self.terms)

    @property
    def total(self) -> int:
        return sum(self.terms.values())

    def evaluate(self, N: int) -> Fraction:
        return sum((Fraction(N) ** e * c for e, c in self.terms.items()), Fraction(0))

    def to_dict(self) -> dict:
        return {"nu": self.nu, "n": self.n,
                "terms": {str(e): c for e, c in sorted(self.terms.items(), reverse=True)}}


def moment_polynomial(G: ColoredGraph, nu: int = DEFAULT_NU, *, force: bool = False) -> MomentPolynomial:
    if nu < 0:
        raise ValueError(f"nu must be nonnegative, got {nu}")
    if G.n > MAX_EXACT_N and not force:
        raise ValueError(f"n={G.n} exceeds the enumeration guard {MAX_EXACT_N}; pass force=True")
    hist = face_histogram(G)
    return MomentPolynomial(nu, G.n, {f - nu * G.n: c for f, c in hist.items()})


def _einsum_letters(count: int) -> list[str]:
    letters = string.ascii_letters
    if count > len(letters):
        raise ValueError(f"contraction needs {count} index letters, only {len(letters)} available")
    return list(letters[:count])


def wick_contraction_sum(G: ColoredGraph, N: int, nu: int = DEFAULT_NU) -> Fraction:
    """<Tr_G(T)> by literally contracting deltas, one Wick pairing at a time.

    Every tensor slot (vertex, color) gets its own index; the graph's edges and
    the pairing's covariance deltas become identity matrices fed to einsum.
    No face is ever counted.
    """
    size = G.size
    letters = _einsum_letters(3 * size)
    slot = {(v, c): letters[3 * v + c - 1] for v in range(size) for c in COLORS}
    eye = np.eye(N, dtype=np.int64)
    base = [slot[u, c] + slot[v, c] for c in COLORS for u, v in G.edges(c)]
    total = 0
    for M in enumerate_matchings(G.n):
        subs = list(base)
        for u, v in M.edges():
            subs.extend(slot[u, c] + slot[v, c] for c in COLORS)
        expr = ",".join(subs) + "->"
        total += int(np.einsum(expr, *([eye] * len(subs)), optimize="greedy"))
    return Fraction(total, N ** (nu * G.n))


def trace_invariant(G: ColoredGraph, T: np.ndarray) -> np.ndarray:
    """Tr_G(T) for a batch of tensors ``T`` of shape (S, N, N, N)."""
    letters = _einsum_letters(3 * G.n + 1)
    batch, edge_letters = letters[0], iter(letters[1:])
    index = [[""] * 3 for _ in range(G.size)]
    for c in COLORS:
        for u, v in G.edges(c):
            x = next(edge_letters)
            index[u][c - 1] = x
            index[v][c - 1] = x
    expr = ",".join(batch + "".join(ix) for ix in index) + "->" + batch
    return np.einsum(expr, *([T] * G.size), optimize="greedy")


def mc_estimate(G: ColoredGraph, N: int, samples: int, seed: int, nu: int = DEFAULT_NU,
                block: int = 50_000) -> tuple[float, float]:
    """Sample mean and standard error of Tr_G(T) over Gaussian tensors.

    Blocks draw from independent child streams of ``SeedSequence(seed)``, so
    the result does not depend on how blocks are scheduled.
    """
    if G.n > MAX_MC_N or N > MAX_MC_DIM:
        raise ValueError(f"Monte Carlo limited to n <= {MAX_MC_N} and N <= {MAX_MC_DIM}, got n={G.n}, N={N}")
    if samples < 2:
        raise ValueError("need at least 2 samples")
    sigma = N ** (-nu / 2)
    nblocks = -(-samples // block)
    children = np.random.SeedSequence(seed).spawn(nblocks)
    acc = 0.0
    acc2 = 0.0
    left = samples
    for child in children:
        k = min(block, left)
        left -= k
        rng = np.random.Generator(np.random.PCG64(child))
        T = rng.normal(0.0, sigma, size=(k, N, N, N))
        vals = trace_invariant(G, T)
        acc += float(vals.sum())
        acc2 += float((vals * vals).sum())
    mean = acc / samples
    var = (acc2 - samples * mean * mean) / (samples - 1)
    return mean, float(np.sqrt(max(var, 0.0) / samples))


def factorization_diagnostic(G: ColoredGraph, nu: int = DEFAULT_NU) -> dict:
    """Leading-order comparison of <Tr_G Tr_G> with <Tr_G>^2.

    ``violates`` is max_M F(M, G) <= 3n/2.  For n <= 3 the pair G + G is also
    maximized exactly, showing whether a pairing connecting the two copies
    beats twice the single maximum.
    """
    if not is_connected(G):
        raise ValueError("diagnostic needs a connected graph")
    res = max_faces(G)
    threshold = Fraction(3 * G.n, 2)
    report = {
        "n": G.n,
        "nu": nu,
        "max_f": res.max_f,
        "threshold": str(threshold),
        "violates": res.max_f <= threshold,
        "squared_mean_exponent": 2 * (res.max_f - nu * G.n),
        "pair_exponent": None,
        "pair_max_f": None,
        "connected_pairing_dominates": None,
    }
    if G.n <= MAX_PAIR_N:
        pair = max_faces(disjoint_union(G, G))
        report["pair_max_f"] = pair.max_f
        report["pair_exponent"] = pair.max_f - 2 * nu * G.n
        report["connected_pairing_dominates"] = pair.max_f > 2 * res.max_f
    return report
