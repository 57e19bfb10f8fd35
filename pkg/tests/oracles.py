"""Independent brute-force references used across the tests."""

import itertools

from colorgraphs.graphcore import ColoredGraph

# n = 8 graph with two faces for every color pair where no (i, j) / (i, k)
# face pair shares three color-i edges
NO_FLIP_N8 = ColoredGraph(8, (
    (4, 8, 6, 7, 0, 9, 2, 3, 1, 5, 14, 15, 13, 12, 10, 11),
    (14, 9, 12, 8, 13, 15, 10, 11, 3, 1, 6, 7, 2, 4, 0, 5),
    (7, 14, 3, 2, 9, 6, 5, 0, 15, 4, 12, 13, 10, 11, 1, 8),
))


def union_components(size, *partners):
    """Connected components of the union of matchings, by union-find."""
    parent = list(range(size))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for p in partners:
        for v in range(size):
            a, b = find(v), find(p[v])
            if a != b:
                parent[a] = b
    return len({find(v) for v in range(size)})


def brute_faces(G, partner0):
    return sum(union_components(G.size, partner0, p) for p in G.partners)


def brute_max_faces(G):
    """Max of F(M, G) over matchings built independently of the package."""
    best = 0
    for M in all_pairings(list(range(G.size))):
        partner = [0] * G.size
        for u, v in M:
            partner[u], partner[v] = v, u
        best = max(best, brute_faces(G, partner))
    return best


def all_pairings(items):
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for k, other in enumerate(rest):
        for tail in all_pairings(rest[:k] + rest[k + 1:]):
            yield [(first, other)] + tail


def random_perm(size, rng):
    perm = list(range(size))
    rng.shuffle(perm)
    return perm


def all_graphs(n):
    """Every labelled graph on 2n vertices with E1 = {0,1},{2,3},..."""
    size = 2 * n
    e1 = tuple(v ^ 1 for v in range(size))
    pairings = []
    for P in all_pairings(list(range(size))):
        partner = [0] * size
        for u, v in P:
            partner[u], partner[v] = v, u
        pairings.append(tuple(partner))
    for e2, e3 in itertools.product(pairings, repeat=2):
        yield ColoredGraph(n, (e1, e2, e3))
