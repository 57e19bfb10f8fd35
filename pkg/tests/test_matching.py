import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from colorgraphs import _kernels
from colorgraphs.graphcore import (
    COLOR_PAIRS,
    ColoredGraph,
    count_faces,
    cycle_graph_matchings,
    disjoint_union,
    random_graph,
)
from colorgraphs.matching import (
    Matching,
    MemoryCapExceeded,
    PartialFaceTable,
    enumerate_matchings,
    face_histogram,
    faces_with_color0,
    matching_count,
    max_faces,
    precompute_partial_faces,
    table_bytes,
)
from oracles import all_graphs, all_pairings, brute_faces, brute_max_faces


@pytest.mark.parametrize("m, count", [(1, 1), (2, 3), (3, 15), (4, 105), (5, 945)])
def test_stream_length_and_uniqueness(m, count):
    seen = [M.partner for M in enumerate_matchings(m)]
    assert len(seen) == count == matching_count(m)
    assert len(set(seen)) == count
    assert set(seen) == {
        tuple(p[v] for v in range(2 * m))
        for p in ({u: w for e in P for u, w in (e, e[::-1])} for P in all_pairings(list(range(2 * m))))
    }


def test_kernel_stream_at_m8():
    total = matching_count(8)
    assert total == 2_027_025
    arr = _kernels.all_matchings(8, total)
    assert arr.shape == (total, 16)
    assert (arr[np.arange(total)[:, None], arr] == np.arange(16)).all()
    assert len(np.unique(arr, axis=0)) == total


@pytest.mark.parametrize("m", [1, 2, 3, 4, 5])
def test_rank_and_unrank_follow_the_stream(m):
    for i, M in enumerate(enumerate_matchings(m)):
        assert Matching.from_index(m, i) == M
        assert M.index == i


def test_from_index_range():
    with pytest.raises(IndexError):
        Matching.from_index(2, 3)


def test_triple_edge_has_three_faces(triple_edge):
    res = max_faces(triple_edge)
    assert res.max_f == 3 and res.exact
    assert face_histogram(triple_edge) == {3: 1}


def test_tetrahedron_maximum(tetrahedron):
    assert faces_with_color0(tetrahedron, Matching(tetrahedron.partners[0])) == 4
    res = max_faces(tetrahedron, count_maximizers=True)
    assert res.max_f == 4
    assert res.maximizer_count == 3
    assert face_histogram(tetrahedron) == {4: 3}


def test_matching_size_mismatch(tetrahedron):
    with pytest.raises(ValueError):
        faces_with_color0(tetrahedron, Matching((1, 0)))


graphs = st.builds(lambda n, s: random_graph(n, random.Random(s)),
                   st.integers(1, 6), st.integers(0, 2**32))


@settings(max_examples=150, deadline=None)
@given(graphs)
def test_parallel_matching_identity(G):
    for i in (1, 2, 3):
        j, k = (c for c in (1, 2, 3) if c != i)
        M = Matching(G.partners[i - 1])
        assert faces_with_color0(G, M) == G.n + count_faces(G, i, j) + count_faces(G, i, k)


@settings(max_examples=150, deadline=None)
@given(graphs, st.integers(0, 2**32))
def test_face_count_envelope(G, seed):
    idx = random.Random(seed).randrange(matching_count(G.n))
    M = Matching.from_index(G.n, idx)
    f = faces_with_color0(G, M)
    assert f == brute_faces(G, M.partner)
    assert 3 <= f <= 3 * G.n


@settings(max_examples=60, deadline=None)
@given(st.builds(lambda n, s: random_graph(n, random.Random(s)), st.integers(1, 5), st.integers(0, 2**32)))
def test_all_search_modes_agree_with_brute_force(G):
    want = brute_max_faces(G)
    results = [max_faces(G, bound=b) for b in ("tight", "simple", "none")]
    for res in results:
        assert res.max_f == want and res.exact
        assert faces_with_color0(G, res.witness) == want
    assert len({r.witness for r in results}) == 1
    assert results[2].maximizer_count == face_histogram(G)[want]
    assert results[0].maximizer_count is None


def test_every_n2_graph_against_brute_force():
    for G in all_graphs(2):
        hist = face_histogram(G)
        assert sum(hist.values()) == 3
        assert max(hist) == brute_max_faces(G) == max_faces(G).max_f


def test_witness_is_first_maximizer(rng):
    for _ in range(50):
        G = random_graph(rng.randint(2, 5), rng)
        res = max_faces(G)
        first = next(M for M in enumerate_matchings(G.n) if faces_with_color0(G, M) == res.max_f)
        assert res.witness == first
        assert max_faces(G, lower_bound=res.max_f).witness == first


def test_pruning_skips_work(violators16):
    G = violators16[0]
    res = max_faces(G)
    assert res.max_f == 12
    assert res.pruned > 0
    assert res.matchings_examined < matching_count(8)


def test_budget_marks_result_inexact(violators16):
    res = max_faces(violators16[0], budget=50)
    assert not res.exact
    assert res.maximizer_count is None
    assert 3 <= res.max_f <= 12
    assert faces_with_color0(violators16[0], res.witness) == res.max_f


def test_stop_above_returns_early(violators16):
    res = max_faces(violators16[0], stop_above=11)
    assert res.max_f == 12 and not res.exact
    settled = max_faces(violators16[0], stop_above=12)
    assert settled.max_f == 12 and settled.exact
    G = random_graph(8, random.Random(5))
    early = max_faces(G, stop_above=12)
    assert early.max_f > 12 and faces_with_color0(G, early.witness) == early.max_f


def test_unknown_bound(tetrahedron):
    with pytest.raises(ValueError):
        max_faces(tetrahedron, bound="loose")


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 3), st.integers(1, 3), st.integers(0, 2**32))
def test_union_is_superadditive(n, m, seed):
    rng = random.Random(seed)
    G, H = random_graph(n, rng), random_graph(m, rng)
    U = disjoint_union(G, H)
    assert max_faces(U).max_f >= max_faces(G).max_f + max_faces(H).max_f


def test_partial_table_matches_direct_counts():
    table = precompute_partial_faces(2)
    e1, e2 = cycle_graph_matchings(2)
    assert len(table) == 3
    for i, M in enumerate(enumerate_matchings(2)):
        from oracles import union_components
        assert table[i] == (union_components(4, M.partner, e1), union_components(4, M.partner, e2))
    for G in all_graphs(2):
        if G.partners[1] == e2:
            res = table.max_faces(G.partners[2])
            assert res.max_f == max_faces(G).max_f
            assert res.maximizer_count == face_histogram(G)[res.max_f]


def test_partial_table_scan_at_m5(rng):
    table = precompute_partial_faces(5)
    e1, e2 = cycle_graph_matchings(5)
    for _ in range(20):
        e3 = random_graph(5, rng).partners[2]
        G = ColoredGraph(5, (e1, e2, e3))
        res = table.max_faces(e3)
        ref = max_faces(G)
        assert (res.max_f, res.witness) == (ref.max_f, ref.witness)


def test_partial_table_save_load(tmp_path):
    table = precompute_partial_faces(4)
    path = tmp_path / "t4.bin"
    table.save(path)
    back = PartialFaceTable.load(path)
    assert back.m == 4
    assert np.array_equal(back.f01, table.f01) and np.array_equal(back.f02, table.f02)
    assert np.array_equal(back.e1, table.e1) and np.array_equal(back.e2, table.e2)
    path.write_bytes(path.read_bytes()[:-1])
    with pytest.raises(ValueError, match="truncated"):
        PartialFaceTable.load(path)
    path.write_bytes(b"garbage" * 10)
    with pytest.raises(ValueError, match="not a partial-face table"):
        PartialFaceTable.load(path)


def test_memory_cap_refusal():
    assert table_bytes(9) > 600_000_000
    with pytest.raises(MemoryCapExceeded):
        precompute_partial_faces(9, memory_cap=1 << 20)
    with pytest.raises(MemoryCapExceeded):
        precompute_partial_faces(11)


@pytest.mark.parametrize("i,j", COLOR_PAIRS)
def test_custom_table_matchings(i, j, rng):
    G = random_graph(4, rng)
    table = precompute_partial_faces(4, G.partners[i - 1], G.partners[j - 1])
    k = 6 - i - j
    assert table.max_faces(G.partners[k - 1]).max_f == max_faces(G).max_f
