import random
from fractions import Fraction

import pytest

from colorgraphs.bounds import (
    LemmaInapplicable,
    Rule,
    TheoremViolation,
    certified_lower_bound,
    find_flip,
    flip_improve,
    graph_faces,
    improve_by_swaps,
    parallel_matching,
    shared_color_edges,
)
from colorgraphs.graphcore import ColoredGraph, count_faces, face_profile, random_graph
from colorgraphs.matching import faces_with_color0, max_faces
from colorgraphs.survey import class_graphs
from oracles import NO_FLIP_N8, brute_max_faces


def test_parallel_matching_on_tetrahedron(tetrahedron):
    for i in (1, 2, 3):
        assert faces_with_color0(tetrahedron, parallel_matching(tetrahedron, i)) == 4


def test_parallel_matching_rejects_bad_color(tetrahedron):
    with pytest.raises(ValueError):
        parallel_matching(tetrahedron, 0)


def test_parallel13_gives_n_plus_face_counts(parallel13):
    assert faces_with_color0(parallel13, parallel_matching(parallel13, 1)) == 2 + 1 + 2
    assert faces_with_color0(parallel13, parallel_matching(parallel13, 3)) == 2 + 2 + 1
    assert faces_with_color0(parallel13, parallel_matching(parallel13, 2)) == 2 + 1 + 1
    assert max_faces(parallel13).max_f == 5


def test_shared_edges_when_e3_copies_e1(parallel13):
    (c12,) = graph_faces(parallel13, 1, 2)
    digons = graph_faces(parallel13, 1, 3)
    assert len(digons) == 2
    for d in digons:
        assert len(shared_color_edges(parallel13, c12, d)) == 1
    (c21,) = graph_faces(parallel13, 2, 1)
    (c23,) = graph_faces(parallel13, 2, 3)
    shared = shared_color_edges(parallel13, c21, c23)
    assert [e.key for e in shared] == [(0, 3), (1, 2)]


def test_shared_edges_need_a_common_color(tetrahedron):
    (a,) = graph_faces(tetrahedron, 1, 2)
    (b,) = graph_faces(tetrahedron, 2, 3)
    with pytest.raises(ValueError):
        shared_color_edges(tetrahedron, a, b)


def test_flip_needs_three_shared_edges(tetrahedron):
    (C,) = graph_faces(tetrahedron, 1, 2)
    (C2,) = graph_faces(tetrahedron, 1, 3)
    with pytest.raises(LemmaInapplicable):
        flip_improve(tetrahedron, parallel_matching(tetrahedron, 1), C, C2)
    assert find_flip(tetrahedron, 1, 2, 3) is None


def test_flip_needs_the_parallel_matching(violators16):
    G = violators16[0]
    (C,) = graph_faces(G, 1, 2)
    (C2,) = graph_faces(G, 1, 3)
    with pytest.raises(ValueError, match="parallel"):
        flip_improve(G, parallel_matching(G, 2), C, C2)


def test_flip_reaches_the_maximum_on_n3_mst_classes():
    mst = [G for G in class_graphs(3, "single_face_pair") if face_profile(G).is_mst]
    assert len(mst) == 2
    for G in mst:
        assert faces_with_color0(G, parallel_matching(G, 1)) == 5
        new, data = find_flip(G, 1, 2, 3)
        assert faces_with_color0(G, new) == 6 == brute_max_faces(G)
        assert data.colors == (1, 2, 3)


def test_flip_on_every_fixture(violators16):
    for G in violators16:
        for i, j, k in ((1, 2, 3), (2, 1, 3), (3, 1, 2)):
            M = parallel_matching(G, i)
            (C,) = graph_faces(G, i, j)
            (C2,) = graph_faces(G, i, k)
            new = flip_improve(G, M, C, C2)
            assert faces_with_color0(G, M) == 10
            assert faces_with_color0(G, new) == 11


def test_flip_is_a_double_transposition(violators16):
    G = violators16[0]
    new, data = find_flip(G, 1, 2, 3)
    old = parallel_matching(G, 1)
    changed = {v for v in range(G.size) if new.partner[v] != old.partner[v]}
    assert changed == set(data.e) | set(data.f)
    assert {tuple(sorted(data.e_new)), tuple(sorted(data.f_new))} <= set(new.edges())


def test_certificates_are_attained_and_sound(rng):
    for _ in range(300):
        G = random_graph(rng.randint(1, 7), rng)
        cert = certified_lower_bound(G)
        assert faces_with_color0(G, cert.witness) == cert.bound
        assert cert.bound <= max_faces(G).max_f


def test_certificate_rules(tetrahedron, violators16):
    cert = certified_lower_bound(tetrahedron)
    assert cert.rule is Rule.PARALLEL and cert.bound == 4
    assert certified_lower_bound(violators16[0]).bound == 10
    G = ColoredGraph(2, ((1, 0, 3, 2), (3, 2, 1, 0), (3, 2, 1, 0)))
    cert = certified_lower_bound(G)
    assert cert.rule is Rule.PARALLEL_BEST_COLOR and cert.color == 2
    assert cert.bound == 2 + count_faces(G, 2, 1) + count_faces(G, 2, 3) == 5
    d = cert.to_dict()
    assert d["rule"] == "parallel_best_color" and d["flip"] is None


def test_non_mst_classes_up_to_n7_are_certified():
    for n in range(1, 8):
        for G in class_graphs(n, "single_face_pair"):
            if face_profile(G).is_mst:
                continue
            cert = certified_lower_bound(G)
            assert cert.bound > Fraction(3 * n, 2), (n, cert)


def test_all_connected_small_classes_are_certified():
    for n in range(1, 6):
        for G in class_graphs(n):
            if face_profile(G).is_mst:
                continue
            assert certified_lower_bound(G).bound > Fraction(3 * n, 2)


def test_flip_certificates_appear():
    rules = set()
    rng = random.Random(3)
    for _ in range(400):
        G = random_graph(7, rng)
        cert = certified_lower_bound(G)
        rules.add(cert.rule)
        if cert.rule is Rule.FLIP:
            assert cert.flip is not None
            assert cert.bound == 7 + max(
                count_faces(G, i, j) + count_faces(G, i, k) for i, j, k in ((1, 2, 3), (2, 1, 3), (3, 1, 2))) + 1
    assert Rule.FLIP in rules


def test_n8_profile_without_any_flip():
    # the bound machinery cannot certify this graph; exhaustive search can
    assert face_profile(NO_FLIP_N8).as_tuple() == (2, 2, 2)
    for i, j, k in ((1, 2, 3), (2, 1, 3), (3, 1, 2)):
        assert find_flip(NO_FLIP_N8, i, j, k) is None
        for C in graph_faces(NO_FLIP_N8, i, j):
            for C2 in graph_faces(NO_FLIP_N8, i, k):
                assert len(shared_color_edges(NO_FLIP_N8, C, C2)) == 2
    with pytest.raises(TheoremViolation):
        certified_lower_bound(NO_FLIP_N8)
    assert max_faces(NO_FLIP_N8).max_f == 14 > 12


def test_swap_hill_climb_never_loses(rng):
    for _ in range(30):
        G = random_graph(rng.randint(2, 5), rng)
        M = parallel_matching(G, 1)
        start = faces_with_color0(G, M)
        better, value = improve_by_swaps(G, M)
        assert value == faces_with_color0(G, better) >= start
        assert value <= max_faces(G).max_f
