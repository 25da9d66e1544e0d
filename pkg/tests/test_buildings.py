"""Vertex classification, local neighbors, and the continuity harness."""

import itertools

import pytest
from gmpy2 import mpq

from padichi.buildings import (
    VertexPair, ascend_check, chi_graph_morphism_check, classify,
    continuity_check, documented_sequence, has_arrow, neighbors_over,
)
from padichi.exact import Mat, p_pow
from padichi.harness import rng_for, sample_block_element
from padichi.modules import (
    Module, intersect, is_almost_selfdual, is_selfdual, standard_lattice,
    symplectic_gram,
)

P = 3


def diag_lattice(p, exps):
    return Module(p, len(exps), free=[],
                  integral=[[p_pow(p, e) if j == i else mpq(0)
                             for j in range(len(exps))]
                            for i, e in enumerate(exps)])


def test_classify_frozen():
    assert classify(standard_lattice(P, 2)) == "selfdual"
    assert classify(diag_lattice(P, [-1, 0])) == "almost_selfdual"
    assert classify(diag_lattice(P, [-1, -1])) == "neither"
    assert classify(diag_lattice(P, [-1, 1])) == "selfdual"
    with pytest.raises(ValueError):
        classify(Module(P, 3, free=[], integral=Mat.identity(3)))


def test_classify_figure_grid_exhaustive():
    # Paired coordinates (1,3) and (2,4): almost self-dual iff each pair of
    # exponents sums to 0 or -1, self-dual iff both sums are 0.
    gram = symplectic_gram(2)
    for k1, k2, l1, l2 in itertools.product(range(-2, 3), repeat=4):
        R = diag_lattice(P, [k1, k2, l1, l2])
        label = classify(R, gram)
        s1, s2 = k1 + l1, k2 + l2
        if s1 == 0 and s2 == 0:
            assert label == "selfdual"
        elif s1 in (0, -1) and s2 in (0, -1):
            assert label == "almost_selfdual"
        else:
            assert label == "neither"


def test_arrows():
    O = standard_lattice(P, 2)
    asd = diag_lattice(P, [-1, 0])
    assert has_arrow(asd, asd)
    assert has_arrow(asd, O) and not has_arrow(O, asd)
    skew = diag_lattice(P, [-1, 1])
    assert not has_arrow(O, skew) and not has_arrow(skew, O)
    with pytest.raises(ValueError):
        has_arrow(O, diag_lattice(P, [-1, -1]))


def test_neighbors_counts_and_soundness():
    for p in (3, 5):
        nb = neighbors_over(1, p)
        assert len(nb) == p + 2           # the lattice itself plus p+1 strict
        assert nb[0] == standard_lattice(p, 2)
        gram = symplectic_gram(1)
        assert all(is_almost_selfdual(R, gram) for R in nb)
        assert len(set(nb)) == len(nb)
    assert len(neighbors_over(2, 3)) == 81  # 1 + 40 lines + 40 planes
    with pytest.raises(ValueError):
        neighbors_over(3, 3)
    with pytest.raises(ValueError):
        neighbors_over(1, 7)


def test_neighbors_complete_by_brute_force():
    reps = [(a, b) for a in range(3) for b in range(3)]
    found = set()
    base = list(standard_lattice(3, 2).int_part.rows)
    for r in range(5):
        for chosen in itertools.combinations(reps, r):
            ints = base + [[mpq(a, 3), mpq(b, 3)] for a, b in chosen]
            R = Module(3, 2, free=[], integral=ints)
            if is_almost_selfdual(R, symplectic_gram(1)):
                found.add(R)
    assert found == set(neighbors_over(1, 3))


def test_vertex_pair_validation():
    O = standard_lattice(P, 2)
    with pytest.raises(ValueError):
        VertexPair(diag_lattice(P, [-1, -1]), O)
    VertexPair(O, O)


def test_morphism_check():
    O = standard_lattice(P, 2)
    big = diag_lattice(P, [-1, 0])
    for i in range(4):
        rng = rng_for(23, "morph", i)
        g = sample_block_element(rng, rng.choice([1, 2]), 1, 1, p=P)
        rep = chi_graph_morphism_check(g, VertexPair(big, O), VertexPair(O, O))
        assert rep["pass"], rep["witnesses"]
    rep = chi_graph_morphism_check(g, VertexPair(O, O), VertexPair(O, O))
    assert rep["pass"] and rep["equal"]
    with pytest.raises(ValueError):
        chi_graph_morphism_check(g, VertexPair(O, O), VertexPair(big, O))


def test_morphism_chain_composes():
    # Strict two-step chains need two hyperbolic pairs: at k=1 an almost
    # self-dual edge contains only self-dual vertices.
    rng = rng_for(27, "chain", 0)
    g = sample_block_element(rng, 1, 2, 1, p=P)
    O = standard_lattice(P, 4)
    mid = diag_lattice(P, [-1, 0, 0, 0])
    top = diag_lattice(P, [-1, -1, 0, 0])
    assert top.contains(mid) and mid.contains(O)
    a = chi_graph_morphism_check(g, VertexPair(top, O), VertexPair(mid, O))
    b = chi_graph_morphism_check(g, VertexPair(mid, O), VertexPair(O, O))
    c = chi_graph_morphism_check(g, VertexPair(top, O), VertexPair(O, O))
    assert a["pass"] and b["pass"] and c["pass"]


def test_ascend_documented_sequence():
    seq, lim = documented_sequence(P, 6)
    assert all(is_almost_selfdual(R, symplectic_gram(1)) for R in seq)
    assert is_almost_selfdual(lim, symplectic_gram(1))
    rep = ascend_check(seq, lim, 4)
    assert rep["pass"], rep["witnesses"]
    # constant sequence: trivially ascends
    O = standard_lattice(P, 2)
    assert ascend_check([O] * 3, O, 3)["pass"]


def test_ascend_detects_failure():
    O = standard_lattice(P, 2)
    wrong = documented_sequence(P, 3)[0]
    rep = ascend_check(wrong, O.scale(p_pow(P, -2)), 2)
    assert not rep["pass"]


def test_continuity_documented():
    seq, lim = documented_sequence(P, 6)
    O = standard_lattice(P, 2)
    for i in range(2):
        rng = rng_for(31, "cont", i)
        g = sample_block_element(rng, 1, 1, rng.choice([1, 2]), p=P)
        rep = continuity_check(g, seq, lim, O, 4)
        assert rep["pass"], rep["witnesses"]
        assert rep["depths"] == sorted(rep["depths"])
    with pytest.raises(ValueError):
        continuity_check(g, [diag_lattice(P, [-1, -1])], lim, O, 2)


def test_intersection_commutes_with_ascent():
    # Cutting an ascending family with a fixed module preserves ascent.
    seq, lim = documented_sequence(P, 6)
    L = diag_lattice(P, [1, -1])
    cut_seq = [intersect(L, R) for R in seq]
    cut_lim = intersect(L, lim)
    rep = ascend_check(cut_seq, cut_lim, 3)
    assert rep["pass"], rep["witnesses"]
