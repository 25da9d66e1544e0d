"""Submodule calculus: frozen worked examples and structural laws.

The binary operations are deliberately tested against each other
(module_kernel vs intersect vs intersect_subspace compute the same sets
through different code paths), so a bug in one chain trips a cross-check.
"""

import pytest
from gmpy2 import mpq
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import mats, padic_rationals, zp_integers
from padichi.exact import Mat, kernel, p_pow, vstack
from padichi.modules import (
    Module, dual, embed_coords, full_space, image, intersect,
    intersect_subspace, is_almost_selfdual, is_isotropic, is_selfdual,
    line, module_kernel, module_sum, preimage, preimage_of_std,
    project_coords, standard_lattice, symplectic_gram,
    tensor_with_standard, zero_module,
)

P = st.sampled_from([2, 3, 5])


def modules_st(p, n, max_free=1, max_int=3):
    ents = padic_rationals(p, lo=-6, hi=6, emin=-1, emax=1)
    return st.builds(
        lambda fr, it: Module(p, n, free=fr, integral=it),
        st.lists(st.lists(ents, min_size=n, max_size=n), max_size=max_free),
        st.lists(st.lists(ents, min_size=n, max_size=n), max_size=max_int),
    )


def _combo(R, coeffs_q, coeffs_z):
    """A vector of R: rational combo of free gens + integral combo of int gens."""
    v = [mpq(0)] * R.ambient
    for c, g in zip(coeffs_q, R.free.rows):
        v = [a + c * b for a, b in zip(v, g)]
    for c, g in zip(coeffs_z, R.int_part.rows):
        v = [a + c * b for a, b in zip(v, g)]
    return v


# ------------------------------------------------------------- frozen values

def test_intersect_two_lattices():
    p = 3
    got = intersect(standard_lattice(p, 2),
                    Module(p, 2, integral=[[p, 0], [0, mpq(1, p)]]))
    assert got == Module(p, 2, integral=[[p, 0], [0, 1]])


def test_intersect_line_with_lattice():
    got = intersect(line(3, [1, 1]), standard_lattice(3, 2))
    assert got == Module(3, 2, integral=[[1, 1]])
    assert got.is_compact() and not got.is_lattice()


def test_module_kernel_frozen():
    # x1 + x2 = 0 inside O^2
    got = module_kernel(Mat([[1], [1]]), standard_lattice(3, 2))
    assert got == Module(3, 2, integral=[[1, -1]])


def test_dual_frozen():
    B = Mat([[0, 1], [1, 0]])
    R = Module(3, 2, integral=[[mpq(1, 3), 0], [0, 1]])
    assert dual(R, B) == Module(3, 2, integral=[[1, 0], [0, 3]])


def test_image_preimage_frozen():
    p = 3
    assert image(standard_lattice(p, 2), Mat.diagonal([p, 1])) == \
        Module(p, 2, integral=[[p, 0], [0, 1]])
    # first-coordinate map: {x : x_1 in O} = O e1 + Q e2
    got = preimage(Mat([[1], [0]]), standard_lattice(p, 1))
    assert got == Module(p, 2, free=[[0, 1]], integral=[[1, 0]])


def test_selfdual_classification_examples():
    J = symplectic_gram(1)
    p = 3
    assert is_selfdual(standard_lattice(p, 2), J)
    halfway = Module(p, 2, integral=[[mpq(1, p), 0], [0, 1]])
    assert is_almost_selfdual(halfway, J) and not is_selfdual(halfway, J)
    toobig = Module(p, 2, integral=[[mpq(1, p), 0], [0, mpq(1, p)]])
    assert not is_almost_selfdual(toobig, J)
    assert is_isotropic(Module(p, 2, integral=[[p, 0], [0, p]]), J)


def test_canonical_form_separates_free_and_int():
    S = module_sum(line(3, [1, 0]), standard_lattice(3, 2))
    assert S.free == Mat([[1, 0]]) and S.int_part == Mat([[0, 1]])
    assert S.contains_vector([mpq(22, 7), 1])
    assert not S.contains_vector([0, mpq(1, 3)])


def test_zero_and_full():
    z = zero_module(5, 3)
    assert z.is_zero() and z.is_compact() and not z.is_open()
    f = full_space(5, 3)
    assert f.is_open() and f.is_subspace() and f.contains(z)
    assert standard_lattice(5, 3).is_lattice()


# ------------------------------------------------------------------- laws

@given(P, st.data())
@settings(max_examples=50)
def test_equality_is_generator_independent(p, data):
    R = data.draw(modules_st(p, 3))
    # shuffle in redundant generators: rational combos into the free part,
    # integral combos (plus free vectors) into the lattice part
    qc = data.draw(st.lists(padic_rationals(p), min_size=R.free.nrows,
                            max_size=R.free.nrows))
    zc = data.draw(st.lists(zp_integers(p), min_size=R.int_part.nrows,
                            max_size=R.int_part.nrows))
    extra = _combo(R, qc, zc)
    R2 = Module(p, 3, free=R.free, integral=vstack(R.int_part, Mat([extra])))
    if all(e == 0 for e in _combo(R, qc, [0] * R.int_part.nrows)) or \
            any(c != 0 for c in qc):
        # extra lies in R either way; adding it must not move the canon
        assert R2 == R or not R.contains_vector(extra)
    if R.contains_vector(extra):
        assert R2 == R


@given(P, st.data())
@settings(max_examples=50)
def test_membership_of_combinations(p, data):
    R = data.draw(modules_st(p, 3))
    qc = data.draw(st.lists(padic_rationals(p), min_size=R.free.nrows,
                            max_size=R.free.nrows))
    zc = data.draw(st.lists(zp_integers(p), min_size=R.int_part.nrows,
                            max_size=R.int_part.nrows))
    assert R.contains_vector(_combo(R, qc, zc))


@given(P, st.data())
@settings(max_examples=40)
def test_intersect_is_the_meet(p, data):
    R = data.draw(modules_st(p, 3))
    S = data.draw(modules_st(p, 3))
    both = intersect(R, S)
    assert R.contains(both) and S.contains(both)
    assert both == intersect(S, R)
    # any sampled vector lying in both must already be in the intersection
    qc = data.draw(st.lists(padic_rationals(p), min_size=R.free.nrows,
                            max_size=R.free.nrows))
    zc = data.draw(st.lists(zp_integers(p), min_size=R.int_part.nrows,
                            max_size=R.int_part.nrows))
    x = _combo(R, qc, zc)
    if S.contains_vector(x):
        assert both.contains_vector(x)
    # sum is the join
    total = module_sum(R, S)
    assert total.contains(R) and total.contains(S)
    assert intersect(R, total) == R


@given(P, st.data())
@settings(max_examples=40)
def test_kernel_routes_agree(p, data):
    R = data.draw(modules_st(p, 3))
    A = data.draw(mats(3, 2, padic_rationals(p, lo=-4, hi=4)))
    via_kernel = module_kernel(A, R)
    ker_basis = kernel(A)
    via_subspace = intersect_subspace(ker_basis, R)
    via_intersect = intersect(R, Module(p, 3, free=ker_basis))
    assert via_kernel == via_subspace == via_intersect
    for g in via_kernel.gens().rows:
        assert all(e == 0 for e in (Mat([list(g)]) * A).rows[0])
        assert R.contains_vector(g)


@given(P, st.data())
@settings(max_examples=40)
def test_preimage_definition(p, data):
    R = data.draw(modules_st(p, 2))
    A = data.draw(mats(3, 2, padic_rationals(p, lo=-4, hi=4)))
    pre = preimage(A, R)
    for g in pre.int_part.rows:
        assert R.contains_vector((Mat([list(g)]) * A).rows[0])
    for g in pre.free.rows:
        img = (Mat([list(g)]) * A).rows[0]
        assert R.down().contains_vector(img)   # a line maps into a line
    # completeness on random probes
    x = data.draw(st.lists(padic_rationals(p), min_size=3, max_size=3))
    if R.contains_vector((Mat([x]) * A).rows[0]):
        assert pre.contains_vector(x)
    # adjunction
    assert preimage(A, image(R2 := data.draw(modules_st(p, 3)), A)).contains(R2)


@given(P, st.data())
@settings(max_examples=40)
def test_preimage_of_std_definition(p, data):
    M = data.draw(mats(3, 2, padic_rationals(p, lo=-4, hi=4)))
    T = preimage_of_std(M, p)
    lat = standard_lattice(p, 2)
    for g in T.int_part.rows:
        assert lat.contains_vector((Mat([list(g)]) * M).rows[0])
    for g in T.free.rows:
        assert all(e == 0 for e in (Mat([list(g)]) * M).rows[0])
    z = data.draw(st.lists(padic_rationals(p), min_size=3, max_size=3))
    if lat.contains_vector((Mat([z]) * M).rows[0]):
        assert T.contains_vector(z)


@given(P, st.data())
@settings(max_examples=40)
def test_dual_laws(p, data):
    J = symplectic_gram(2)
    R = data.draw(modules_st(p, 4, max_free=1, max_int=3))
    S = data.draw(modules_st(p, 4, max_free=1, max_int=3))
    # contravariance and involutivity against a nondegenerate form
    assert dual(module_sum(R, S), J) == intersect(dual(R, J), dual(S, J))
    assert dual(dual(R, J), J) == R
    if R.contains(S):
        assert dual(S, J).contains(dual(R, J))
    c = p_pow(p, data.draw(st.integers(-2, 2)))
    assert dual(R.scale(c), J) == dual(R, J).scale(1 / c)


@given(P, st.data())
@settings(max_examples=40)
def test_down_up_sandwich(p, data):
    R = data.draw(modules_st(p, 3))
    lo, hi = R.down(), R.up()
    assert R.contains(lo) and hi.contains(R)
    assert lo.is_subspace() and hi.is_subspace()
    assert (R == lo) == R.is_subspace()


@given(P, st.integers(1, 3), st.data())
@settings(max_examples=30)
def test_tensor_with_standard(p, m, data):
    assert tensor_with_standard(standard_lattice(p, 4), m) == \
        standard_lattice(p, 4 * m)
    R = data.draw(modules_st(p, 4, max_free=1, max_int=2))
    S = data.draw(modules_st(p, 4, max_free=1, max_int=2))
    RT, ST = tensor_with_standard(R, m), tensor_with_standard(S, m)
    assert tensor_with_standard(intersect(R, S), m) == intersect(RT, ST)
    assert tensor_with_standard(module_sum(R, S), m) == module_sum(RT, ST)


@given(P, st.data())
@settings(max_examples=30)
def test_project_embed_roundtrip(p, data):
    R = data.draw(modules_st(p, 2))
    E = embed_coords(R, 4, [1, 3])
    assert project_coords(E, [1, 3]) == R
    assert project_coords(E, [0, 2]).is_zero()


@given(P, st.integers(0, 3), st.data())
@settings(max_examples=30)
def test_approx_contains_is_graded(p, t, data):
    R = data.draw(modules_st(p, 3))
    x = data.draw(st.lists(padic_rationals(p), min_size=3, max_size=3))
    if R.approx_contains(x, t):
        assert R.approx_contains(x, t - 1)      # coarser fuzz keeps members
    if R.contains_vector(x):
        assert R.approx_contains(x, t)


def test_mismatched_modules_raise():
    with pytest.raises(ValueError):
        intersect(standard_lattice(3, 2), standard_lattice(5, 2))
    with pytest.raises(ValueError):
        module_sum(standard_lattice(3, 2), standard_lattice(3, 3))
    with pytest.raises(ValueError):
        standard_lattice(3, 2).contains_vector([1, 2, 3])
