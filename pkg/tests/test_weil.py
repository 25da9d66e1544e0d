"""Finite oscillator model: generators, group laws, and the projections."""

import numpy as np
import pytest
from gmpy2 import mpq

from padichi.exact import Mat, char_value, frac_part
from padichi.harness import rng_for, sample_sl2
from padichi.weil import (
    FiniteModel, FiniteOperator, WindowViolation, covariance_defect, heis_op,
    identity_op, is_window_compatible, lambda_op, projective_scalar,
    sl2_factor, theta_op, token_product, weil_diag, weil_fourier, weil_of,
    weil_upper,
)

M31 = FiniteModel(3, 1)


def test_model_validation():
    with pytest.raises(ValueError):
        FiniteModel(2, 1)
    with pytest.raises(ValueError):
        FiniteModel(4, 1)
    with pytest.raises(ValueError):
        FiniteModel(5, 3)          # dimension bound
    assert FiniteModel(5, 2).dim == 625
    assert M31.index(mpq(4, 3)) == M31.index(mpq(4, 3) + 9)
    with pytest.raises(WindowViolation):
        M31.index(mpq(1, 9))


def test_phase_constant_on_cosets():
    # The well-definedness that the window precondition buys.
    v = mpq(2, 3)
    for x in (mpq(1, 3), mpq(5, 3)):
        assert frac_part(v * x, 3) == frac_part(v * (x + 3), 3)


def test_heis_zero_is_identity():
    op = heis_op(M31, 0, 0, lam=1j)
    assert np.abs(op.matrix - 1j * np.eye(9)).max() < 1e-15


def test_heis_unitary_and_window():
    op = heis_op(M31, mpq(1, 3), mpq(2, 3))
    assert op.unitary_defect() < 1e-9
    with pytest.raises(WindowViolation):
        heis_op(M31, mpq(1, 9), 0)
    with pytest.raises(ValueError):
        heis_op(M31, 0, 0, lam=2.0)
    with pytest.raises(ValueError):
        heis_op(M31, 0, 0, convention="sideways")


def test_heis_group_law_and_commutator():
    rng = rng_for(61, "heis", 0)
    for _ in range(6):
        v = (mpq(rng.randint(-4, 4), 3), mpq(rng.randint(-4, 4), 3))
        w = (mpq(rng.randint(-4, 4), 3), mpq(rng.randint(-4, 4), 3))
        A, B = heis_op(M31, *v), heis_op(M31, *w)
        pairing = v[0] * w[1] - v[1] * w[0]
        prod = A.matrix @ B.matrix
        want = char_value(pairing / 2, 3) * heis_op(M31, v[0] + w[0], v[1] + w[1]).matrix
        assert np.abs(prod - want).max() < 1e-10
        comm = prod @ A.adjoint().matrix @ B.adjoint().matrix
        assert np.abs(comm - char_value(pairing, 3) * np.eye(9)).max() < 1e-10


def test_as_written_convention_commutes():
    v, w = (mpq(1, 3), mpq(2, 3)), (mpq(2, 3), mpq(1))
    A = heis_op(M31, *v, convention="as_written")
    B = heis_op(M31, *w, convention="as_written")
    comm = A.matrix @ B.matrix @ A.adjoint().matrix @ B.adjoint().matrix
    assert np.abs(comm - np.eye(9)).max() < 1e-10


def test_fourier_squares_to_parity():
    for model in (M31, FiniteModel(3, 2), FiniteModel(5, 1)):
        F = weil_fourier(model)
        assert F.unitary_defect() < 1e-9
        parity = np.zeros((model.dim, model.dim))
        for i in range(model.dim):
            parity[i, (-i) % model.dim] = 1
        assert np.abs((F @ F).matrix - parity).max() < 1e-10
        F2 = (F @ F).matrix
        assert np.abs(F2 @ F2 - np.eye(model.dim)).max() < 1e-10


def test_diag_upper_basics():
    assert np.abs(weil_diag(M31, 1).matrix - np.eye(9)).max() == 0
    assert np.abs(weil_upper(M31, 0).matrix - np.eye(9)).max() == 0
    assert weil_diag(M31, mpq(2, 5)).unitary_defect() < 1e-9
    assert weil_upper(M31, 2).unitary_defect() < 1e-9
    with pytest.raises(WindowViolation):
        weil_diag(M31, 3)
    with pytest.raises(WindowViolation):
        weil_upper(M31, mpq(1, 3))


def test_sl2_factor_exact():
    cases = [Mat.identity(2), Mat([[0, 1], [-1, 0]]), Mat([[2, 1], [1, 1]]),
             Mat([[1, 4], [0, 1]]), Mat([[mpq(1, 2), 0], [0, 2]]),
             Mat([[5, 2], [2, 1]]), Mat([[1, 0], [7, 1]])]
    for g in cases:
        assert token_product(sl2_factor(g)) == g
    assert sl2_factor(Mat.identity(2)) == []
    assert sl2_factor(Mat([[0, 1], [-1, 0]])) == [("J",)]
    with pytest.raises(ValueError):
        sl2_factor(Mat([[2, 0], [0, 1]]))


def test_weil_of_identity_and_unitarity():
    assert np.abs(weil_of(M31, Mat.identity(2)).matrix - np.eye(9)).max() == 0
    rng = rng_for(67, "unit", 0)
    for _ in range(5):
        g = sample_sl2(rng, 3)
        assert weil_of(M31, g).unitary_defect() < 1e-9


def test_weil_window_propagates():
    with pytest.raises(WindowViolation):
        weil_of(M31, Mat([[1, 0], [3, 1]]))   # factor needs D(-1/3)
    assert not is_window_compatible(Mat([[1, 0], [3, 1]]), 3)


def test_projectivity_sample():
    rng = rng_for(71, "proj", 0)
    model = FiniteModel(3, 2)
    done = 0
    while done < 10:
        g, h = sample_sl2(rng, 3), sample_sl2(rng, 3)
        if not is_window_compatible(g * h, 3):
            continue
        done += 1
        X = (weil_of(model, g) @ weil_of(model, h)).matrix
        Y = weil_of(model, g * h).matrix
        s = projective_scalar(X, Y)
        assert abs(abs(s) - 1) < 1e-9
        assert np.linalg.norm(X - s * Y, 2) < 1e-8


def test_covariance():
    rng = rng_for(73, "cov", 0)
    for _ in range(6):
        g = sample_sl2(rng, 3)
        v = (mpq(rng.randint(-3, 3)), mpq(rng.randint(-3, 3)))
        res, mod = covariance_defect(M31, g, *v)
        assert res < 1e-8 and abs(mod - 1) < 1e-9


def test_lambda_theta_algebra():
    for p in (3, 5):
        src = FiniteModel(p, 1)
        dst = FiniteModel(p, 1, 2)
        lam = lambda_op(src, dst)
        assert np.abs((lam.adjoint() @ lam).matrix - np.eye(src.dim)).max() < 1e-12
        th = theta_op(dst)
        assert np.abs((th @ th).matrix - th.matrix).max() < 1e-12
        assert np.abs(th.matrix - th.matrix.conj().T).max() < 1e-12
        # projects onto separated functions: theta . lam == lam
        assert np.abs((th @ lam).matrix - lam.matrix).max() < 1e-12
    with pytest.raises(ValueError):
        lambda_op(FiniteModel(3, 1), FiniteModel(3, 2, 2))
    with pytest.raises(ValueError):
        theta_op(M31)


def test_operator_chaining_rules():
    other = FiniteModel(5, 1)
    with pytest.raises(ValueError):
        identity_op(M31) @ identity_op(other)
    with pytest.raises(ValueError):
        FiniteOperator(M31, np.eye(3))
