"""Finite-level oscillator model over the window p^{-N}O / p^N O.

Functions live on the finite quotient, one coordinate per copy of the
window, with the probability Haar normalization (point mass p^{-N} per
coordinate).  Shift-and-modulate operators realize the two-step
unipotent group; the Fourier, diagonal, and chirp operators generate a
projective action of SL(2) glued along an exact rational factorization.

p = 2 is excluded throughout: the half-integer phases need 2 invertible.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from gmpy2 import mpq

from .exact import Mat, char_value, check_prime, det, rat, valuation

MAX_DIM = 2000


class WindowViolation(ValueError):
    """An argument does not fit the finite window, or would alias on it."""


@dataclass(frozen=True)
class FiniteModel:
    p: int
    N: int
    coords: int = 1

    def __post_init__(self):
        check_prime(self.p)
        if self.p == 2:
            raise ValueError("the finite model needs an odd prime")
        if self.N < 0 or self.coords < 1:
            raise ValueError("bad window depth or coordinate count")
        if self.dim > MAX_DIM:
            raise ValueError(f"model dimension {self.dim} exceeds {MAX_DIM}")

    @property
    def dim1(self) -> int:
        return self.p ** (2 * self.N)

    @property
    def dim(self) -> int:
        return self.dim1 ** self.coords

    @property
    def mass(self) -> float:
        """Point mass: each coordinate contributes p^{-N}."""
        return float(self.p) ** (-self.N * self.coords)

    def index(self, x) -> int:
        """Position of x + p^N O in the window, for v_p(x) >= -N."""
        x = rat(x)
        if valuation(x, self.p) < -self.N:
            raise WindowViolation(f"{x} does not fit the window")
        scaled = x * self.p ** self.N
        num, den = int(scaled.numerator), int(scaled.denominator)
        return num * pow(den, -1, self.dim1) % self.dim1

    def rep(self, i) -> mpq:
        return mpq(i % self.dim1, self.p ** self.N)

    def char(self, q) -> complex:
        return char_value(q, self.p)


@dataclass(frozen=True)
class FiniteOperator:
    model: FiniteModel                 # output side
    matrix: np.ndarray
    src: FiniteModel = None            # input side; defaults to model

    def __post_init__(self):
        if self.src is None:
            object.__setattr__(self, "src", self.model)
        if self.matrix.shape != (self.model.dim, self.src.dim):
            raise ValueError("operator matrix has the wrong shape")

    def __matmul__(self, other: "FiniteOperator") -> "FiniteOperator":
        if other.model != self.src:
            raise ValueError("operator models do not chain")
        return FiniteOperator(self.model, self.matrix @ other.matrix, other.src)

    def adjoint(self) -> "FiniteOperator":
        """Adjoint for the measure-weighted inner products."""
        scale = self.model.mass / self.src.mass
        return FiniteOperator(self.src, scale * self.matrix.conj().T, self.model)

    def unitary_defect(self) -> float:
        a = (self.adjoint() @ self).matrix
        return float(np.abs(a - np.eye(self.src.dim)).max())


def identity_op(model: FiniteModel) -> FiniteOperator:
    return FiniteOperator(model, np.eye(model.dim, dtype=complex))


def _require_line(model: FiniteModel):
    if model.coords != 1:
        raise ValueError("this operator acts on single-coordinate models")


def heis_op(model: FiniteModel, v_plus, v_minus, lam=1.0,
            convention="corrected") -> FiniteOperator:
    """Shift by v+ with modulation phase v-.x (corrected convention) or
    v+.x (as written elsewhere), plus the half central term v+v-/2.

    Under "corrected" these satisfy the two-step group law with
    commutator phase v+w- - v-w+; under "as_written" they all commute."""
    _require_line(model)
    if convention not in ("corrected", "as_written"):
        raise ValueError(f"unknown convention {convention!r}")
    if abs(abs(lam) - 1) > 1e-9:
        raise ValueError("the scalar must be a complex unit")
    vp, vm = rat(v_plus), rat(v_minus)
    for v in (vp, vm):
        if valuation(v, model.p) < -model.N:
            raise WindowViolation(f"{v} does not fit the window")
    dim = model.dim
    half = mpq(1, 2) * vp * vm
    mat = np.zeros((dim, dim), dtype=complex)
    shift = model.index(vp)
    for ix in range(dim):
        x = model.rep(ix)
        phase = (vm if convention == "corrected" else vp) * x + half
        mat[ix, (ix + shift) % dim] = lam * model.char(phase)
    return FiniteOperator(model, mat)


def weil_fourier(model: FiniteModel) -> FiniteOperator:
    _require_line(model)
    dim = model.dim
    mat = np.empty((dim, dim), dtype=complex)
    for iz in range(dim):
        z = model.rep(iz)
        for ix in range(dim):
            mat[iz, ix] = model.char(model.rep(ix) * z)
    return FiniteOperator(model, model.mass * mat)


def weil_diag(model: FiniteModel, A) -> FiniteOperator:
    """f(z) -> f(zA) for a unit A (so the modulus factor |A|^{1/2} is 1)."""
    _require_line(model)
    A = rat(A)
    if valuation(A, model.p) != 0:
        raise WindowViolation("diagonal operators need a unit scaling")
    dim = model.dim
    num, den = int(A.numerator), int(A.denominator)
    mul = num * pow(den, -1, dim) % dim
    mat = np.zeros((dim, dim), dtype=complex)
    for iz in range(dim):
        mat[iz, iz * mul % dim] = 1.0
    return FiniteOperator(model, mat)


def weil_upper(model: FiniteModel, B) -> FiniteOperator:
    """Chirp: multiply by char(B z^2 / 2); needs v_p(B) >= 0 so the phase
    is constant on p^N O-cosets instead of aliasing."""
    _require_line(model)
    B = rat(B)
    if valuation(B, model.p) < 0:
        raise WindowViolation("chirp coefficient must be p-integral")
    dim = model.dim
    mat = np.zeros((dim, dim), dtype=complex)
    for iz in range(dim):
        z = model.rep(iz)
        mat[iz, iz] = model.char(B * z * z / 2)
    return FiniteOperator(model, mat)


# ------------------------------------------------------------- SL(2) gluing

def _token_matrix(tok) -> Mat:
    kind = tok[0]
    if kind == "U":
        return Mat([[1, tok[1]], [0, 1]])
    if kind == "D":
        return Mat([[tok[1], 0], [0, 1 / rat(tok[1])]])
    if kind == "J":
        return Mat([[0, 1], [-1, 0]])
    raise ValueError(f"unknown token {tok!r}")


def token_product(tokens) -> Mat:
    out = Mat.identity(2)
    for tok in tokens:
        out = out * _token_matrix(tok)
    return out


def sl2_factor(g: Mat) -> list:
    """Exact factorization of a determinant-one 2x2 matrix into upper
    shear, diagonal, and rotation tokens; the token product is asserted
    to reproduce g on the nose."""
    if g.shape != (2, 2) or det(g) != 1:
        raise ValueError("need a 2x2 matrix of determinant 1")
    a, b, c, d = g[0, 0], g[0, 1], g[1, 0], g[1, 1]
    if c != 0:
        tokens = [("U", a / c), ("D", mpq(-1) / c), ("J",), ("U", d / c)]
    else:
        tokens = [("D", a), ("U", b / a)]
    tokens = [t for t in tokens
              if not (t[0] == "U" and t[1] == 0) and not (t[0] == "D" and t[1] == 1)]
    assert token_product(tokens) == g
    return tokens


@lru_cache(maxsize=8)
def _fourier_cached(model: FiniteModel) -> FiniteOperator:
    # Shared read-only copy for the token expansion; callers must not
    # mutate the underlying array.
    return weil_fourier(model)


def _token_operator(model: FiniteModel, tok) -> FiniteOperator:
    kind = tok[0]
    if kind == "J":
        return _fourier_cached(model)
    if kind == "D":
        return weil_diag(model, 1 / rat(tok[1]))
    if kind == "U":
        f = _fourier_cached(model)
        return f.adjoint() @ weil_upper(model, tok[1]) @ f
    raise ValueError(f"unknown token {tok!r}")


def weil_of(model: FiniteModel, g: Mat) -> FiniteOperator:
    """Product of token operators along sl2_factor(g): a unitary operator
    satisfying shift/modulate covariance for the flow of g, determined by
    g up to a unit scalar."""
    out = identity_op(model)
    for tok in sl2_factor(g):
        out = out @ _token_operator(model, tok)
    return out


def is_window_compatible(g: Mat, p) -> bool:
    """Every token of sl2_factor(g) satisfies its own window condition."""
    a, c = g[0, 0], g[1, 0]
    if c != 0:
        return (valuation(c, p) == 0 and valuation(a / c, p) >= 0
                and valuation(g[1, 1] / c, p) >= 0)
    return valuation(a, p) == 0 and valuation(g[0, 1] / a, p) >= 0


def projective_scalar(X: np.ndarray, Y: np.ndarray) -> complex:
    """Median entrywise ratio X/Y over the well-conditioned entries."""
    mask = np.abs(Y) > 0.5 * np.abs(Y).max()
    ratios = X[mask] / Y[mask]
    return complex(np.median(ratios.real), np.median(ratios.imag))


def covariance_defect(model: FiniteModel, g: Mat, v_plus, v_minus):
    """How far Psi(gv) W(g) is from W(g) Psi(v), modulo a unit scalar.
    Returns (residual, |scalar|)."""
    w = weil_of(model, g)
    gv = g * Mat([[rat(v_plus)], [rat(v_minus)]])
    lhs = (heis_op(model, gv[0, 0], gv[1, 0]) @ w).matrix
    rhs = (w @ heis_op(model, v_plus, v_minus)).matrix
    s = projective_scalar(lhs, rhs)
    return float(np.linalg.norm(lhs - s * rhs, 2)), abs(s)


# ----------------------------------------------------------- window gluing

def lambda_op(src: FiniteModel, dst: FiniteModel) -> FiniteOperator:
    """Extend a function by the indicator of the integral part in one new
    coordinate: (lam f)(x, y) = f(x) I(y)."""
    if (dst.p, dst.N, dst.coords) != (src.p, src.N, src.coords + 1):
        raise ValueError("destination must add exactly one coordinate")
    pn = src.p ** src.N
    mat = np.zeros((dst.dim, src.dim), dtype=complex)
    for ix in range(src.dim):
        for iy in range(dst.dim1):
            if iy % pn == 0:           # y lies in O / p^N O
                mat[ix * dst.dim1 + iy, ix] = 1.0
    return FiniteOperator(dst, mat, src)


def theta_op(model: FiniteModel) -> FiniteOperator:
    """lam lam*: the orthogonal projection onto separated functions
    f(x) I(y) inside the extended model."""
    if model.coords < 2:
        raise ValueError("projection needs at least two coordinates")
    src = FiniteModel(model.p, model.N, model.coords - 1)
    lam = lambda_op(src, model)
    return lam @ lam.adjoint()
