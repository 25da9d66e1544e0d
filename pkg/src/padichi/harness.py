"""Deterministic samplers and the randomized verification suites.

Randomness discipline: every suite derives a per-case generator via
rng_for(seed, suite, index) = Random(sha256(f"{seed}:{suite}:{index}")),
so any failing case can be replayed from the triple printed in its
witness, independent of trial order or machine.

Samplers come with built-in postcondition asserts (a sampler that lies
poisons every suite downstream, so they check their own output).
"""

from __future__ import annotations

import hashlib
import random
from functools import lru_cache

from gmpy2 import mpq

from .cosets import BlockElement
from .exact import Mat, det, invert, min_valuation, p_pow
from .modules import (
    Module, image, is_almost_selfdual, is_selfdual, standard_lattice,
    symplectic_basis, symplectic_gram,
)
from .relations import Relation, bminus_gram

__all__ = [
    "rng_for", "rand_rat", "rand_int_mat", "rand_rat_mat", "rand_module",
    "rand_invertible_int", "rand_symmetric", "rand_symplectic",
    "sample_selfdual", "sample_almost_selfdual", "sample_nazarov",
    "sample_lattice", "sample_orthogonal_int",
]


def rng_for(seed, suite: str, index: int) -> random.Random:
    """Deterministic per-case generator, stable across platforms."""
    digest = hashlib.sha256(f"{seed}:{suite}:{index}".encode()).digest()
    return random.Random(int.from_bytes(digest[:16], "big"))


def rand_rat(rng: random.Random, p=None, lo=-9, hi=9, emin=0, emax=0) -> mpq:
    """Small rational; if p is given the denominator stays prime to p and
    a p-power twist in [emin, emax] is applied."""
    num = rng.randint(lo, hi)
    den = rng.randint(1, 9)
    if p is not None:
        while den % p == 0:
            den = rng.randint(1, 9)
        return mpq(num, den) * p_pow(p, rng.randint(emin, emax))
    return mpq(num, den)


def rand_int_mat(rng, rows, cols, lo=-4, hi=4) -> Mat:
    return Mat([[rng.randint(lo, hi) for _ in range(cols)] for _ in range(rows)],
               ncols=cols)


def rand_rat_mat(rng, p, rows, cols, emin=-1, emax=1) -> Mat:
    return Mat([[rand_rat(rng, p, emin=emin, emax=emax) for _ in range(cols)]
                for _ in range(rows)], ncols=cols)


def rand_invertible_int(rng, n, lo=-4, hi=4, tries=64) -> Mat:
    for _ in range(tries):
        m = rand_int_mat(rng, n, n, lo, hi)
        if det(m) != 0:
            return m
    raise RuntimeError("no invertible sample found")  # pragma: no cover


def rand_module(rng, p, n, max_free=1, max_int=None) -> Module:
    max_int = n if max_int is None else max_int
    nf = rng.randint(0, max_free)
    ni = rng.randint(0, max_int)
    return Module(p, n, free=rand_rat_mat(rng, p, nf, n),
                  integral=rand_rat_mat(rng, p, ni, n))


def rand_symmetric(rng, n, lo=-4, hi=4, denom=1) -> Mat:
    ent = [[mpq(0)] * n for _ in range(n)]
    for i in range(n):
        for j in range(i, n):
            ent[i][j] = ent[j][i] = mpq(rng.randint(lo, hi), denom)
    return Mat(ent, ncols=n)


def rand_symplectic(rng, p, n, words=4) -> Mat:
    """Element of Sp(2n, Q) as a word in elementary generators, with
    occasional p-power diagonal twists.  Postcondition: g J g^T == J."""
    J = symplectic_gram(n)
    g = Mat.identity(2 * n)
    for _ in range(words):
        kind = rng.choice(["diag", "upper", "lower", "J", "scale"])
        if kind == "diag":
            a = rand_invertible_int(rng, n, -2, 2)
            blk = Mat.block([[a, 0], [0, invert(a).T]])
        elif kind == "upper":
            blk = Mat.block([[Mat.identity(n), rand_symmetric(rng, n, -2, 2)],
                             [0, Mat.identity(n)]])
        elif kind == "lower":
            blk = Mat.block([[Mat.identity(n), 0],
                             [rand_symmetric(rng, n, -2, 2), Mat.identity(n)]])
        elif kind == "scale":
            e = [rng.randint(-1, 1) for _ in range(n)]
            blk = Mat.diagonal([p_pow(p, x) for x in e] + [p_pow(p, -x) for x in e])
        else:
            blk = J
        g = g * blk
    assert g * J * g.T == J
    return g


@lru_cache(maxsize=32)
def _darboux(gram: Mat) -> Mat:
    return symplectic_basis(gram)


def _standard_mixed_selfdual(rng, n, exact_dual=True, free_prob=0.3):
    """Generators of a self-dual (or almost-self-dual) model in standard
    symplectic coordinates: per hyperbolic pair, either the free line Qe_i
    or a lattice p^a e_i + p^b e_(n+i) with a+b = 0 (or -1 when allowed)."""
    free, integral = [], []
    for i in range(n):
        style = rng.random()
        if style < free_prob:
            free.append(i)
        else:
            a = rng.randint(-1, 1)
            b = -a if exact_dual or rng.random() < 0.5 else -a - 1
            integral.append((i, a, b))
    return free, integral


def _model_module(p, n, free, integral):
    rows_free = []
    rows_int = []
    for i in free:
        v = [0] * (2 * n)
        v[i] = 1
        rows_free.append(v)
    for i, a, b in integral:
        v = [mpq(0)] * (2 * n)
        v[i] = p_pow(p, a)
        rows_int.append(v)
        w = [mpq(0)] * (2 * n)
        w[n + i] = p_pow(p, b)
        rows_int.append(w)
    return Module(p, 2 * n, free=rows_free, integral=rows_int)


def sample_selfdual(rng, p, gram: Mat, words=3, free_prob=0.3) -> Module:
    """A random module equal to its dual for the given alternating form.

    free_prob=0 forces a lattice (symplectic images of lattices stay
    lattices), which some callers need for the equality cases."""
    n = gram.nrows // 2
    free, integral = _standard_mixed_selfdual(rng, n, exact_dual=True,
                                              free_prob=free_prob)
    R = _model_module(p, n, free, integral)
    g = rand_symplectic(rng, p, n, words)
    out = image(R, g * _darboux(gram))
    assert is_selfdual(out, gram)
    return out


def sample_almost_selfdual(rng, p, gram: Mat, words=3, free_prob=0.3) -> Module:
    """Random module with dual(R) <= R <= p^-1 dual(R)."""
    n = gram.nrows // 2
    free, integral = _standard_mixed_selfdual(rng, n, exact_dual=False,
                                              free_prob=free_prob)
    R = _model_module(p, n, free, integral)
    g = rand_symplectic(rng, p, n, words)
    out = image(R, g * _darboux(gram))
    assert is_almost_selfdual(out, gram)
    return out


def sample_nazarov(rng, p, src, dst, gram_src: Mat, gram_dst: Mat,
                   words=3) -> Relation:
    """Random relation whose body is self-dual for the difference form."""
    body = sample_selfdual(rng, p, bminus_gram(gram_src, gram_dst), words)
    return Relation(p, src, dst, body)


def sample_lattice(rng, p, n) -> Module:
    """Random full lattice: the standard one moved by GL_n(Q)."""
    g = rand_invertible_int(rng, n, -3, 3)
    e = Mat.diagonal([p_pow(p, rng.randint(-1, 1)) for _ in range(n)])
    out = image(standard_lattice(p, n), g * e)
    assert out.is_lattice()
    return out


def sample_sl2(rng, p, compatible=True, tries=64) -> Mat:
    """Random element of SL(2, Z_(p)) as a short word in integral shears,
    unit diagonals and the rotation; with compatible=True, resample until
    every factorization token fits the finite window."""
    from .weil import is_window_compatible
    rot = Mat([[0, 1], [-1, 0]])
    for _ in range(tries):
        g = Mat.identity(2)
        for _ in range(rng.randint(2, 4)):
            kind = rng.randrange(4)
            if kind == 0:
                g = g * Mat([[1, rng.randint(-3, 3)], [0, 1]])
            elif kind == 1:
                g = g * Mat([[1, 0], [rng.randint(-3, 3), 1]])
            elif kind == 2:
                u = mpq(rng.choice([1, 2, -1, -2]))   # units for odd p
                g = g * Mat.diagonal([u, 1 / u])
            else:
                g = g * rot
        if not compatible or is_window_compatible(g, p):
            return g
    raise RuntimeError("could not sample a window-compatible element")


def sample_block_element(rng, alpha, k, m, p=None, tries=64) -> BlockElement:
    """Random invertible block element with small integer entries.  When p
    is given, a random row occasionally picks up a p^{+-1} scaling so that
    the entries do not all sit at valuation zero."""
    n = alpha + k * m
    for _ in range(tries):
        mat = rand_int_mat(rng, n, n, -3, 3)
        if det(mat) == 0:
            continue
        if p is not None and rng.random() < 0.5:
            i = rng.randrange(n)
            c = p_pow(p, rng.choice([-1, 1]))
            mat = Mat([[c * e for e in row] if r == i else list(row)
                       for r, row in enumerate(mat.rows)], ncols=n)
        return BlockElement(alpha, k, m, mat)
    raise RuntimeError("could not sample an invertible block element")


def sample_orthogonal_int(rng, p, n) -> Mat:
    """Integral orthogonal matrix via the Cayley transform of a skew matrix
    with entries in p Z_(p), times a random sign flip: u u^T == 1, entries
    in Z_(p), and u != 1 generically."""
    skew = [[mpq(0)] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            c = mpq(p * rng.randint(-2, 2))
            skew[i][j], skew[j][i] = c, -c
    S = Mat(skew, ncols=n)
    eye = Mat.identity(n)
    u = (eye - S) * invert(eye + S)
    signs = Mat.diagonal([rng.choice([1, -1]) for _ in range(n)])
    u = u * signs
    assert u * u.T == eye
    assert min_valuation(u, p) >= 0
    return u
