"""Characteristic relations of block elements.

A block element g mixes a head space (dimension alpha) with k slots of
size m.  Splitting every coordinate into a plus and a minus copy, g acts
on the plus block and g^{t,-1} on the minus block.  Feeding the slot
coordinates through a window pair (Q on the input side, T on the output
side, both modules in Q**(2k) tensored with the standard lattice O**m)
leaves a relation chi_g(Q, T) between the head spaces: all pairs (u, v)
such that the flow carries (u, x) to (v, y) for some x in Q (x) O**m and
y in T (x) O**m.

Two independent routes compute chi -- a composition pipeline through the
big plus/minus space, and a direct cut of the flow graph against the
window module -- and every call checks them against each other.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

from gmpy2 import mpq

from .cosets import BlockElement
from .exact import Mat, Singular, det, hstack, invert, kernel, kron, rat, vstack
from .modules import (
    Module, dual, embed_coords, image, is_almost_selfdual, module_sum,
    symplectic_gram, tensor_with_standard,
)
from .relations import (
    Relation, apply_to_module, bminus_gram, compose, graph_of, pseudo_inverse,
)


class SingularBoundary(ValueError):
    """The boundary-value system of a chi relation has no unique solution."""


def _l6_split(alpha, km):
    """Coordinate positions of (u+, x+, u-, x-) inside Q**(2(alpha+km))."""
    n1 = alpha + km
    uplus = range(0, alpha)
    xplus = range(alpha, n1)
    uminus = range(n1, n1 + alpha)
    xminus = range(n1 + alpha, 2 * n1)
    return uplus, xplus, uminus, xminus


def d_matrix(g: BlockElement) -> Mat:
    """The plus/minus flow of g: g on (u+, x+), g^{t,-1} on (u-, x-)."""
    from .exact import block_diag
    return block_diag(g.matrix, invert(g.matrix).T)


def window_relation(p, alpha, k, m, Q: Module) -> Relation:
    """Relation from the head space V = Q**(2*alpha) into the full
    plus/minus space: the head coordinates ride along unchanged while the
    slot coordinates range over the window Q (x) O**m."""
    if Q.ambient != 2 * k:
        raise ValueError("window module lives in the wrong ambient space")
    km = k * m
    n1 = alpha + km
    nV, nW = 2 * alpha, 2 * n1
    up, xp, um, xm = _l6_split(alpha, km)
    rows_free = []
    for i in range(alpha):
        r = [mpq(0)] * (nV + nW)
        r[i] = mpq(1)
        r[nV + up[i]] = mpq(1)
        rows_free.append(r)
        s = [mpq(0)] * (nV + nW)
        s[alpha + i] = mpq(1)
        s[nV + um[i]] = mpq(1)
        rows_free.append(s)
    tq = tensor_with_standard(Q, m)

    def embed(row):
        r = [mpq(0)] * (nV + nW)
        for j in range(km):
            r[nV + xp[j]] = row[j]
            r[nV + xm[j]] = row[km + j]
        return r

    rows_free += [embed(row) for row in tq.free.rows]
    rows_int = [embed(row) for row in tq.int_part.rows]
    body = Module(p, nV + nW, free=rows_free, integral=rows_int)
    return Relation(p, nV, nW, body)


def _xi_from_matrix(p, dmat: Mat, alpha, k, m) -> Relation:
    """The flow graph of dmat, reshuffled so that the slot coordinates of
    input and output form the source and the head coordinates the target."""
    km = k * m
    n1 = alpha + km
    up, xp, um, xm = _l6_split(alpha, km)
    rows = []
    for j in range(2 * n1):
        w = [mpq(1) if t == j else mpq(0) for t in range(2 * n1)]
        wo = dmat.T.rows[j]
        src = ([w[t] for t in xp] + [w[t] for t in xm]
               + [wo[t] for t in xp] + [wo[t] for t in xm])
        dst = ([w[t] for t in up] + [w[t] for t in um]
               + [wo[t] for t in up] + [wo[t] for t in um])
        rows.append(src + dst)
    body = Module(p, 4 * km + 4 * alpha, free=rows)
    return Relation(p, 4 * km, 4 * alpha, body)


def _window_precondition(Q: Module, k, strict, side):
    if Q.ambient != 2 * k:
        raise ValueError("window module lives in the wrong ambient space")
    if not is_almost_selfdual(Q, symplectic_gram(k)):
        msg = (f"{side} window is not self-dual or almost self-dual; "
               "the relation is still computed but the usual invariants "
               "need not hold")
        if strict:
            raise ValueError(msg)
        warnings.warn(msg)


def _chi_pipeline(p, dmat, alpha, k, m, Q, T) -> Relation:
    lam_q = window_relation(p, alpha, k, m, Q)
    lam_t = window_relation(p, alpha, k, m, T)
    return compose(pseudo_inverse(lam_t), compose(graph_of(p, dmat), lam_q))


def _chi_direct(p, dmat, alpha, k, m, Q, T) -> Relation:
    km = k * m
    xi = _xi_from_matrix(p, dmat, alpha, k, m)
    eta = module_sum(
        embed_coords(tensor_with_standard(Q, m), 4 * km, range(2 * km)),
        embed_coords(tensor_with_standard(T, m), 4 * km, range(2 * km, 4 * km)))
    return Relation(p, 2 * alpha, 2 * alpha, apply_to_module(xi, eta))


def _chi_core(p, dmat, alpha, k, m, Q, T) -> Relation:
    pipe = _chi_pipeline(p, dmat, alpha, k, m, Q, T)
    direct = _chi_direct(p, dmat, alpha, k, m, Q, T)
    assert pipe.body == direct.body, "the two chi routes disagree"
    return pipe


def chi(g: BlockElement, Q: Module, T: Module, strict=True) -> Relation:
    """The characteristic relation of g through the windows Q and T.

    Q and T live in Q**(2k), one plus/minus pair of coordinates per slot;
    each is tensored with the standard lattice O**m before being applied
    to the m copies inside a slot.  With strict=True (the default) both
    windows must be self-dual or almost self-dual for the standard
    symplectic form."""
    if Q.p != T.p:
        raise ValueError("window modules disagree about the prime")
    _window_precondition(Q, g.k, strict, "input")
    _window_precondition(T, g.k, strict, "output")
    return _chi_core(Q.p, d_matrix(g), g.alpha, g.k, g.m, Q, T)


def chi_sp(gs: Mat, alpha, k, m, Q: Module, T: Module, strict=True) -> Relation:
    """chi for an arbitrary symplectic flow on the plus/minus space,
    given directly as a matrix in the (u+, x+, u-, x-) coordinates."""
    n1 = alpha + k * m
    if gs.shape != (2 * n1, 2 * n1):
        raise ValueError("flow matrix has the wrong shape")
    J = symplectic_gram(n1)
    if gs.T * J * gs != J:
        raise ValueError("flow matrix is not symplectic")
    if Q.p != T.p:
        raise ValueError("window modules disagree about the prime")
    _window_precondition(Q, k, strict, "input")
    _window_precondition(T, k, strict, "output")
    return _chi_core(Q.p, gs, alpha, k, m, Q, T)


def lambda_subspace(g: BlockElement, p) -> Module:
    """The fully-windowed subspace of V + V: pairs (u, v) whose flow needs
    nothing from the slots -- v+ = a u+ with all slot outputs zero, and
    dually u- = a^t v-."""
    alpha, k = g.alpha, g.k
    a = g.block_a()
    cstack = vstack(*[g.block_c(i) for i in range(k)])
    bstack = vstack(*[g.block_b(i).T for i in range(k)])
    k1 = kernel(cstack.T)
    k2 = kernel(bstack.T)
    zero = [mpq(0)] * alpha
    rows = []
    for t in k1.rows:
        va = Mat([list(t)]) * a.T
        rows.append(list(t) + zero + list(va.rows[0]) + zero)
    for s in k2.rows:
        ua = Mat([list(s)]) * a
        rows.append(zero + list(ua.rows[0]) + zero + list(s))
    return Module(p, 4 * alpha, free=rows)


def head_bminus(alpha) -> Mat:
    """The difference form on V + V used for duality of head relations."""
    J = symplectic_gram(alpha)
    return bminus_gram(J, J)


def lambda_perp(g: BlockElement, p) -> Module:
    return dual(lambda_subspace(g, p), head_bminus(g.alpha))


def lambda_sandwich(g: BlockElement, rel: Relation):
    """(lower ok, upper ok, both equalities): the subspace shadow of a chi
    relation is pinched between the fully-windowed subspace and its
    orthogonal complement."""
    lam = lambda_subspace(g, rel.p)
    perp = dual(lam, head_bminus(g.alpha))
    down = rel.body.down()
    up = rel.body.up()
    lower = down.contains(lam)
    upper = perp.contains(up)
    return lower, upper, (down == lam and up == perp)


@dataclass(frozen=True)
class BoundaryPair:
    """Graph windows: the input window is the graph of kappa, the output
    window the graph of tau; both symmetric k x k so the graphs are
    Lagrangian subspaces."""
    kappa: Mat
    tau: Mat

    def __post_init__(self):
        for name in ("kappa", "tau"):
            mat = getattr(self, name)
            if mat.nrows != mat.ncols or mat != mat.T:
                raise ValueError(f"{name} must be symmetric and square")
        if self.kappa.nrows != self.tau.nrows:
            raise ValueError("kappa and tau must have the same size")

    @property
    def k(self):
        return self.kappa.nrows


def graph_module(p, sym: Mat) -> Module:
    """The Lagrangian subspace {(z, sym z)} of Q**(2k), as a module."""
    if sym != sym.T:
        raise ValueError("graph windows need a symmetric matrix")
    k = sym.nrows
    return Module(p, 2 * k, free=hstack(Mat.identity(k), sym))


def _boundary_solution(g: BlockElement, bp: BoundaryPair):
    """Solve the two-point boundary problem: given (u+, v-), find the slot
    data forced by the graph windows.  Returns the alpha x 2*alpha column
    maps (u+, v-) -> v+ and (u+, v-) -> u-."""
    if bp.k != g.k:
        raise ValueError("boundary pair size does not match the element")
    alpha, k, m = g.alpha, g.k, g.m
    km = k * m
    n = alpha + km
    slots = range(alpha, n)
    a = g.block_a()
    b = g.matrix.submatrix(range(alpha), slots)
    c = g.matrix.submatrix(slots, range(alpha))
    d = g.matrix.submatrix(slots, slots)
    ki = kron(bp.kappa, Mat.identity(m))
    ti = kron(bp.tau, Mat.identity(m))
    eye = Mat.identity(km)
    omega = Mat.block([[-d, eye], [ki, -(d.T * ti)]])
    if det(omega) == 0:
        raise SingularBoundary("the boundary system is degenerate")
    rhs = Mat.block([[c, Mat.zeros(km, alpha)], [Mat.zeros(km, alpha), b.T]])
    sol = invert(omega) * rhs
    xplus = sol.take_rows(range(km))
    yplus = sol.take_rows(range(km, 2 * km))
    zero_a = Mat.zeros(alpha, alpha)
    vplus = hstack(a, zero_a) + b * xplus
    uminus = hstack(zero_a, a.T) + (c.T * ti) * yplus
    return vplus, uminus


def chi_boundary(g: BlockElement, bp: BoundaryPair, p):
    """chi through a pair of graph windows, by direct boundary solve.

    Returns (relation, S): the relation is always checked to be a
    Lagrangian subspace of V + V for the difference form; when it is the
    graph of a map on V, S is that matrix (checked symplectic), else None.
    Raises SingularBoundary when the boundary system is degenerate."""
    alpha = g.alpha
    vplus, uminus = _boundary_solution(g, bp)
    eye = Mat.identity(alpha)
    za = Mat.zeros(alpha, alpha)
    gens = hstack(vstack(eye, za), uminus.T, vplus.T, vstack(za, eye))
    body = Module(p, 4 * alpha, free=gens)
    rel = Relation(p, 2 * alpha, 2 * alpha, body)
    assert body.free.nrows == 2 * alpha and body.int_part.nrows == 0
    assert dual(body, head_bminus(alpha)) == body, \
        "boundary relation is not Lagrangian"
    u_part = body.free.take_cols(range(2 * alpha))
    v_part = body.free.take_cols(range(2 * alpha, 4 * alpha))
    S = None
    try:
        S = (invert(u_part) * v_part).T
    except Singular:
        pass
    if S is not None:
        J = symplectic_gram(alpha)
        assert S.T * J * S == J, "graph of a boundary relation not symplectic"
        assert graph_of(p, S).body == body
    return rel, S


def z_matrix(g: BlockElement, bp: BoundaryPair, p=None) -> Mat:
    """The boundary solution reassembled as the symmetric matrix sending
    (v-, u+) to (v+, u-)."""
    alpha = g.alpha
    vplus, uminus = _boundary_solution(g, bp)
    a1 = vplus.take_cols(range(alpha))
    a2 = vplus.take_cols(range(alpha, 2 * alpha))
    a3 = uminus.take_cols(range(alpha))
    a4 = uminus.take_cols(range(alpha, 2 * alpha))
    z = Mat.block([[a2, a1], [a4, a3]])
    assert z == z.T, "boundary matrix is not symmetric"
    return z


def m_lambda(lam, alpha) -> Mat:
    """Head-space scaling: lam on the plus coordinates, 1/lam on minus."""
    lam = rat(lam)
    if lam == 0:
        raise ValueError("scaling must be invertible")
    return Mat.diagonal([lam] * alpha + [1 / lam] * alpha)


def window_scaling(lam, k) -> Mat:
    """The same scaling on a window's ambient space Q**(2k)."""
    return m_lambda(lam, k)


def scaled_window(Q: Module, lam) -> Module:
    return image(Q, window_scaling(lam, Q.ambient // 2))
