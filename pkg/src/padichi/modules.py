"""Finitely generated Z_(p)-submodules of Q**n and their calculus.

A module here is R = V + L where V is a Q-subspace (the largest subspace
contained in R, its "down" part R_down) and L is spanned over the local
ring Z_(p) by finitely many vectors.  Stored canonical form:

* free     -- reduced row echelon basis of V over Q;
* int_part -- dvr_echelon of the integral generators after reducing them
              modulo the free pivots (the canonical section of Q**n / V).

Equal submodules of Q**n produce identical canonical forms, so == is both
cheap and honest.  All linear maps in this file act on row vectors from
the right: the image of x under A is x*A.

The binary operations (intersect, preimage, dual) all reduce to one
primitive, module_kernel, which in turn reduces to a rational kernel plus
preimage_of_std -- the module {x : x*M in Z_(p)**k} -- which bottoms out
in dvr_kernel and linear solves.  Keeping a single audited chain keeps
the calculus trustworthy.
"""

from __future__ import annotations

from gmpy2 import mpq

from .exact import (
    Mat, check_prime, dvr_echelon, dvr_kernel, kernel, p_pow, rat, rref,
    solve_linear, valuation, vstack,
)

__all__ = [
    "Module", "standard_lattice", "full_space", "zero_module", "line",
    "module_sum", "intersect", "intersect_subspace", "image", "preimage",
    "module_kernel", "preimage_of_std", "dual", "is_isotropic",
    "is_selfdual", "is_almost_selfdual", "tensor_with_standard",
    "project_coords", "embed_coords", "symplectic_gram", "form_value",
    "symplectic_basis",
]


def _as_mat(x, ambient) -> Mat:
    if x is None:
        return Mat([], ncols=ambient)
    if isinstance(x, Mat):
        if x.ncols != ambient:
            raise ValueError(f"generators live in Q^{x.ncols}, ambient is Q^{ambient}")
        return x
    return Mat(list(x), ncols=ambient)


def _reduce_row(row, F: Mat, piv):
    """Subtract the free part: zero the entries at the rref pivot columns."""
    row = list(row)
    for j, c in enumerate(piv):
        t = row[c]
        if t != 0:
            row = [a - t * b for a, b in zip(row, F.rows[j])]
    return row


class Module:
    """A finitely generated Z_(p)-submodule of Q**ambient, in canonical form."""

    __slots__ = ("p", "ambient", "free", "free_pivots", "int_part", "int_pivots")

    def __init__(self, p, ambient, free=None, integral=None):
        p = check_prime(p)
        fm = _as_mat(free, ambient)
        im = _as_mat(integral, ambient)
        R, piv = rref(fm)
        F = R.take_rows(range(len(piv)))
        reduced = Mat([_reduce_row(r, F, piv) for r in im.rows], ncols=ambient)
        ech = dvr_echelon(reduced, p)
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "ambient", ambient)
        object.__setattr__(self, "free", F)
        object.__setattr__(self, "free_pivots", piv)
        object.__setattr__(self, "int_part", ech.mat)
        object.__setattr__(self, "int_pivots", ech.pivots)

    def __setattr__(self, name, value):
        raise AttributeError("Module is immutable")

    # -- identity

    def __eq__(self, other):
        return (isinstance(other, Module) and self.p == other.p
                and self.ambient == other.ambient
                and self.free == other.free and self.int_part == other.int_part)

    def __hash__(self):
        return hash((self.p, self.ambient, self.free, self.int_part))

    def __repr__(self):
        fr = "; ".join(" ".join(map(str, r)) for r in self.free.rows) or "-"
        it = "; ".join(" ".join(map(str, r)) for r in self.int_part.rows) or "-"
        return f"Module(p={self.p}, Q^{self.ambient}, free[{fr}], int[{it}])"

    # -- structure

    def gens(self) -> Mat:
        """All canonical generators, free rows first."""
        return vstack(self.free, self.int_part)

    def down(self) -> "Module":
        """The largest subspace contained in the module."""
        return Module(self.p, self.ambient, free=self.free)

    def up(self) -> "Module":
        """The smallest subspace containing the module."""
        return Module(self.p, self.ambient, free=self.gens())

    def scale(self, c) -> "Module":
        c = rat(c)
        if c == 0:
            raise ValueError("scaling a module by zero")
        return Module(self.p, self.ambient, free=self.free, integral=c * self.int_part)

    def is_zero(self):
        return self.free.nrows == 0 and self.int_part.nrows == 0

    def is_compact(self):
        """No line fits inside: the free part is trivial."""
        return self.free.nrows == 0

    def is_open(self):
        """Contains a neighbourhood of 0, i.e. spans Q**ambient."""
        return self.up().free.nrows == self.ambient

    def is_lattice(self):
        """Compact and open: a full-rank lattice with no free part."""
        return self.free.nrows == 0 and self.int_part.nrows == self.ambient

    def is_subspace(self):
        return self.int_part.nrows == 0

    # -- membership

    def contains_vector(self, vec) -> bool:
        vec = [rat(e) for e in vec]
        if len(vec) != self.ambient:
            raise ValueError("vector has wrong length")
        row = _reduce_row(vec, self.free, self.free_pivots)
        for (c, a), irow in zip(self.int_pivots, self.int_part.rows):
            t = row[c]
            if t == 0:
                continue
            t = t / p_pow(self.p, a)
            if valuation(t, self.p) < 0:
                return False
            row = [x - t * y for x, y in zip(row, irow)]
        return all(e == 0 for e in row)

    def contains(self, other: "Module") -> bool:
        """Set containment other <= self."""
        _check_pair(self, other)
        for g in other.free.rows:
            if any(e != 0 for e in _reduce_row(g, self.free, self.free_pivots)):
                return False        # a free generator must sit inside self.down()
        return all(self.contains_vector(g) for g in other.int_part.rows)

    def approx_contains(self, vec, t) -> bool:
        """Membership up to p**t * O**n fuzz."""
        fuzz = standard_lattice(self.p, self.ambient).scale(p_pow(self.p, t))
        return module_sum(self, fuzz).contains_vector(vec)


def _check_pair(a: Module, b: Module):
    if a.p != b.p or a.ambient != b.ambient:
        raise ValueError(f"mismatched modules: p={a.p},{b.p} ambient={a.ambient},{b.ambient}")


# ---------------------------------------------------------------- constructors

def standard_lattice(p, n) -> Module:
    """O**n = Z_(p)**n."""
    return Module(p, n, integral=Mat.identity(n))


def full_space(p, n) -> Module:
    return Module(p, n, free=Mat.identity(n))


def zero_module(p, n) -> Module:
    return Module(p, n)


def line(p, vec) -> Module:
    """The Q-line through a vector."""
    return Module(p, len(list(vec)), free=[list(vec)])


# ---------------------------------------------------------------- operations

def module_sum(a: Module, b: Module) -> Module:
    _check_pair(a, b)
    return Module(a.p, a.ambient, free=vstack(a.free, b.free),
                  integral=vstack(a.int_part, b.int_part))


def image(R: Module, A: Mat) -> Module:
    """Image of R under x |-> x*A (A has R.ambient rows)."""
    if A.nrows != R.ambient:
        raise ValueError(f"map from Q^{A.nrows} applied to Q^{R.ambient}")
    return Module(R.p, A.ncols, free=R.free * A, integral=R.int_part * A)


def preimage_of_std(M: Mat, p) -> Module:
    """{x in Q**m : x*M in Z_(p)**k} for an m-by-k matrix M.

    Free part: the rational kernel of M.  Integral part: lifts through M of
    a Z_(p)-basis of rowspace(M) intersected with the standard lattice,
    the intersection being a dvr_kernel of the rowspace's annihilator.
    """
    fr = kernel(M)
    ann = kernel(M.T)                     # rows: annihilator of rowspace(M)
    B = dvr_kernel(ann.T, p)              # Z_(p)-basis of rowspace(M) meet Z_(p)**k
    lifts = [solve_linear(M.T, list(w)) for w in B.rows]
    return Module(p, M.nrows, free=fr, integral=Mat(lifts, ncols=M.nrows))


def module_kernel(A: Mat, R: Module) -> Module:
    """{x in R : x*A == 0} (A has R.ambient rows).

    Parametrize R by mixed coordinates (rational on the free generators,
    integral on the lattice generators), solve the rational kernel, then
    cut the mixed-coordinate constraint with preimage_of_std.
    """
    if A.nrows != R.ambient:
        raise ValueError(f"map from Q^{A.nrows} applied to Q^{R.ambient}")
    f, i = R.free.nrows, R.int_part.nrows
    G = R.gens()
    N = kernel(G * A)                     # rational solutions in mixed coords
    T = preimage_of_std(N.take_cols(range(f, f + i)), R.p)
    NG = N * G
    return Module(R.p, R.ambient, free=T.free * NG, integral=T.int_part * NG)


def _mixed_standard(p, n, int_positions) -> Module:
    ipos = sorted(set(int_positions))
    eye = Mat.identity(n)
    fr = eye.take_rows([j for j in range(n) if j not in set(ipos)])
    return Module(p, n, free=fr, integral=eye.take_rows(ipos))


def intersect(a: Module, b: Module) -> Module:
    """Intersection, computed as one module_kernel on stacked generators."""
    _check_pair(a, b)
    G1, G2 = a.gens(), b.gens()
    r1, r2 = G1.nrows, G2.nrows
    ints = list(range(a.free.nrows, r1)) + [r1 + j for j in range(b.free.nrows, r2)]
    D = _mixed_standard(a.p, r1 + r2, ints)
    K = module_kernel(vstack(G1, -G2), D)
    P = vstack(G1, Mat.zeros(r2, a.ambient))
    return image(K, P)


def intersect_subspace(basis: Mat, R: Module) -> Module:
    """rowspace(basis) meet R, cheaper than full intersect: the subspace
    enters as linear constraints, not extra mixed coordinates."""
    if basis.ncols != R.ambient:
        raise ValueError("subspace basis has wrong ambient")
    ann = kernel(basis.T)
    return module_kernel(ann.T, R)


def preimage(A: Mat, R: Module) -> Module:
    """{x in Q**m : x*A in R} for A an m-by-ambient matrix."""
    if A.ncols != R.ambient:
        raise ValueError(f"map into Q^{A.ncols}, module in Q^{R.ambient}")
    m = A.nrows
    f, i = R.free.nrows, R.int_part.nrows
    big = vstack(A, -R.free, -R.int_part)
    D = _mixed_standard(R.p, m + f + i, range(m + f, m + f + i))
    K = module_kernel(big, D)
    P = vstack(Mat.identity(m), Mat.zeros(f + i, m))
    return image(K, P)


def dual(R: Module, gram: Mat) -> Module:
    """{w : B(v, w) = 0 for v in the free part, B(v, w) in Z_(p) for the
    lattice generators}, B the bilinear form with Gram matrix `gram`."""
    n = R.ambient
    if gram.shape != (n, n):
        raise ValueError("Gram matrix has wrong shape")
    V = kernel(gram.T * R.free.T)         # w with B(free gen, w) = 0
    T = preimage_of_std(V * (gram.T * R.int_part.T), R.p)
    return image(T, V)


def is_isotropic(R: Module, gram: Mat) -> bool:
    return dual(R, gram).contains(R)


def is_selfdual(R: Module, gram: Mat) -> bool:
    return dual(R, gram) == R


def is_almost_selfdual(R: Module, gram: Mat) -> bool:
    """dual(R) <= R and p*R <= dual(R): self-dual up to one power of p."""
    d = dual(R, gram)
    return R.contains(d) and d.contains(R.scale(R.p))


def symplectic_gram(a) -> Mat:
    """Standard symplectic form on plus/minus coordinates (u+, u-):
    B(u, w) = sum u+_j w-_j - u-_j w+_j."""
    eye = Mat.identity(a)
    return Mat.block([[0, eye], [-eye, 0]])


def form_value(gram: Mat, x, y):
    """B(x, y) = x * gram * y^T on row vectors."""
    return (Mat([list(x)]) * gram * Mat([list(y)]).T)[0, 0]


def symplectic_basis(gram: Mat) -> Mat:
    """Exact Darboux basis: rows T with T * gram * T.T == symplectic_gram(n).

    Standard symplectic Gram-Schmidt; raises Singular if the alternating
    form is degenerate.
    """
    from .exact import Singular

    n2 = gram.nrows
    if gram.ncols != n2 or n2 % 2:
        raise ValueError("need a square, even-dimensional Gram matrix")
    if gram.T != -gram:
        raise ValueError("form is not alternating")
    us, vs = [], []
    pool = [list(r) for r in Mat.identity(n2).rows]
    while pool:
        u = pool[0]
        j = next((i for i in range(1, len(pool))
                  if form_value(gram, u, pool[i]) != 0), None)
        if j is None:
            raise Singular("alternating form is degenerate")
        c = form_value(gram, u, pool[j])
        v = [e / c for e in pool[j]]
        us.append(u)
        vs.append(v)
        projected = []
        for x in pool[1:]:
            a, b = form_value(gram, x, v), form_value(gram, x, u)
            projected.append([e - a * eu + b * ev for e, eu, ev in zip(x, u, v)])
        R, piv = rref(Mat(projected, ncols=n2))
        pool = [list(r) for r in R.take_rows(range(len(piv))).rows]
    T = Mat(us + vs, ncols=n2)
    assert T * gram * T.T == symplectic_gram(len(us))
    return T


# ---------------------------------------------------------------- coordinates

def project_coords(R: Module, coords) -> Module:
    """Forget all coordinates except the listed ones (in the listed order)."""
    return image(R, Mat.identity(R.ambient).take_cols(coords))


def embed_coords(R: Module, big, coords) -> Module:
    """Place coordinate t of R at position coords[t] of Q**big, zero elsewhere."""
    return image(R, Mat.identity(big).take_rows(coords))


def tensor_with_standard(R: Module, m) -> Module:
    """R (x) O**m for R in plus/minus coordinates Q**(2k).

    Output ambient Q**(2km), plus block first: generator g = (g+, g-)
    produces the m generators (g+ (x) e_s, g- (x) e_s), the copy index s
    running fastest within each slot of size m.
    """
    if R.ambient % 2:
        raise ValueError("need an even ambient split into plus/minus halves")
    k = R.ambient // 2

    def expand(rows):
        out = []
        for g in rows:
            for s in range(m):
                v = [mpq(0)] * (2 * k * m)
                for i in range(k):
                    v[i * m + s] = g[i]
                    v[k * m + i * m + s] = g[k + i]
                out.append(v)
        return out

    return Module(R.p, 2 * k * m, free=expand(R.free.rows),
                  integral=expand(R.int_part.rows))
