"""Block matrices with slot structure and their double-coset product.

Elements are invertible rational matrices in L5 coordinates: one block of
size alpha followed by k slots of size m.  The product of the classes of
g (slot size l) and h (slot size m) lives at slot size l + m and is given
blockwise by

    a'' = a a',   b''_j = [ b_j | a b'_j ],   c''_i = [ c_i a' ; c'_i ],
    d''_ij = [ d_ij  c_i b'_j ; 0  d'_ij ],

with the g-side coordinates preceding the h-side ones inside every slot.
The same class is reached transcendentally: pad both factors to slot size
s >= 2N, insert the slot-diagonal involution theta_N that swaps the first
N slot coordinates with the next N, and multiply the matrices; for N at
least max(l, m) the class of pad(g) theta_N pad(h) stops moving.  Both
routes are implemented and the equality of their classes is part of the
verification suites.
"""

from __future__ import annotations

from .exact import Mat, block_diag, det, hstack, invert, vstack

__all__ = [
    "BlockElement", "embed_diag", "theta_mat", "coset_mul", "pad",
    "star_via_theta", "involute",
]


class BlockElement:
    """An invertible matrix carrying its block structure (alpha, k, m)."""

    __slots__ = ("alpha", "k", "m", "matrix")

    def __init__(self, alpha, k, m, matrix: Mat):
        n = alpha + k * m
        if matrix.shape != (n, n):
            raise ValueError(f"matrix is {matrix.shape}, expected {n}x{n}")
        if det(matrix) == 0:
            raise ValueError("block element must be invertible")
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "k", k)
        object.__setattr__(self, "m", m)
        object.__setattr__(self, "matrix", matrix)

    def __setattr__(self, name, value):
        raise AttributeError("BlockElement is immutable")

    def __eq__(self, other):
        return (isinstance(other, BlockElement)
                and (self.alpha, self.k, self.m) == (other.alpha, other.k, other.m)
                and self.matrix == other.matrix)

    def __hash__(self):
        return hash((self.alpha, self.k, self.m, self.matrix))

    def __repr__(self):
        return (f"BlockElement(alpha={self.alpha}, k={self.k}, m={self.m}, "
                f"{self.matrix!r})")

    def _slot(self, i):
        off = self.alpha + i * self.m
        return range(off, off + self.m)

    def block_a(self) -> Mat:
        return self.matrix.submatrix(range(self.alpha), range(self.alpha))

    def block_b(self, i) -> Mat:
        return self.matrix.submatrix(range(self.alpha), self._slot(i))

    def block_c(self, i) -> Mat:
        return self.matrix.submatrix(self._slot(i), range(self.alpha))

    def block_d(self, i, j) -> Mat:
        return self.matrix.submatrix(self._slot(i), self._slot(j))


def embed_diag(alpha, k, u: Mat) -> Mat:
    """diag(1_alpha, u, ..., u) with k copies of u (the slot-diagonal
    embedding of a single-slot matrix)."""
    if u.nrows != u.ncols:
        raise ValueError("slot matrix must be square")
    return block_diag(Mat.identity(alpha), *([u] * k))


def theta_mat(N, s) -> Mat:
    """Permutation of Q**s swapping coordinates 0..N-1 with N..2N-1."""
    if s < 2 * N:
        raise ValueError(f"slot size {s} too small for a {N}-swap")
    perm = list(range(s))
    for i in range(N):
        perm[i], perm[N + i] = perm[N + i], perm[i]
    return Mat([[1 if j == perm[i] else 0 for j in range(s)] for i in range(s)])


def pad(g: BlockElement, s) -> BlockElement:
    """Grow every slot from size m to size s by an identity tail: b and c
    blocks gain zero columns/rows, diagonal d blocks gain 1s."""
    if s < g.m:
        raise ValueError("cannot pad downwards")
    if s == g.m:
        return g
    extra = s - g.m
    grid = [[None] * (1 + g.k) for _ in range(1 + g.k)]
    grid[0][0] = g.block_a()
    for j in range(g.k):
        grid[0][1 + j] = hstack(g.block_b(j), Mat.zeros(g.alpha, extra))
    for i in range(g.k):
        grid[1 + i][0] = vstack(g.block_c(i), Mat.zeros(extra, g.alpha))
        for j in range(g.k):
            tail = Mat.identity(extra) if i == j else Mat.zeros(extra, extra)
            grid[1 + i][1 + j] = Mat.block([[g.block_d(i, j), 0], [0, tail]])
    return BlockElement(g.alpha, g.k, s, Mat.block(grid))


def coset_mul(g: BlockElement, h: BlockElement) -> BlockElement:
    """Blockwise product of double-coset representatives; the result has
    slot size g.m + h.m, g-side coordinates first inside each slot."""
    if g.alpha != h.alpha or g.k != h.k:
        raise ValueError("block shapes do not match")
    al, k = g.alpha, g.k
    a2 = g.block_a() * h.block_a()
    grid = [[None] * (1 + 2 * k) for _ in range(1 + 2 * k)]
    grid[0][0] = a2
    for j in range(k):
        grid[0][1 + 2 * j] = g.block_b(j)
        grid[0][2 + 2 * j] = g.block_a() * h.block_b(j)
    for i in range(k):
        grid[1 + 2 * i][0] = g.block_c(i) * h.block_a()
        grid[2 + 2 * i][0] = h.block_c(i)
        for j in range(k):
            grid[1 + 2 * i][1 + 2 * j] = g.block_d(i, j)
            grid[1 + 2 * i][2 + 2 * j] = g.block_c(i) * h.block_b(j)
            grid[2 + 2 * i][1 + 2 * j] = Mat.zeros(h.m, g.m)
            grid[2 + 2 * i][2 + 2 * j] = h.block_d(i, j)
    return BlockElement(al, k, g.m + h.m, Mat.block(grid))


def star_via_theta(g: BlockElement, h: BlockElement, N) -> BlockElement:
    """pad(g) theta_N pad(h) at slot size max(2N, l, m).  For N >=
    max(l, m) the double coset of the result is independent of N and
    agrees with the class of coset_mul(g, h)."""
    if g.alpha != h.alpha or g.k != h.k:
        raise ValueError("block shapes do not match")
    s = max(2 * N, g.m, h.m)
    gp, hp = pad(g, s), pad(h, s)
    th = embed_diag(g.alpha, g.k, theta_mat(N, s))
    return BlockElement(g.alpha, g.k, s, gp.matrix * th * hp.matrix)


def involute(g: BlockElement) -> BlockElement:
    """Matrix inverse, same block shape."""
    return BlockElement(g.alpha, g.k, g.m, invert(g.matrix))
