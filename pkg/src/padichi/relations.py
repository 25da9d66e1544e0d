"""Linear relations between p-adic spaces, carried by submodules.

A relation V -> W is any Module inside Q**(src+dst), source coordinates
first.  Composition is computed without ever choosing representatives:
embed both bodies in V (+) W (+) W (+) Y, cut with the diagonal subspace
{(v, w, w, y)}, and project to (v, y).  Since the diagonal is a subspace,
the cut is an intersect_subspace, which keeps the hot path cheap.

The star of the show is the self-duality ("norm-preserving") property:
a relation P is called nazarov here when its body is self-dual for the
difference form B(x, x') - B'(y, y') on V (+) W.  Composites of such
relations stay self-dual, and kernel/indef are exact duals of dom/im.
"""

from __future__ import annotations

from .exact import Mat, block_diag, hstack
from .modules import (
    Module, dual, embed_coords, intersect, intersect_subspace, image,
    module_sum, project_coords,
)

__all__ = [
    "Relation", "graph_of", "identity_relation", "from_module",
    "kernel", "indef", "dom", "im", "pseudo_inverse", "compose",
    "apply_to_module", "bminus_gram", "is_nazarov", "is_strict_nazarov",
]


class Relation:
    """A module relation src -> dst: body is a Module in Q**(src+dst)."""

    __slots__ = ("p", "src", "dst", "body")

    def __init__(self, p, src, dst, body: Module):
        if body.ambient != src + dst:
            raise ValueError(f"body lives in Q^{body.ambient}, expected Q^{src + dst}")
        if body.p != p:
            raise ValueError("prime mismatch between relation and body")
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "src", src)
        object.__setattr__(self, "dst", dst)
        object.__setattr__(self, "body", body)

    def __setattr__(self, name, value):
        raise AttributeError("Relation is immutable")

    def __eq__(self, other):
        return (isinstance(other, Relation) and self.src == other.src
                and self.dst == other.dst and self.body == other.body)

    def __hash__(self):
        return hash((self.src, self.dst, self.body))

    def __repr__(self):
        return f"Relation({self.src}->{self.dst}, {self.body!r})"


def graph_of(p, A: Mat) -> Relation:
    """Graph {(x, Ax)} of a linear map given in column convention
    (A is dst-by-src), as a subspace relation."""
    src, dst = A.ncols, A.nrows
    body = Module(p, src + dst, free=hstack(Mat.identity(src), A.T))
    return Relation(p, src, dst, body)


def identity_relation(p, n) -> Relation:
    return graph_of(p, Mat.identity(n))


def from_module(T: Module) -> Relation:
    """A module T in Q**n viewed as a relation 0 -> n (a 'state')."""
    return Relation(T.p, 0, T.ambient, T)


def dom(rel: Relation) -> Module:
    return project_coords(rel.body, range(rel.src))


def im(rel: Relation) -> Module:
    return project_coords(rel.body, range(rel.src, rel.src + rel.dst))


def kernel(rel: Relation) -> Module:
    """{x : (x, 0) in body}."""
    window = hstack(Mat.identity(rel.src), Mat.zeros(rel.src, rel.dst))
    return project_coords(intersect_subspace(window, rel.body), range(rel.src))


def indef(rel: Relation) -> Module:
    """{y : (0, y) in body} -- the indeterminacy the relation adds to 0."""
    window = hstack(Mat.zeros(rel.dst, rel.src), Mat.identity(rel.dst))
    return project_coords(intersect_subspace(window, rel.body),
                          range(rel.src, rel.src + rel.dst))


def pseudo_inverse(rel: Relation) -> Relation:
    """Swap source and target blocks."""
    perm = Mat.identity(rel.src + rel.dst).take_cols(
        list(range(rel.src, rel.src + rel.dst)) + list(range(rel.src)))
    return Relation(rel.p, rel.dst, rel.src, image(rel.body, perm))


def compose(second: Relation, first: Relation) -> Relation:
    """second after first: pairs (v, y) with (v, w) in first and (w, y) in
    second for some shared w."""
    if first.dst != second.src:
        raise ValueError(f"cannot compose {second.src}->{second.dst} "
                         f"after {first.src}->{first.dst}")
    if first.p != second.p:
        raise ValueError("prime mismatch")
    s, w, y = first.src, first.dst, second.dst
    n = s + 2 * w + y
    big = module_sum(embed_coords(first.body, n, range(s + w)),
                     embed_coords(second.body, n, range(s + w, n)))
    diag = Mat.block([
        [Mat.identity(s), 0, 0, 0],
        [0, Mat.identity(w), Mat.identity(w), 0],
        [0, 0, 0, Mat.identity(y)],
    ])
    hit = intersect_subspace(diag, big)
    sel = list(range(s)) + list(range(s + 2 * w, n))
    return Relation(first.p, s, y, project_coords(hit, sel))


def apply_to_module(rel: Relation, T: Module) -> Module:
    """{y : (x, y) in body for some x in T}."""
    if T.ambient != rel.src:
        raise ValueError(f"module in Q^{T.ambient}, relation source is Q^{rel.src}")
    n = rel.src + rel.dst
    window = module_sum(
        embed_coords(T, n, range(rel.src)),
        Module(T.p, n, free=Mat.identity(n).take_rows(range(rel.src, n))),
    )
    return project_coords(intersect(rel.body, window), range(rel.src, n))


def bminus_gram(gram_src: Mat, gram_dst: Mat) -> Mat:
    """The difference form on V (+) W: B_V on the source block minus
    B_W on the target block."""
    return block_diag(gram_src, -gram_dst)


def is_nazarov(rel: Relation, gram_src: Mat, gram_dst: Mat) -> bool:
    """Body self-dual for the difference form."""
    bm = bminus_gram(gram_src, gram_dst)
    return dual(rel.body, bm) == rel.body


def is_strict_nazarov(rel: Relation, gram_src: Mat, gram_dst: Mat) -> bool:
    """Self-dual with compact kernel and indeterminacy (no free directions)."""
    return (is_nazarov(rel, gram_src, gram_dst)
            and kernel(rel).is_compact() and indef(rel).is_compact())
