"""Vertex graphs of (almost) self-dual modules and the continuity harness.

Vertices are almost self-dual modules for the standard symplectic form;
an arrow points from a module to anything it contains.  Around a
self-dual lattice the strict neighbors are enumerated exactly by lifting
isotropic subspaces of the mod-p reduction.  The continuity harness
checks, at a chosen finite depth, that chi transforms an ascending
sequence of windows into an ascending sequence of relations.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, product

from gmpy2 import mpq

from .charfn import chi, head_bminus
from .cosets import BlockElement
from .exact import Mat, min_valuation, p_pow, valuation
from .modules import (
    Module, dual, is_almost_selfdual, is_selfdual, standard_lattice,
    symplectic_gram,
)


def classify(R: Module, gram: Mat = None) -> str:
    """'selfdual', 'almost_selfdual', or 'neither' for the given form
    (standard symplectic by default)."""
    if R.ambient % 2:
        raise ValueError("classification needs an even ambient dimension")
    if gram is None:
        gram = symplectic_gram(R.ambient // 2)
    if is_selfdual(R, gram):
        return "selfdual"
    if is_almost_selfdual(R, gram):
        return "almost_selfdual"
    return "neither"


def has_arrow(R: Module, R2: Module) -> bool:
    """Arrow from R to R2 when R contains R2 (loops allowed).  Both must
    be almost self-dual; an arrow forces the subspace shadows to agree."""
    gram = symplectic_gram(R.ambient // 2)
    for name, mod in (("first", R), ("second", R2)):
        if not is_almost_selfdual(mod, gram):
            raise ValueError(f"{name} module is not almost self-dual")
    ok = R.contains(R2)
    if ok:
        assert R.down() == R2.down() and R.up() == R2.up(), \
            "arrow between vertices with different shadows"
    return ok


def _subspaces_mod_p(p, d):
    """All subspaces of F_p**d as reduced-echelon basis row lists."""
    out = [[]]
    for r in range(1, d + 1):
        for pivots in combinations(range(d), r):
            free_pos = [(i, j) for i in range(r)
                        for j in range(pivots[i] + 1, d) if j not in pivots]
            for vals in product(range(p), repeat=len(free_pos)):
                rows = [[0] * d for _ in range(r)]
                for i, c in enumerate(pivots):
                    rows[i][c] = 1
                for (i, j), v in zip(free_pos, vals):
                    rows[i][j] = v
                out.append(rows)
    return out


def neighbors_over(n, p) -> list[Module]:
    """All almost self-dual R with O**2n <= R <= p^{-1} O**2n.

    Each one is the lift of a subspace of the mod-p quotient that is
    isotropic for the (rescaled-integral) reduction of the symplectic
    form; the list starts with the lattice itself and is otherwise in
    subspace-enumeration order."""
    if n > 2 or p > 5:
        raise ValueError("enumeration bound exceeded (need n <= 2, p <= 5)")
    d = 2 * n
    gram = symplectic_gram(n)
    M = standard_lattice(p, d)
    out = []
    for basis in _subspaces_mod_p(p, d):
        iso = all((Mat([u]) * gram * Mat([w]).T)[0, 0] % p == 0
                  for u in basis for w in basis)
        if not iso:
            continue
        lifted = [[mpq(e, p) for e in row] for row in basis]
        R = Module(p, d, free=[], integral=list(M.int_part.rows) + lifted)
        assert is_almost_selfdual(R, gram)
        out.append(R)
    return out


@dataclass(frozen=True)
class VertexPair:
    """An ordered pair of almost self-dual window modules."""
    Q: Module
    T: Module

    def __post_init__(self):
        for name in ("Q", "T"):
            mod = getattr(self, name)
            gram = symplectic_gram(mod.ambient // 2)
            if not is_almost_selfdual(mod, gram):
                raise ValueError(f"{name} is not almost self-dual")


def chi_graph_morphism_check(g: BlockElement, pair: VertexPair,
                             pair2: VertexPair) -> dict:
    """Check that chi sends the arrow pair -> pair2 to an arrow (or a
    loop): chi(Q,T) contains chi(Q',T') and both are almost self-dual."""
    if not (pair.Q.contains(pair2.Q) and pair.T.contains(pair2.T)):
        raise ValueError("no arrow between the given vertex pairs")
    big = chi(g, pair.Q, pair.T)
    small = chi(g, pair2.Q, pair2.T)
    bm = head_bminus(g.alpha)
    witnesses = []
    if not is_almost_selfdual(big.body, bm):
        witnesses.append("chi of the larger pair is not almost self-dual")
    if not is_almost_selfdual(small.body, bm):
        witnesses.append("chi of the smaller pair is not almost self-dual")
    if not big.body.contains(small.body):
        witnesses.append("containment of images fails")
    return {"pass": not witnesses, "equal": big.body == small.body,
            "witnesses": witnesses}


def _fmt(vec):
    return [str(e) for e in vec]


def _scaled_generators(R: Module, t):
    """Canonical generators and their p-power scalings that fit in p^{-t}O."""
    out = []
    for row in R.free.rows:
        for s in range(-t, t + 1):
            w = [p_pow(R.p, s) * e for e in row]
            if min_valuation(Mat([w]), R.p) >= -t:
                out.append(w)
    for row in R.int_part.rows:
        if min_valuation(Mat([row]), R.p) >= -t:
            out.append(list(row))
    return out


def ascend_check(seq: list[Module], limit: Module, t) -> dict:
    """Desk-scale check that seq ascends to limit.

    Clause (i): every canonical generator of the limit with coordinates
    in p^{-t}O (p-power rescalings of free generators included) lies in
    all tail members of the sequence.  Clause (ii): members of the
    sequence are approximately inside the limit, at a nondecreasing depth
    that reaches t by the end."""
    witnesses = []
    for w in _scaled_generators(limit, t):
        tail = next((j for j in range(len(seq), 0, -1)
                     if not seq[j - 1].contains_vector(w)), 0)
        if tail == len(seq):
            witnesses.append({"clause": "i", "vector": _fmt(w)})
    depths = []
    for R in seq:
        d = -1
        while d < t and all(limit.approx_contains(v, d + 1)
                            for v in R.gens().rows):
            d += 1
        depths.append(d)
    if any(a > b for a, b in zip(depths, depths[1:])):
        witnesses.append({"clause": "ii", "depths": depths})
    elif depths and depths[-1] < t:
        witnesses.append({"clause": "ii", "depths": depths})
    return {"pass": not witnesses, "depths": depths, "witnesses": witnesses}


def continuity_check(g: BlockElement, Qseq: list[Module], Qinf: Module,
                     T: Module, t) -> dict:
    """Push an ascending window sequence through chi and run ascend_check
    on the outputs; also recheck that the subspace shadows of the outputs
    stay inside the limit's shadow."""
    gram = symplectic_gram(Qinf.ambient // 2)
    for R in [*Qseq, Qinf, T]:
        if not is_almost_selfdual(R, symplectic_gram(R.ambient // 2)):
            raise ValueError("continuity check needs almost self-dual input")
    del gram
    out_seq = [chi(g, Q, T).body for Q in Qseq]
    out_inf = chi(g, Qinf, T).body
    report = ascend_check(out_seq, out_inf, t)
    for j, body in enumerate(out_seq):
        if not out_inf.down().contains(body.down()):
            report["witnesses"].append({"clause": "shadow", "index": j})
            report["pass"] = False
    return report


def documented_sequence(p, jmax) -> tuple[list[Module], Module]:
    """The reference ascending family: p^{-j}O + p^{j}O climbing to the
    Lagrangian line spanned by the first basis vector."""
    seq = [Module(p, 2, free=[],
                  integral=[[p_pow(p, -j), mpq(0)], [mpq(0), p_pow(p, j)]])
           for j in range(jmax + 1)]
    limit = Module(p, 2, free=[[mpq(1), mpq(0)]], integral=[])
    return seq, limit
