"""Command line front end.

One executable, `padichi`, with object verbs (canon, eq, dual, intersect,
sum, compose, coset-mul, chi, chi-boundary, lambda, classify, neighbors,
morphism-check, continuity, weil) and the seeded verification driver
(verify).  All object I/O is JSON in the schemas of serialize.py; stdout
for identical invocations is byte-identical, so timing data only appears
on stderr (--timings) or in --out files.

Exit codes: 0 success / checks passed, 1 a property check failed,
2 usage error (bad flags, malformed input, precondition violations).
"""

from __future__ import annotations

import argparse
import json
import sys

from gmpy2 import mpq

from . import serialize as ser
from .buildings import (
    VertexPair, chi_graph_morphism_check, classify, continuity_check,
    documented_sequence, neighbors_over,
)
from .charfn import (
    BoundaryPair, SingularBoundary, chi, chi_boundary, chi_sp,
    lambda_subspace, z_matrix,
)
from .cosets import coset_mul, pad
from .exact import Mat, check_prime
from .modules import (
    dual, intersect, module_sum, standard_lattice, symplectic_gram,
)
from .relations import compose
from .suites import ORDER, run_all, run_suite


class UsageError(Exception):
    pass


def _load(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read {path}: {exc}") from exc


def _module_arg(path, p):
    return ser.parse_module(_load(path), p)


def _emit(args, payload):
    text = ser.dumps(payload)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _prime(args):
    if args.p is None:
        raise UsageError("--p is required for this verb")
    return check_prime(args.p)


# ------------------------------------------------------------- object verbs

def cmd_canon(args):
    _emit(args, ser.module_json(_module_arg(args.files[0], _prime(args))))
    return 0


def cmd_eq(args):
    p = _prime(args)
    a, b = (_module_arg(f, p) for f in args.files)
    _emit(args, {"equal": a == b})
    return 0


def cmd_dual(args):
    p = _prime(args)
    R = _module_arg(args.files[0], p)
    if args.gram:
        gram = ser.parse_mat(_load(args.gram))
    elif R.ambient % 2 == 0:
        gram = symplectic_gram(R.ambient // 2)
    else:
        raise UsageError("odd ambient dimension needs an explicit --gram")
    _emit(args, ser.module_json(dual(R, gram)))
    return 0


def cmd_intersect(args):
    p = _prime(args)
    a, b = (_module_arg(f, p) for f in args.files)
    _emit(args, ser.module_json(intersect(a, b)))
    return 0


def cmd_sum(args):
    p = _prime(args)
    a, b = (_module_arg(f, p) for f in args.files)
    _emit(args, ser.module_json(module_sum(a, b)))
    return 0


def cmd_compose(args):
    p = _prime(args)
    outer = ser.parse_relation(_load(args.files[0]), p)
    inner = ser.parse_relation(_load(args.files[1]), p)
    _emit(args, ser.relation_json(compose(outer, inner)))
    return 0


def cmd_coset_mul(args):
    g = ser.parse_block(_load(args.files[0]))
    h = ser.parse_block(_load(args.files[1]))
    _emit(args, ser.block_json(coset_mul(g, h)))
    return 0


def cmd_chi(args):
    p = _prime(args)
    Q = _module_arg(args.Q, p)
    T = _module_arg(args.T, p)
    if args.sp:
        if Q.ambient % 2:
            raise UsageError("window ambient dimension must be even")
        k = Q.ambient // 2
        m = args.m or 1
        gs = ser.parse_mat(_load(args.sp))
        alpha = gs.nrows // 2 - k * m
        if alpha < 1:
            raise UsageError("symplectic flow too small for the windows")
        rel = chi_sp(gs, alpha, k, m, Q, T)
    else:
        g = ser.parse_block(_load(args.g))
        if args.m:
            g = pad(g, args.m)
        rel = chi(g, Q, T)
    _emit(args, ser.relation_json(rel))
    return 0


def cmd_chi_boundary(args):
    p = _prime(args)
    g = ser.parse_block(_load(args.g))
    bp = BoundaryPair(ser.parse_mat(_load(args.kappa)),
                      ser.parse_mat(_load(args.tau)))
    try:
        rel, S = chi_boundary(g, bp, p)
    except SingularBoundary as exc:
        _emit(args, {"kind": "singular", "detail": str(exc)})
        return 0
    payload = {
        "kind": "symplectic" if S is not None else "relation",
        "relation": ser.relation_json(rel),
        "Z": ser.mat_json(z_matrix(g, bp)),
    }
    if S is not None:
        payload["S"] = ser.mat_json(S)
    _emit(args, payload)
    return 0


def cmd_lambda(args):
    p = _prime(args)
    g = ser.parse_block(_load(args.g))
    _emit(args, ser.module_json(lambda_subspace(g, p)))
    return 0


def cmd_classify(args):
    p = _prime(args)
    R = _module_arg(args.files[0], p)
    gram = ser.parse_mat(_load(args.gram)) if args.gram else None
    _emit(args, {"class": classify(R, gram)})
    return 0


def cmd_neighbors(args):
    p = _prime(args)
    near = neighbors_over(args.n, p)
    _emit(args, {"count": len(near),
                 "neighbors": [ser.module_json(R) for R in near]})
    return 0


def cmd_morphism_check(args):
    p = _prime(args)
    g = ser.parse_block(_load(args.g))
    pair = VertexPair(_module_arg(args.Q, p), _module_arg(args.T, p))
    pair2 = VertexPair(_module_arg(args.Q2, p), _module_arg(args.T2, p))
    out = chi_graph_morphism_check(g, pair, pair2)
    _emit(args, out)
    return 0 if out["pass"] else 1


def cmd_continuity(args):
    p = _prime(args)
    if args.seq:
        blob = _load(args.seq)
        seq = [ser.parse_module(o, p) for o in blob["seq"]]
        limit = ser.parse_module(blob["limit"], p)
    else:
        seq, limit = documented_sequence(p, args.jmax)
    if args.g:
        g = ser.parse_block(_load(args.g))
    else:
        from .cosets import BlockElement
        g = BlockElement(1, 1, 1, Mat([[1, 1], [0, 1]]))
    T = _module_arg(args.T, p) if args.T else standard_lattice(p, 2)
    out = continuity_check(g, seq, limit, T, args.t)
    _emit(args, out)
    return 0 if out["pass"] else 1


def cmd_weil(args):
    import numpy as np

    from .weil import (
        FiniteModel, heis_op, lambda_op, theta_op, weil_diag, weil_fourier,
        weil_of, weil_upper,
    )

    model = FiniteModel(_prime(args), args.N)

    def op_json(op):
        return {"dim": op.model.dim, "matrix": ser.complex_json(op.matrix)}

    if args.op == "fourier":
        _emit(args, op_json(weil_fourier(model)))
    elif args.op == "diag":
        _emit(args, op_json(weil_diag(model, ser.parse_rat(args.A))))
    elif args.op == "upper":
        _emit(args, op_json(weil_upper(model, ser.parse_rat(args.B))))
    elif args.op == "heis":
        lam = complex(*(float(x) for x in args.lam.split(",")))
        _emit(args, op_json(heis_op(model, ser.parse_rat(args.vplus),
                                    ser.parse_rat(args.vminus), lam=lam,
                                    convention=args.convention)))
    elif args.op == "of":
        _emit(args, op_json(weil_of(model, ser.parse_mat(_load(args.g)))))
    elif args.op == "check":
        witnesses = []
        f = weil_fourier(model)
        if f.unitary_defect() >= 1e-9:
            witnesses.append("fourier unitarity")
        f4 = (f @ f @ f @ f).matrix
        if np.abs(f4 - np.eye(model.dim)).max() >= 1e-9:
            witnesses.append("fourier fourth power")
        v = (mpq(1, model.p), mpq(1))
        w = (mpq(1), mpq(-1, model.p))
        a, b = heis_op(model, *v), heis_op(model, *w)
        phase = model.char(v[0] * w[1] - v[1] * w[0])
        if np.abs((a @ b).matrix - phase * (b @ a).matrix).max() >= 1e-10:
            witnesses.append("heisenberg commutator phase")
        if model.p ** (4 * model.N) <= 2000:
            lam_ = lambda_op(model, FiniteModel(model.p, model.N, 2))
            if np.abs((lam_.adjoint() @ lam_).matrix
                      - np.eye(model.dim)).max() >= 1e-12:
                witnesses.append("lambda isometry")
            th = theta_op(FiniteModel(model.p, model.N, 2))
            if np.abs((th @ th).matrix - th.matrix).max() >= 1e-12:
                witnesses.append("theta idempotence")
        _emit(args, {"pass": not witnesses, "witnesses": witnesses})
        return 0 if not witnesses else 1
    return 0


# ------------------------------------------------------------------- verify

def cmd_verify(args):
    p_list = [check_prime(int(tok)) for tok in str(args.p or "3,5,7").split(",")]
    if args.suite == "all":
        reports = run_all(p_list, args.trials, args.seed)
    else:
        reports = [run_suite(args.suite, p_list, args.trials, args.seed)]
    if args.timings:
        for r in reports:
            print(f"{r.suite}: {r.wall_time:.3f}s", file=sys.stderr)
    if args.report_dir:
        from .report import write_report
        write_report(reports, args.report_dir)
    # stdout must be byte-deterministic: wall_time only reaches --out files
    shaped = [r.to_json(with_time=bool(args.out)) for r in reports]
    payload = shaped if args.suite == "all" else shaped[0]
    _emit(args, payload)
    return 0 if all(r.passed for r in reports) else 1


# -------------------------------------------------------------------- panel

def _build_parser():
    top = argparse.ArgumentParser(
        prog="padichi",
        description="Exact double-coset calculus over Z_(p): object verbs "
                    "and seeded verification suites.")
    sub = top.add_subparsers(dest="verb", required=True)

    def common(sp, files=0):
        sp.add_argument("--p", type=int, default=None,
                        help="the prime (mandatory wherever valuation matters)")
        sp.add_argument("--out", default=None, help="write output to FILE")
        sp.add_argument("--format", choices=["json"], default="json")
        if files:
            sp.add_argument("files", nargs=files, help="input JSON file(s)")
        return sp

    common(sub.add_parser("canon", help="canonical module form"), 1)
    common(sub.add_parser("eq", help="module equality"), 2)
    d = common(sub.add_parser("dual", help="dual module for a pairing"), 1)
    d.add_argument("--gram", help="pairing matrix JSON (default symplectic)")
    common(sub.add_parser("intersect"), 2)
    common(sub.add_parser("sum"), 2)
    common(sub.add_parser("compose", help="compose OUTER INNER "
                          "(INNER applied first)"), 2)
    common(sub.add_parser("coset-mul", help="product of block elements"), 2)

    c = common(sub.add_parser("chi", help="characteristic relation"))
    c.add_argument("--g", help="block element JSON")
    c.add_argument("--Q", required=True, help="input window module JSON")
    c.add_argument("--T", required=True, help="output window module JSON")
    c.add_argument("--m", type=int, default=None, help="pad level")
    c.add_argument("--sp", default=None,
                   help="symplectic flow matrix JSON instead of --g")

    cb = common(sub.add_parser("chi-boundary",
                               help="closed form at graph windows"))
    cb.add_argument("--g", required=True)
    cb.add_argument("--kappa", required=True)
    cb.add_argument("--tau", required=True)

    lv = common(sub.add_parser("lambda", help="fully-windowed subspace"))
    lv.add_argument("--g", required=True)

    cl = common(sub.add_parser("classify", help="self-duality class"), 1)
    cl.add_argument("--gram", help="pairing matrix JSON (default symplectic)")

    nb = common(sub.add_parser("neighbors", help="local almost-self-dual "
                               "superlattices of the standard lattice"))
    nb.add_argument("--n", type=int, required=True,
                    help="hyperbolic pair count (1 or 2)")

    mc = common(sub.add_parser("morphism-check",
                               help="chi respects window containment"))
    for flag in ("--g", "--Q", "--T", "--Q2", "--T2"):
        mc.add_argument(flag, required=True)

    ct = common(sub.add_parser("continuity", help="ascending-window check"))
    ct.add_argument("--g", default=None, help="block element JSON")
    ct.add_argument("--T", default=None, help="fixed output window JSON")
    ct.add_argument("--seq", default=None,
                    help='JSON {"seq": [module...], "limit": module}')
    ct.add_argument("--jmax", type=int, default=6)
    ct.add_argument("--t", type=int, default=4)

    wl = common(sub.add_parser("weil", help="finite-level operators"))
    wl.add_argument("--N", type=int, default=1, help="window depth")
    wl.add_argument("op", choices=["fourier", "diag", "upper", "heis",
                                   "of", "check"])
    wl.add_argument("--A", default="1")
    wl.add_argument("--B", default="0")
    wl.add_argument("--vplus", default="0")
    wl.add_argument("--vminus", default="0")
    wl.add_argument("--lam", default="1,0", help="unit scalar as re,im")
    wl.add_argument("--convention", choices=["corrected", "as_written"],
                    default="corrected")
    wl.add_argument("--g", default=None, help="2x2 matrix JSON for `of`")

    vf = sub.add_parser("verify", help="seeded verification suites")
    vf.add_argument("suite", choices=list(ORDER) + ["all"])
    vf.add_argument("--p", default=None, help="comma-separated primes")
    vf.add_argument("--trials", type=int, default=50)
    vf.add_argument("--seed", type=int, default=1)
    vf.add_argument("--out", default=None)
    vf.add_argument("--format", choices=["json"], default="json")
    vf.add_argument("--timings", action="store_true",
                    help="per-suite wall times on stderr")
    vf.add_argument("--report-dir", default=None,
                    help="write suites.csv and summary.png here")
    return top


HANDLERS = {
    "canon": cmd_canon, "eq": cmd_eq, "dual": cmd_dual,
    "intersect": cmd_intersect, "sum": cmd_sum, "compose": cmd_compose,
    "coset-mul": cmd_coset_mul, "chi": cmd_chi,
    "chi-boundary": cmd_chi_boundary, "lambda": cmd_lambda,
    "classify": cmd_classify, "neighbors": cmd_neighbors,
    "morphism-check": cmd_morphism_check, "continuity": cmd_continuity,
    "weil": cmd_weil, "verify": cmd_verify,
}


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    if args.verb == "chi" and not (args.g or args.sp):
        print("padichi chi: one of --g or --sp is required", file=sys.stderr)
        return 2
    try:
        return HANDLERS[args.verb](args)
    except UsageError as exc:
        print(f"padichi {args.verb}: {exc}", file=sys.stderr)
        return 2
    except (ValueError, KeyError) as exc:
        print(f"padichi {args.verb}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
