"""
Command line front-end.

Exit codes: 0 ok, 1 property violation, 2 usage or malformed input,
3 index overflow, 4 budget exceeded.
"""

import argparse
import json
import math
import statistics
import sys

import numpy as np

from convstab import alpha_bounds, autocorr_toeplitz as at, freiman, sparse_seq
from convstab.errors import BudgetError, IndexOverflowError, InputError

EXIT_OK, EXIT_VIOLATION, EXIT_USAGE, EXIT_OVERFLOW, EXIT_BUDGET = 0, 1, 2, 3, 4
SEED_MAX = 2 ** 64 - 1


class UsageError(Exception):
    pass


def _format_float(v):
    if not math.isfinite(v):
        raise ValueError(f"cannot serialize non-finite float {v!r}")
    text = "%.17g" % (v + 0.0)  # folds -0.0 into 0.0
    if not any(ch in text for ch in ".en"):
        text += ".0"
    return text


def dumps(obj, indent=0, step=2):
    """JSON text with floats written to 17 significant digits."""
    pad = " " * (indent + step)
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if obj is None:
        return "null"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _format_float(float(obj))
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {dumps(v, indent + step, step)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + " " * indent + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        if len(obj) == 0:
            return "[]"
        if all(not isinstance(v, (dict, list, tuple, np.ndarray)) for v in obj):
            return "[" + ", ".join(dumps(v) for v in obj) + "]"
        items = [pad + dumps(v, indent + step, step) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + " " * indent + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _reject_constant(name):
    raise InputError(f"non-finite JSON constant {name} rejected")


def load_json_arg(text, what):
    """Parse `text` as inline JSON if it looks like JSON, else as a file path."""
    if text is None:
        raise UsageError(f"missing {what}")
    stripped = text.lstrip()
    if not stripped.startswith(("{", "[")):
        try:
            with open(text) as fh:
                stripped = fh.read()
        except OSError as exc:
            raise UsageError(f"cannot read {what} from {text!r}: {exc.strerror}") from None
    try:
        return json.loads(stripped, parse_constant=_reject_constant)
    except json.JSONDecodeError as exc:
        raise UsageError(f"malformed JSON for {what}: {exc}") from None


def parse_vector(obj):
    """Dense complex vector from ``[[re, im], ...]``, ``[number, ...]`` or a sequence object."""
    if isinstance(obj, dict):
        seq = sparse_seq.from_json(obj)
        if not seq:
            raise InputError("vector is empty")
        return sparse_seq.canonicalize_shift(seq).to_dense()
    if not isinstance(obj, list) or not obj:
        raise InputError("vector must be a non-empty array")
    out = []
    for v in obj:
        if isinstance(v, list) and len(v) == 2 and all(
                isinstance(p, (int, float)) and not isinstance(p, bool) for p in v):
            out.append(complex(v[0], v[1]))
        elif isinstance(v, (int, float)) and not isinstance(v, bool):
            out.append(complex(v))
        else:
            raise InputError(f"vector entries must be numbers or [re, im] pairs, got {v!r}")
    return np.array(out)


def parse_support(obj):
    if isinstance(obj, dict):
        return sparse_seq.from_json(obj).support
    if not isinstance(obj, list) or not all(
            isinstance(v, int) and not isinstance(v, bool) for v in obj):
        raise InputError("support must be an array of integers")
    return obj


def cmd_conv(args):
    x = sparse_seq.from_json(load_json_arg(args.x, "--x"))
    y = sparse_seq.from_json(load_json_arg(args.y, "--y"))
    xy = sparse_seq.convolve(x, y)
    nx, ny, nxy = sparse_seq.norm(x), sparse_seq.norm(y), sparse_seq.norm(xy)
    out = {"conv": sparse_seq.to_json(xy), "norm_x": nx, "norm_y": ny, "norm_conv": nxy,
           "ratio": nxy / (nx * ny) if nx and ny else None}
    return EXIT_OK, out, None


def cmd_verify(args):
    if args.trials < 1:
        raise UsageError("--trials must be >= 1")
    if args.window < 0:
        raise UsageError("--window must be >= 0")
    rng = np.random.default_rng(args.seed)
    ref = None
    if min(args.s, args.f) == 1:
        ref = 1.0
    elif args.n_eff is not None:
        ref = alpha_bounds.alpha_upper_alternating(
            args.s, args.f, args.n_eff, restarts=args.restarts, seed=args.seed).alpha_upper
    ratios, violations, below = [], 0, 0
    for _ in range(args.trials):
        x = sparse_seq.random_sparse(rng, args.s, args.window)
        y = sparse_seq.random_sparse(rng, args.f, args.window)
        chk = alpha_bounds.verify_inequality(x, y, ref)
        ratios.append(chk.ratio)
        violations += not chk.upper_ok
        below += chk.below_reference
    out = {"trials": args.trials, "s": args.s, "f": args.f, "window": args.window,
           "seed": args.seed, "beta": alpha_bounds.beta(args.s, args.f),
           "min_ratio": min(ratios), "median_ratio": statistics.median(ratios),
           "max_ratio": max(ratios), "violations": violations,
           "alpha_reference": ref, "below_reference": below}
    return (EXIT_VIOLATION if violations else EXIT_OK), out, None


def cmd_compress(args):
    I = parse_support(load_json_arg(args.x, "--x"))
    J = parse_support(load_json_arg(args.y, "--y"))
    if not I or not J:
        raise InputError("supports must be non-empty")
    I = sparse_seq.SupportSet(I)
    J = sparse_seq.SupportSet(J)
    I0, J0 = I.shifted(-I.elements[0]), J.shifted(-J.elements[0])
    res = freiman.compress_support(I0, J0)
    out = res.to_json()
    out["domain"] = list(res.map.domain.elements)
    return (EXIT_OK if res.within_bound else EXIT_VIOLATION), out, None


def cmd_toeplitz(args):
    a = parse_vector(load_json_arg(args.input, "--input"))
    nrm = np.linalg.norm(a)
    if nrm == 0:
        raise InputError("generator must be nonzero")
    a = a / nrm
    B = at.build_matrix(a)
    if args.format == "csv":
        omegas, vals = at.symbol_grid(B, args.grid)
        rows = ["omega,symbol"] + [f"{_format_float(w)},{_format_float(v)}" for w, v in zip(omegas, vals)]
        return EXIT_OK, None, "\n".join(rows) + "\n"
    lam, vec = at.smallest_eigenvalue(B)
    out = B.to_json()
    out.update({
        "matrix": [[[z.real, z.imag] for z in row] for row in B.matrix.tolist()],
        "lambda_min": lam,
        "eigenvector": [[z.real, z.imag] for z in vec.tolist()],
        "abs_det": at.abs_det(B),
        "sum_sq_autocorr": B.sum_sq_autocorr(),
        "det_eigen_lower_bound": float(at.det_eigen_lower_bound(B)),
        "symbol_min": at.symbol_min(B, args.grid),
        "grid": args.grid,
    })
    bad = out["symbol_min"] < -1e-9 or out["det_eigen_lower_bound"] > lam + 1e-10
    return (EXIT_VIOLATION if bad else EXIT_OK), out, None


def cmd_alpha(args):
    rep = alpha_bounds.stability_report(args.s, args.f, args.n_eff, restarts=args.restarts,
                                        seed=args.seed, d_estimate_budget=args.det_starts)
    out = rep.to_json()
    ok = rep.alpha_upper <= rep.beta + 1e-12
    if rep.alpha_lower is not None:
        ok = ok and 0 < rep.alpha_lower <= rep.alpha_upper
    return (EXIT_OK if ok else EXIT_VIOLATION), out, None


def cmd_table(args):
    A = alpha_bounds.monotonicity_table(args.s, args.f, args.n_eff, restarts=args.restarts,
                                        seed=args.seed, check=False)
    bad = alpha_bounds.table_violations(A)
    code = EXIT_VIOLATION if bad else EXIT_OK
    if args.format == "csv":
        rows = ["s,f,alpha_upper"]
        for i in range(A.shape[0]):
            for j in range(A.shape[1]):
                rows.append(f"{i + 1},{j + 1},{_format_float(A[i, j])}")
        return code, None, "\n".join(rows) + "\n"
    out = {"s_max": args.s, "f_max": args.f, "n_eff": args.n_eff, "restarts": args.restarts,
           "seed": args.seed, "table": A.tolist(), "violations": bad}
    return code, out, None


def _seed(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid seed {text!r}") from None
    if not 0 <= v <= SEED_MAX:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return v


def build_parser():
    p = argparse.ArgumentParser(prog="convstab",
                                description="Stability bounds for sparse convolutions.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, fmt=False):
        sp.add_argument("--seed", type=_seed, default=0)
        sp.add_argument("--out", help="write output here instead of stdout")
        if fmt:
            sp.add_argument("--format", choices=("json", "csv"), default="json")

    sp = sub.add_parser("conv", help="convolve two sparse sequences")
    sp.add_argument("--x", required=True, help="sequence JSON (inline or path)")
    sp.add_argument("--y", required=True, help="sequence JSON (inline or path)")
    common(sp)
    sp.set_defaults(func=cmd_conv)

    sp = sub.add_parser("verify", help="random campaign for the norm inequality")
    sp.add_argument("--s", type=int, default=2)
    sp.add_argument("--f", type=int, default=2)
    sp.add_argument("--trials", type=int, default=1000)
    sp.add_argument("--window", type=int, default=10 ** 6)
    sp.add_argument("--n-eff", type=int, default=None,
                    help="compute a reference alpha upper bound at this dimension")
    sp.add_argument("--restarts", type=int, default=32)
    common(sp)
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("compress", help="least-diameter Freiman isomorphism of two supports")
    sp.add_argument("--x", required=True, help="support array or sequence JSON")
    sp.add_argument("--y", required=True, help="support array or sequence JSON")
    common(sp)
    sp.set_defaults(func=cmd_compress)

    sp = sub.add_parser("toeplitz", help="autocorrelation Toeplitz matrix of a generator")
    sp.add_argument("--input", required=True, help="vector JSON (inline or path)")
    sp.add_argument("--grid", type=int, default=4096)
    common(sp, fmt=True)
    sp.set_defaults(func=cmd_toeplitz)

    sp = sub.add_parser("alpha", help="upper and lower bounds on alpha(s, f)")
    sp.add_argument("--s", type=int, required=True)
    sp.add_argument("--f", type=int, required=True)
    sp.add_argument("--n-eff", type=int, default=4)
    sp.add_argument("--restarts", type=int, default=32)
    sp.add_argument("--det-starts", type=int, default=16)
    common(sp)
    sp.set_defaults(func=cmd_alpha)

    sp = sub.add_parser("table", help="alpha upper bounds for all s <= S, f <= F")
    sp.add_argument("--s", type=int, required=True)
    sp.add_argument("--f", type=int, required=True)
    sp.add_argument("--n-eff", type=int, default=6)
    sp.add_argument("--restarts", type=int, default=32)
    common(sp, fmt=True)
    sp.set_defaults(func=cmd_table)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        code, obj, text = args.func(args)
    except UsageError as exc:
        print(f"convstab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except IndexOverflowError as exc:
        print(f"convstab: overflow: {exc}", file=sys.stderr)
        return EXIT_OVERFLOW
    except InputError as exc:
        print(f"convstab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except BudgetError as exc:
        print(f"convstab: budget: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except ValueError as exc:
        # e.g. a malformed CONVSTAB_THREADS
        print(f"convstab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if text is None:
        text = dumps(obj) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
