"""Command-line entry point ``jensen-order``.

Exit codes: 0 success / relation holds, 1 usage or data error,
2 relation violated, 3 numerics inconclusive.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .antisymmetry import EQUAL, PREMISE_VIOLATED, decide_equal
from .fuzz import run_campaign
from .relation import check_relation_sphere, check_relation_tangent, dual_relation_check, normalize_direction
from .sandwich import CSV_COLUMNS, check_sandwich, kernel_match, near_zero_ratio, root_lower_bound, sweep
from .scalar import DomainError, FunctionSpecError, UnsupportedCompositionError, parse
from .serialize import MatrixFormatError, dumps, load_matrix, matrix_to_doc, save_matrix, to_csv

EXIT_OK, EXIT_ERROR, EXIT_VIOLATED, EXIT_INCONCLUSIVE = 0, 1, 2, 3

A_ZERO_MESSAGE = ("a must be > 0: the second-order constant c is unbounded when the box "
                  "reaches 0 (e.g. f = g = sqrt gives a ratio growing like lam^(-1/2))")


class UsageError(Exception):
    pass


def _positive(text):
    x = float(text)
    if not x > 0:
        raise argparse.ArgumentTypeError(f"must be positive, got {text}")
    return x


def _int_list(text):
    try:
        vals = [int(x) for x in text.split(",") if x]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad integer list {text!r}") from None
    if not vals or any(v < 1 for v in vals):
        raise argparse.ArgumentTypeError("n values must be positive integers")
    return vals


def _float_list(text):
    try:
        return [float(x) for x in text.split(",") if x]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad number list {text!r}") from None


def _dims(text):
    lo, sep, hi = text.partition("..")
    try:
        lo, hi = int(lo), int(hi if sep else lo)
    except ValueError:
        raise argparse.ArgumentTypeError(f"dims must look like 2..6, got {text!r}") from None
    if lo < 1 or hi < lo:
        raise argparse.ArgumentTypeError(f"bad dimension range {text!r}")
    return lo, hi


def _seed(text):
    s = int(text)
    if not 0 <= s < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return s


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="jensen-order", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, matrices=True):
        if matrices:
            sp.add_argument("X", help="matrix JSON file")
            sp.add_argument("Y", help="matrix JSON file")
        sp.add_argument("--seed", type=_seed, default=0)
        sp.add_argument("--format", choices=("json", "csv", "pretty"), default="json")
        sp.add_argument("--output", "-o", help="write the report here instead of stdout")

    sp = sub.add_parser("check", help="vector-state Jensen relation between X and Y")
    common(sp)
    sp.add_argument("--f", required=True, help="function spec, e.g. sqrt or pow:0.3")
    sp.add_argument("--dir", default="concave-le", dest="direction",
                    choices=("concave-le", "convex-ge"))
    sp.add_argument("--one-sided", action="store_true", help="only the (X, Y) ordering")
    sp.add_argument("--method", choices=("tangent", "sphere"), default="tangent")
    sp.add_argument("--restarts", type=int, default=64)

    sp = sub.add_parser("decide-equal", help="certify X == Y by eigenspace peeling")
    common(sp)
    sp.add_argument("--f", required=True)
    sp.add_argument("--dir", default="concave-le", dest="direction",
                    choices=("concave-le", "convex-ge"))
    sp.add_argument("--tau-eq", type=_positive, default=None)

    sp = sub.add_parser("sandwich", help="composed sandwich hypothesis and kernel match")
    common(sp)
    sp.add_argument("--f", default="sqrt")
    sp.add_argument("--g", default="sqrt")

    sp = sub.add_parser("discretize", help="slice-by-slice bound audit over n")
    common(sp)
    sp.add_argument("--f", default="sqrt")
    sp.add_argument("--g", default="sqrt")
    sp.add_argument("--a", type=float, required=True)
    sp.add_argument("--b", type=float, required=True)
    grp = sp.add_mutually_exclusive_group(required=True)
    grp.add_argument("--n", type=int)
    grp.add_argument("--n-list", type=_int_list)

    sp = sub.add_parser("remark36", help="second-order ratio near 0 and the 2 sqrt(lam X) - lam bound")
    common(sp, matrices=False)
    sp.add_argument("--t", type=_positive, default=1.0)
    sp.add_argument("--lambdas", type=_float_list, default=[1e-2, 1e-4, 1e-6, 1e-8])
    sp.add_argument("--X", dest="matrix", help="matrix file for the lower-bound diagnostic")
    sp.add_argument("--lam", type=_positive, default=None)

    sp = sub.add_parser("fuzz", help="seeded method-agreement and contrapositive campaign")
    common(sp, matrices=False)
    sp.add_argument("--count", type=int, default=200)
    sp.add_argument("--dims", type=_dims, default=(2, 6))
    sp.add_argument("--spectrum", type=_float_list, default=[0.5, 10.0])
    sp.add_argument("--restarts", type=int, default=64)
    sp.add_argument("--case-dir", default="fuzz-cases",
                    help="where discrepancy cases are written")
    return p


def _emit(args, text: str) -> None:
    if not text.endswith("\n"):
        text += "\n"
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)


def _report(args, body: dict) -> dict:
    return {"version": __version__, "command": args.command, "seed": args.seed, **body}


def _load_pair(args):
    X, Y = load_matrix(args.X), load_matrix(args.Y)
    if X.shape != Y.shape:
        raise UsageError(f"dimension mismatch: {args.X} is {X.shape[0]}, {args.Y} is {Y.shape[0]}")
    return X, Y


def _verdict_lines(v) -> list[str]:
    head = f"[{v.ordering or '-'}] {v.method} {v.function}: {'holds' if v.holds else 'VIOLATED'}"
    lines = [f"{head}  margin={v.margin:.6g}  tol={v.tolerance:.3g}"]
    if v.witness is not None:
        vec = ", ".join(f"{z.real:.6g}{z.imag:+.6g}j" for z in v.witness)
        lines.append(f"    witness xi = ({vec})")
        lines.append(f"    <h(A)xi,xi> = {v.lhs:.17g}  >  h(<Bxi,xi>) = {v.rhs:.17g}")
    return lines


def cmd_check(args) -> int:
    X, Y = _load_pair(args)
    f = parse(args.f)
    if args.one_sided:
        h = normalize_direction(f, args.direction)
        if args.method == "tangent":
            v = check_relation_tangent(h, X, Y)
        else:
            v = check_relation_sphere(h, X, Y, restarts=args.restarts, seed=args.seed)
        v.ordering = "X,Y"
        verdicts = [v]
    else:
        verdicts = list(dual_relation_check(f, X, Y, args.direction, method=args.method,
                                            restarts=args.restarts, seed=args.seed))
    holds = all(v.holds for v in verdicts)
    body = _report(args, {"function": args.f, "direction": args.direction,
                          "holds": holds, "verdicts": [v.to_dict() for v in verdicts]})
    if args.format == "pretty":
        lines = [line for v in verdicts for line in _verdict_lines(v)]
        _emit(args, "\n".join(lines) + "\n" + dumps(body))
    else:
        _emit(args, dumps(body))
    return EXIT_OK if holds else EXIT_VIOLATED


def cmd_decide_equal(args) -> int:
    X, Y = _load_pair(args)
    trace = decide_equal(parse(args.f), X, Y, args.direction, tau_eq=args.tau_eq)
    body = _report(args, {"trace": trace.to_dict()})
    if args.format == "pretty":
        lines = [f"conclusion: {trace.conclusion}", "level  rank  ||f(X)||       ||f(Y)||       "
                 "norm_gap    comm        fact        eq          status"]
        for s in trace.steps:
            lines.append(f"{s.level:5d}  {s.Q.rank:4d}  {s.norms[0]:<13.6g}  {s.norms[1]:<13.6g}  "
                         f"{s.norm_gap:<10.3g}  {s.commutation_residual:<10.3g}  "
                         f"{s.factorization_residual:<10.3g}  {s.equality_residual:<10.3g}  {s.status}")
        if trace.verdict is not None:
            lines += _verdict_lines(trace.verdict)
        _emit(args, "\n".join(lines) + "\n" + dumps(body))
    else:
        _emit(args, dumps(body))
    if trace.conclusion == EQUAL:
        return EXIT_OK
    if trace.conclusion == PREMISE_VIOLATED:
        return EXIT_VIOLATED
    return EXIT_INCONCLUSIVE


def cmd_sandwich(args) -> int:
    X, Y = _load_pair(args)
    f, g = parse(args.f), parse(args.g)
    left, right = check_sandwich(f, g, X, Y)
    km = kernel_match(f, g, X, Y)
    holds = left.holds and right.holds
    body = _report(args, {"f": f.name, "g": g.name, "holds": holds,
                          "left": left.to_dict(), "right": right.to_dict(), "kernel_match": km})
    if args.format == "pretty":
        lines = _verdict_lines(left) + _verdict_lines(right) + [f"kernel match: {km}"]
        _emit(args, "\n".join(lines) + "\n" + dumps(body))
    else:
        _emit(args, dumps(body))
    return EXIT_OK if holds else EXIT_VIOLATED


def cmd_discretize(args) -> int:
    if args.a <= 0:
        raise UsageError(A_ZERO_MESSAGE)
    X, Y = _load_pair(args)
    f, g = parse(args.f), parse(args.g)
    nx, ny = np.linalg.norm(X, 2), np.linalg.norm(Y, 2)
    if not (nx < args.b and ny < args.b):
        raise UsageError(f"need ||X|| < b and ||Y|| < b; got ||X||={nx:.17g}, "
                         f"||Y||={ny:.17g}, b={args.b:.17g}")
    ns = args.n_list if args.n_list is not None else [args.n]
    reports = sweep(f, g, X, Y, args.a, args.b, ns)
    ok = all(r.passed for r in reports)
    if args.format == "csv":
        _emit(args, to_csv(CSV_COLUMNS, [r.csv_row() for r in reports]))
    else:
        body = _report(args, {"f": f.name, "g": g.name, "a": args.a, "b": args.b,
                              "pass": ok, "reports": [r.to_dict() for r in reports]})
        _emit(args, dumps(body))
    return EXIT_OK if ok else EXIT_INCONCLUSIVE


def cmd_near_zero(args) -> int:
    rows = [(lam, args.t, near_zero_ratio(args.t, lam)) for lam in args.lambdas]
    diag = None
    if args.matrix:
        if args.lam is None:
            raise UsageError("--lam is required with --X")
        M, gap = root_lower_bound(load_matrix(args.matrix), args.lam)
        diag = {"lambda": args.lam, "psd_gap": gap, "matrix": matrix_to_doc(M)}
    if args.format == "csv":
        _emit(args, to_csv(("lambda", "t", "ratio"), rows))
    else:
        body = _report(args, {"ratios": [{"lambda": l, "t": t, "ratio": r} for l, t, r in rows]})
        if diag is not None:
            body["lower_bound"] = diag
        _emit(args, dumps(body))
    return EXIT_OK


def cmd_fuzz(args) -> int:
    if len(args.spectrum) != 2 or not args.spectrum[0] < args.spectrum[1]:
        raise UsageError("--spectrum needs two increasing numbers, e.g. 0.5,10")
    summary, bad = run_campaign(args.count, args.seed, args.dims, tuple(args.spectrum),
                                args.restarts)
    if bad:
        case_dir = Path(args.case_dir)
        case_dir.mkdir(parents=True, exist_ok=True)
        files = []
        for case in bad:
            stem = f"{case['suite']}-seed{args.seed}-{case['index']}"
            paths = {}
            for name, M in case["matrices"].items():
                path = case_dir / f"{stem}-{name}.json"
                save_matrix(path, M)
                paths[name] = str(path)
            first, second = paths.values()
            reproduce = (f"jensen-order check --f {case['function']} --dir {case['direction']} "
                         f"--method sphere --seed {args.seed} {first} {second}")
            (case_dir / f"{stem}.json").write_text(dumps({
                "version": __version__, "seed": args.seed, "suite": case["suite"],
                "index": case["index"], "function": case["function"],
                "direction": case["direction"], "matrices": paths, "reproduce": reproduce,
            }) + "\n")
            files.append(str(case_dir / f"{stem}.json"))
        summary["case_files"] = files
    body = _report(args, summary)
    _emit(args, dumps(body))
    return EXIT_OK if not bad else EXIT_VIOLATED


COMMANDS = {
    "check": cmd_check,
    "decide-equal": cmd_decide_equal,
    "sandwich": cmd_sandwich,
    "discretize": cmd_discretize,
    "remark36": cmd_near_zero,
    "fuzz": cmd_fuzz,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_ERROR
    try:
        return COMMANDS[args.command](args)
    except MatrixFormatError as exc:
        print(f"error: malformed matrix: {exc}", file=sys.stderr)
    except FunctionSpecError as exc:
        print(f"error: bad function spec: {exc}", file=sys.stderr)
    except UnsupportedCompositionError as exc:
        print(f"error: unsupported composition: {exc}", file=sys.stderr)
    except DomainError as exc:
        print(f"error: domain mismatch: {exc}", file=sys.stderr)
    except (UsageError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
    return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
