"""``curvlab`` command line.

Exit codes: 0 the condition holds, 1 it is violated, 2 usage or data error,
3 the result sits inside the tolerance band (``check --condition k-pos``).
``certify`` exits 0 unless a frame below the band was found.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import __version__
from .conditions import TAGS, ConditionExpr, certify_min, k_positivity
from .curvature import first_kind_spectrum, second_kind_spectrum
from .harness import SUITES, Config, run_all
from .io import TensorFormatError, dumps, format_float, read_tensor, tensor_to_dict, write_tensor
from .models import ModelSpec, product

EXIT_OK, EXIT_VIOLATED, EXIT_USAGE, EXIT_BOUNDARY = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _default_seed() -> int:
    raw = os.environ.get("CURVLAB_SEED")
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"CURVLAB_SEED must be an integer, got {raw!r}") from None


def _emit(args, payload: dict, text: str) -> None:
    print(dumps(payload) if args.json else text)


def _load(args):
    return read_tensor(args.tensor, project=args.project)


def _floats(values) -> str:
    return " ".join(format_float(v) for v in values)


# ---------------------------------------------------------------------------


def cmd_model(args) -> int:
    if args.kind == "product":
        if not (args.left and args.right):
            raise UsageError("model product needs --left and --right tensor files")
        left = read_tensor(args.left, project=args.project)
        right = read_tensor(args.right, project=args.project)
        R = product(left, right)
    else:
        params = {}
        for name in ("dim", "kappa", "m", "seed", "scale", "sphere_weight"):
            value = getattr(args, name)
            if value is not None:
                params[name] = value
        R = ModelSpec(args.kind, params).build()
    if args.out:
        try:
            write_tensor(args.out, R)
        except OSError as exc:
            raise UsageError(f"cannot write {args.out}: {exc.strerror}") from None
        _emit(args, {"written": str(args.out), "dim": R.n}, f"wrote {args.out} (dim {R.n})")
    else:
        print(dumps(tensor_to_dict(R)))
    return EXIT_OK


def cmd_spectrum(args) -> int:
    R = _load(args)
    if args.operator == "first":
        spec = first_kind_spectrum(R)
    else:
        spec = second_kind_spectrum(R, restricted=args.operator == "second-restricted")
    values = [float(v) for v in spec.eigenvalues]
    payload = {"operator": args.operator, "dim": R.n, "eigenvalues": values}
    if args.vectors:
        payload["eigenvectors"] = spec.eigenvectors.T.tolist()
    clusters = "\n".join(f"  {format_float(m)} x{k}" for m, k in spec.clusters())
    _emit(args, payload, f"{args.operator} eigenvalues (ascending):\n{_floats(values)}\nclusters:\n{clusters}")
    return EXIT_OK


def cmd_check(args) -> int:
    R = _load(args)
    kind = "first" if args.operator == "first" else "second"
    if args.operator == "second-full":
        raise UsageError("check supports --operator first or second-restricted")
    try:
        res = k_positivity(R, kind, args.k, tol=args.tol)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if args.condition == "k-pos":
        code = {"positive": EXIT_OK, "nonnegative": EXIT_BOUNDARY, "indefinite": EXIT_VIOLATED}[res.status]
    else:
        # A sum inside the band is nonnegative up to round-off: the condition holds.
        code = EXIT_VIOLATED if res.status == "indefinite" else EXIT_OK
    holds = {EXIT_OK: "holds", EXIT_VIOLATED: "violated", EXIT_BOUNDARY: "boundary"}[code]
    payload = {
        "condition": args.condition,
        "operator": args.operator,
        "k": args.k,
        "result": holds,
        "classification": res.status,
        "margin": res.smallest_sum,
        "tol": res.tol,
    }
    _emit(args, payload, f"{args.condition} k={args.k}: {holds} (margin {format_float(res.smallest_sum)})")
    return code


def cmd_certify(args) -> int:
    if args.expr == "beta" and (args.beta is None or not args.beta > 1.0):
        raise UsageError("--expr beta needs --beta > 1")
    if args.samples < 1:
        raise UsageError("--samples must be >= 1")
    R = _load(args)
    if R.n < 4:
        raise UsageError("frame conditions need a tensor of dimension >= 4")
    expr = ConditionExpr(args.expr, beta=args.beta if args.expr == "beta" else None)
    cert = certify_min(R, expr, args.samples, args.seed)
    payload = cert.to_dict()
    code = EXIT_VIOLATED if cert.status == "violation" else EXIT_OK
    text = (
        f"{args.expr}: best value {format_float(cert.best_value)} over {cert.samples} frames "
        f"({cert.status})"
    )
    _emit(args, payload, text)
    return code


def cmd_verify(args) -> int:
    suites = list(SUITES) if args.suite == "all" else [args.suite]
    if args.suite not in SUITES and args.suite != "all":
        raise UsageError(f"unknown suite {args.suite!r}; expected all or one of {', '.join(SUITES)}")
    cfg = Config(suites=suites, seed=args.seed, threads=args.threads)
    if args.trials is not None:
        if args.trials < 1:
            raise UsageError("--trials must be >= 1")
        cfg.trials = args.trials
    if args.budget is not None:
        if args.budget < 1000:
            raise UsageError("--budget must be >= 1000")
        cfg.budget = args.budget
    report = run_all(cfg)
    payload = report.to_dict()
    if args.out:
        try:
            Path(args.out).write_text(dumps(payload) + "\n")
        except OSError as exc:
            raise UsageError(f"cannot write {args.out}: {exc.strerror}") from None
    if args.json:
        print(dumps(payload))
    else:
        lines = [f"{'suite':<10} {'status':<20} {'trials':>7} {'passes':>7} {'exempt':>7}"]
        for s in report.suites:
            lines.append(f"{s.id:<10} {s.status:<20} {s.trials:>7} {s.passes:>7} {s.exempt:>7}")
            for h in s.highlights:
                lines.append(f"    {h['label']}: {json.dumps(h['measured'])}")
        lines.append(f"overall: {report.status}")
        print("\n".join(lines))
    return EXIT_OK if report.status == "pass" else EXIT_VIOLATED


def cmd_info(args) -> int:
    payload = {
        "version": __version__,
        "format": "curvlab-tensor/1",
        "suites": list(SUITES),
        "conditions": list(TAGS),
        "exit_codes": {"0": "holds", "1": "violated", "2": "usage or data error", "3": "boundary"},
    }
    text = (
        f"curvlab {__version__}\nsuites: {', '.join(SUITES)}\nconditions: {', '.join(TAGS)}\n"
        "exit codes: 0 holds, 1 violated, 2 usage or data error, 3 boundary"
    )
    _emit(args, payload, text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument("--project", action="store_true", help="Bianchi-project tensors that fail validation")

    parser = _Parser(prog="curvlab", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"curvlab {__version__}")
    sub = parser.add_subparsers(dest="verb", required=True, parser_class=_Parser)

    p = sub.add_parser("model", parents=[common], help="build a model tensor")
    p.add_argument("kind", choices=["sphere", "flat", "cylinder", "cpn", "product", "random"])
    p.add_argument("--dim", type=int)
    p.add_argument("--kappa", type=float)
    p.add_argument("--m", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--scale", type=float)
    p.add_argument("--sphere-weight", dest="sphere_weight", type=float)
    p.add_argument("--left")
    p.add_argument("--right")
    p.add_argument("--out")
    p.set_defaults(func=cmd_model)

    p = sub.add_parser("spectrum", parents=[common], help="eigenvalues of a curvature operator")
    p.add_argument("tensor")
    p.add_argument("--operator", choices=["first", "second-full", "second-restricted"], default="second-restricted")
    p.add_argument("--vectors", action="store_true", help="include eigenvectors")
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("check", parents=[common], help="k-positivity of a curvature operator")
    p.add_argument("tensor")
    p.add_argument("--condition", choices=["k-pos", "k-nonneg"], required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--operator", choices=["first", "second-full", "second-restricted"], default="second-restricted")
    p.add_argument("--tol", type=float)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("certify", parents=[common], help="search frames for a violation")
    p.add_argument("tensor")
    p.add_argument("--expr", choices=list(TAGS), required=True)
    p.add_argument("--beta", type=float)
    p.add_argument("--samples", type=int, default=5000)
    p.add_argument("--seed", type=int)
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("verify", parents=[common], help="run verification suites")
    p.add_argument("--suite", default="all")
    p.add_argument("--seed", type=int)
    p.add_argument("--trials", type=int)
    p.add_argument("--budget", type=int)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--out")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("info", parents=[common], help="version and conventions")
    p.set_defaults(func=cmd_info)
    return parser


def main(argv: list[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        if getattr(args, "seed", "absent") is None and args.verb in ("certify", "verify"):
            args.seed = _default_seed()
        if getattr(args, "threads", 1) < 1:
            raise UsageError("--threads must be >= 1")
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except TensorFormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        if exc.report:
            print(dumps(exc.report), file=sys.stderr)
        return EXIT_USAGE
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
