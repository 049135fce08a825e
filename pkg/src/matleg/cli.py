"""Command-line front end over JSON files.

Subcommands: eval, grad, dual, verify, solve.  Family and problem
descriptors are accepted inline (a JSON object string) or as file paths;
matrices are JSON files.  Exit codes: 0 success, 1 check or solve
failure, 2 usage/parse error, 3 domain error.  Identical argv and files
produce byte-identical output.
"""
from __future__ import annotations

import argparse
import json
import os
import sys

from . import duality_engine as engine
from . import families, variational
from .errors import (
    ConvergenceError,
    DimensionError,
    DomainError,
    MatlegError,
    NotInvertibleError,
    ParseError,
    SamplingError,
)
from .matrix_core import Matrix

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2
EXIT_DOMAIN = 3


def _load_json_arg(value: str, what: str) -> dict:
    """Inline JSON object or path to a JSON file."""
    text = value
    if not value.lstrip().startswith("{"):
        if not os.path.exists(value):
            raise ParseError(f"{what} file not found: {value}")
        with open(value, "r", encoding="utf-8") as fh:
            text = fh.read()
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(f"malformed {what} JSON: {e}") from None
    if not isinstance(obj, dict):
        raise ParseError(f"{what} JSON must be an object")
    return obj


def _dump(obj) -> str:
    # report/result files: indented, insertion-ordered keys, diffable
    return json.dumps(obj, indent=2) + "\n"


def _print_json(obj) -> None:
    sys.stdout.write(json.dumps(obj) + "\n")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="matleg",
        description="Closed-form duality for determinant and cofactor functionals",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_eval = sub.add_parser("eval", help="evaluate a family at a matrix")
    p_eval.add_argument("--family", required=True, help="family JSON (inline or path)")
    p_eval.add_argument("--matrix", required=True, help="matrix JSON (inline or path)")

    p_grad = sub.add_parser("grad", help="gradient of a family at a matrix")
    p_grad.add_argument("--family", required=True)
    p_grad.add_argument("--matrix", required=True)

    p_dual = sub.add_parser("dual", help="print the dual family descriptor")
    p_dual.add_argument("--family", required=True)

    p_verify = sub.add_parser("verify", help="run the duality verification suite")
    p_verify.add_argument("--family", required=True)
    p_verify.add_argument("--seed", type=int, default=0)
    p_verify.add_argument("--samples", type=int, default=200)
    p_verify.add_argument("--det-lo", type=float, default=0.1)
    p_verify.add_argument("--det-hi", type=float, default=10.0)
    p_verify.add_argument("--sign-mix", type=float, default=0.5)
    p_verify.add_argument("--report", required=True, help="path of the report JSON to write")
    p_verify.add_argument("--tol-roundtrip", type=float, default=engine.DEFAULT_TOL_ROUNDTRIP)
    p_verify.add_argument(
        "--tol-grad-inverse", type=float, default=engine.DEFAULT_TOL_GRADIENT_INVERSE
    )
    p_verify.add_argument("--tol-involution", type=float, default=engine.DEFAULT_TOL_INVOLUTION)
    p_verify.add_argument("--tol-fd", type=float, default=engine.DEFAULT_TOL_FD)

    p_solve = sub.add_parser("solve", help="solve the critical-point problem")
    p_solve.add_argument("--problem", required=True, help="problem JSON (inline or path)")
    p_solve.add_argument("--out", required=True, help="path of the result JSON to write")
    p_solve.add_argument("--tol", type=float, default=None)
    p_solve.add_argument("--max-iter", type=int, default=variational.DEFAULT_MAX_ITER)

    return parser


def _cmd_eval(args) -> int:
    fam = families.parse_family(_load_json_arg(args.family, "family"))
    x = Matrix.from_json_dict(_load_json_arg(args.matrix, "matrix"))
    _print_json(families.evaluate(fam, x))
    return EXIT_OK


def _cmd_grad(args) -> int:
    fam = families.parse_family(_load_json_arg(args.family, "family"))
    x = Matrix.from_json_dict(_load_json_arg(args.matrix, "matrix"))
    _print_json(families.gradient(fam, x).to_json_dict())
    return EXIT_OK


def _cmd_dual(args) -> int:
    fam = families.parse_family(_load_json_arg(args.family, "family"))
    _print_json(families.dual_descriptor_dict(fam))
    return EXIT_OK


def _cmd_verify(args) -> int:
    fam = families.parse_family(_load_json_arg(args.family, "family"))
    spec = engine.SampleSpec(
        family=fam,
        count=args.samples,
        seed=args.seed,
        det_window=(args.det_lo, args.det_hi),
        sign_mix=args.sign_mix,
    )
    report = engine.run_suite(
        spec,
        tol_roundtrip=args.tol_roundtrip,
        tol_gradient_inverse=args.tol_grad_inverse,
        tol_involution=args.tol_involution,
        tol_fd=args.tol_fd,
    )
    with open(args.report, "w", encoding="utf-8") as fh:
        fh.write(_dump(report.to_json_dict()))
    _print_json({"overall_pass": report.overall_pass, "report": args.report})
    return EXIT_OK if report.overall_pass else EXIT_FAILED


def _cmd_solve(args) -> int:
    prob = variational.Problem.from_json_dict(_load_json_arg(args.problem, "problem"))
    tol = variational.default_tolerance(prob) if args.tol is None else args.tol
    try:
        if prob.p < 2.0:
            result = variational.solve_coercive(prob, tol=tol, max_iter=args.max_iter)
        else:
            result = variational.solve_dual(prob, tol=tol, max_iter=args.max_iter)
    except ConvergenceError as e:
        sys.stderr.write(f"error: {e}\n")
        return EXIT_FAILED
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write(_dump(result.to_json_dict()))
    _print_json(
        {
            "converged": result.converged,
            "primal_residual": result.primal_residual,
            "result": args.out,
        }
    )
    return EXIT_OK if result.converged else EXIT_FAILED


_COMMANDS = {
    "eval": _cmd_eval,
    "grad": _cmd_grad,
    "dual": _cmd_dual,
    "verify": _cmd_verify,
    "solve": _cmd_solve,
}


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code not in (0, None) else EXIT_OK
    try:
        return _COMMANDS[args.command](args)
    except ParseError as e:
        sys.stderr.write(f"error: {e}\n")
        return EXIT_USAGE
    except (DomainError, DimensionError, NotInvertibleError) as e:
        sys.stderr.write(f"error: {e}\n")
        return EXIT_DOMAIN
    except (SamplingError, MatlegError) as e:
        sys.stderr.write(f"error: {e}\n")
        return EXIT_FAILED
    except OSError as e:
        sys.stderr.write(f"error: {e}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
