"""Command-line front end.

Exit status is 0 on success, 1 when the mathematics says no (no
factorization, no stabilizing solution, failed validation) and 2 for
unusable input.
"""

from __future__ import annotations

import argparse
import csv
import io
import os
import sys
from dataclasses import replace

from . import __version__
from .core import (
    DEFAULT_TOL,
    DimensionError,
    InvalidRepresentationError,
    SingularMatrixError,
    Tolerances,
    WienerHopfError,
)
from .factorization import (
    FactorizationError,
    dichot_left_factors,
    dichot_right_factors,
    left_factors,
    right_factors,
    verify_factorization,
)
from .generate import instance_from_seed
from .jsonio import InputFormatError, dumps, encode_representation, load_representation, report
from .leftright import LeftRightPreconditionError, left_exists_given_right
from .representation import (
    DichotomousRealization,
    StableRepresentation,
    dichotomous_to_stable,
    stable_to_dichotomous,
    validate_dichotomous,
    validate_stable,
)
from .riccati import (
    METHODS,
    NoStabilizingSolution,
    r0_invertible,
    solve_left_stabilizing,
    solve_right_stabilizing,
)
from .solset import scalar_solution_sets
from .subspaces import matching_left, matching_right
from .toeplitz import toeplitz_invertibility_profile

EXIT_OK, EXIT_NEGATIVE, EXIT_INPUT = 0, 1, 2
ENV_RESIDUAL = "WH_TOL_RESIDUAL"


class UsageError(Exception):
    """Bad command-line values; maps to exit status 2."""


def _positive_float(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not value > 0:
        raise argparse.ArgumentTypeError(f"must be positive: {text!r}")
    return value


def _int_list(text: str) -> list[int]:
    try:
        values = [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None
    if not values or any(v < 1 for v in values):
        raise argparse.ArgumentTypeError("sizes must be positive integers")
    return values


def _dims(text: str) -> tuple[int, int, int]:
    try:
        parts = tuple(int(t) for t in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected p-,p+,m, got {text!r}") from None
    if len(parts) != 3 or any(v < 0 for v in parts) or parts[2] < 1:
        raise argparse.ArgumentTypeError("dims must be three integers p-,p+,m with m >= 1")
    return parts  # type: ignore[return-value]


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False, allow_abbrev=False)
    tols = common.add_argument_group("tolerances")
    tols.add_argument("--spectral-margin", type=_positive_float)
    tols.add_argument("--inversion-rcond", type=_positive_float)
    tols.add_argument("--residual-tol", type=_positive_float,
                      help=f"overrides ${ENV_RESIDUAL}")
    tols.add_argument("--circle-samples", type=int)
    common.add_argument("-o", "--output", help="write the report here instead of stdout")

    parser = argparse.ArgumentParser(prog="wienerhopf", allow_abbrev=False,
                                     description="Canonical Wiener-Hopf factorization via Riccati equations.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def add(name, help_text):
        return sub.add_parser(name, parents=[common], help=help_text, allow_abbrev=False)

    p = add("validate", "check the hypotheses of a representation file")
    p.add_argument("input")

    p = add("factorize", "build and verify a canonical factorization")
    p.add_argument("input")
    p.add_argument("--side", choices=("right", "left"), default="right")
    p.add_argument("--route", choices=("riccati", "subspace"), default="riccati")
    p.add_argument("--method", choices=METHODS, default="auto",
                   help="Riccati solver (riccati route only)")

    p = add("leftright", "decide left factorization from the right one")
    p.add_argument("input")
    p.add_argument("--method", choices=METHODS, default="auto")

    p = add("solset", "enumerate Riccati solutions of a scalar-state instance")
    p.add_argument("input")

    p = add("toeplitz-profile", "condition of finite Toeplitz sections (CSV)")
    p.add_argument("input")
    p.add_argument("--sizes", type=_int_list, default=[8, 16, 32, 64, 128])

    p = add("gen", "emit a seeded random stable representation")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--dims", type=_dims, default=(2, 2, 2), help="p-,p+,m")
    p.add_argument("--coupling", type=_positive_float, default=0.3)
    return parser


def tolerances_from_args(args, environ=None) -> Tolerances:
    environ = os.environ if environ is None else environ
    tol = DEFAULT_TOL
    env = environ.get(ENV_RESIDUAL)
    if env:
        try:
            tol = replace(tol, residual_tol=float(env))
        except ValueError as exc:
            raise UsageError(f"{ENV_RESIDUAL}: {exc}") from exc
    overrides = {k: getattr(args, k) for k in ("spectral_margin", "inversion_rcond", "residual_tol",
                                               "circle_samples") if getattr(args, k, None) is not None}
    try:
        return replace(tol, **overrides)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _as_stable(obj) -> StableRepresentation:
    if isinstance(obj, StableRepresentation):
        return obj
    return dichotomous_to_stable(obj)


def _negative(kind: str, reason: str, **extra) -> tuple[int, dict]:
    body = {"ok": False, "reason": reason}
    body.update(extra)
    return EXIT_NEGATIVE, report(kind, body)


def cmd_validate(args, tol: Tolerances):
    obj = load_representation(args.input)
    if isinstance(obj, StableRepresentation):
        verdict = validate_stable(obj, tol)
    else:
        verdict = validate_dichotomous(obj, tol)
    body = {"ok": verdict.ok, "kind": "stable" if isinstance(obj, StableRepresentation) else "dichotomous",
            "verdict": verdict}
    return (EXIT_OK if verdict.ok else EXIT_NEGATIVE), report("validate", body)


def _factorize_riccati(obj, side, method, tol):
    rep = _as_stable(obj)
    solve = solve_right_stabilizing if side == "right" else solve_left_stabilizing
    cert = solve(rep, method, tol)
    pair = (right_factors if side == "right" else left_factors)(rep, cert, tol)
    return {"certificate": cert}, pair, rep


def _factorize_subspace(obj, side, tol):
    if isinstance(obj, DichotomousRealization):
        real = obj
    else:
        v = validate_stable(obj, tol)
        if not v.ok:
            raise InvalidRepresentationError("; ".join(v.notes))
        try:
            real = stable_to_dichotomous(obj, tol)
        except SingularMatrixError as exc:
            raise NoStabilizingSolution(f"{exc}: subspace route unavailable") from exc
    match = (matching_right if side == "right" else matching_left)(real, tol)
    if not match.exists:
        raise NoStabilizingSolution(f"no {side} matching decomposition: " + "; ".join(match.notes))
    pair = (dichot_right_factors if side == "right" else dichot_left_factors)(real, match, tol=tol)
    return {"matching": match}, pair, obj


def cmd_factorize(args, tol: Tolerances):
    obj = load_representation(args.input)
    try:
        if args.route == "riccati":
            head, pair, target = _factorize_riccati(obj, args.side, args.method, tol)
        else:
            head, pair, target = _factorize_subspace(obj, args.side, tol)
    except NoStabilizingSolution as exc:
        return _negative("factorize", str(exc), side=args.side, route=args.route, verdict=exc.verdict)
    except FactorizationError as exc:
        return _negative("factorize", str(exc), side=args.side, route=args.route)
    verdict = verify_factorization(target, pair, tol)
    body = {"ok": verdict.ok, "side": args.side, "route": args.route}
    body.update(head)
    body["factors"] = pair
    body["verdict"] = verdict
    return (EXIT_OK if verdict.ok else EXIT_NEGATIVE), report("factorize", body)


def cmd_leftright(args, tol: Tolerances):
    rep = _as_stable(load_representation(args.input))
    v = validate_stable(rep, tol)
    if not v.ok:
        raise InvalidRepresentationError("; ".join(v.notes))
    if not r0_invertible(rep, tol):
        return _negative("leftright", "R(0) not invertible")
    try:
        cert = solve_right_stabilizing(rep, args.method, tol)
    except NoStabilizingSolution as exc:
        return _negative("leftright", f"no right factorization: {exc}", verdict=exc.verdict)
    try:
        result = left_exists_given_right(rep, cert, tol)
    except LeftRightPreconditionError as exc:
        return _negative("leftright", str(exc))
    body = {"ok": result.left_exists, "left_exists": result.left_exists, "certificate": cert,
            "result": result}
    return (EXIT_OK if result.left_exists else EXIT_NEGATIVE), report("leftright", body)


def cmd_solset(args, tol: Tolerances):
    rep = _as_stable(load_representation(args.input))
    sets = scalar_solution_sets(rep, tol)
    return EXIT_OK, report("solset", {"ok": True, "sets": sets})


def cmd_toeplitz_profile(args, tol: Tolerances):
    rep = _as_stable(load_representation(args.input))
    v = validate_stable(rep, tol)
    if not v.ok:
        raise InvalidRepresentationError("; ".join(v.notes))
    rows = toeplitz_invertibility_profile(rep, args.sizes)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["N", "rcond", "q_delta"])
    for row in rows:
        writer.writerow([row.N, format(row.rcond, ".17g"),
                         "" if row.q_delta is None else format(row.q_delta, ".17g")])
    return EXIT_OK, buf.getvalue()


def cmd_gen(args, tol: Tolerances):
    rep = instance_from_seed(args.seed, args.dims, args.coupling)
    return EXIT_OK, encode_representation(rep)


COMMANDS = {
    "validate": cmd_validate,
    "factorize": cmd_factorize,
    "leftright": cmd_leftright,
    "solset": cmd_solset,
    "toeplitz-profile": cmd_toeplitz_profile,
    "gen": cmd_gen,
}


def _emit(payload, path: str | None) -> None:
    text = payload if isinstance(payload, str) else dumps(payload) + "\n"
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0) and EXIT_INPUT
    try:
        tol = tolerances_from_args(args)
        status, payload = COMMANDS[args.command](args, tol)
    except (UsageError, InputFormatError, DimensionError, InvalidRepresentationError, OSError) as exc:
        print(f"wienerhopf: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except WienerHopfError as exc:
        status, payload = _negative(args.command, str(exc))
    _emit(payload, args.output)
    return status


if __name__ == "__main__":
    sys.exit(main())
