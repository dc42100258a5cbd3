"""Command-line interface.

Exit codes:

    0  Applicable or PriorConfirmed (``check``: all identities hold)
    1  malformed input, out-of-range flags, rank-deficient prior
    2  InsufficientData
    3  Infeasible targets (or the Maxent solve did not converge)
    4  ``fourqubit`` oracle/numeric mismatch, ``check`` failure
"""

from __future__ import annotations

import argparse
import logging
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

from . import fourqubit
from .checks import run_checks
from .evidence import EvidenceInput, EvidenceStatus, run_evidence
from .exceptions import Infeasible, MaxIterations, OutOfRange, RankDeficient, TomographyError
from .fileformats import (
    FormatError,
    dataset_to_doc,
    parse_dataset,
    parse_density_matrix,
    parse_observables,
    read_json,
    report_to_doc,
    write_json,
)
from .simulate import simulate_dataset

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_INSUFFICIENT = 2
EXIT_INFEASIBLE = 3
EXIT_MISMATCH = 4

STATUS_EXIT = {
    EvidenceStatus.APPLICABLE: EXIT_OK,
    EvidenceStatus.PRIOR_CONFIRMED: EXIT_OK,
    EvidenceStatus.INSUFFICIENT_DATA: EXIT_INSUFFICIENT,
}

# Rounded values quoted for the default four-qubit example.
ROUNDED_REFERENCE = {
    "lambda_sigma": 0.18,
    "lambda_data": 0.235,
    "Z_sigma": 10,
    "Z_data": 8.85,
    "S_data": 0.005,
    "N_min": 5000,
    "alpha0": 10000,
    "lambda_e": 0.208,
    "x_e": 0.66,
    "J2_e": 2.19,
    "c_e": -0.0226,
}

log = logging.getLogger("evidence_tomography")


@dataclass
class RunConfig:
    command: str
    inputs: dict = field(default_factory=dict)
    output: Path | None = None
    criterion_threshold: float = 10.0
    prior_tol: float = 1e-12
    seed: int | None = None
    verbosity: int = 0


def _fmt(x) -> str:
    if isinstance(x, float):
        return f"{x:.17g}" if math.isfinite(x) else str(x)
    return str(x)


def run_estimate(cfg: RunConfig) -> int:
    try:
        prior = parse_density_matrix(read_json(cfg.inputs["prior"]), "prior")
        obs = parse_observables(read_json(cfg.inputs["observables"]), "observables")
        data = parse_dataset(read_json(cfg.inputs["data"]), obs, "data")
        inp = EvidenceInput(prior, obs, data.means, data.N)
    except (FormatError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    try:
        report = run_evidence(inp, cfg.criterion_threshold, cfg.prior_tol)
    except RankDeficient as exc:
        print(f"error: prior must be full rank: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (Infeasible, MaxIterations) as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    write_json(cfg.output, report_to_doc(report, obs))
    sc = report.scalars
    flags = "".join(f" [{f.value}]" for f in report.flags)
    print(f"status     {report.status.value}{flags}")
    for name in ("S_data", "N_min", "alpha0", "beta", "criterion"):
        print(f"{name:<10} {_fmt(getattr(sc, name))}")
    print(f"report written to {cfg.output}")
    return STATUS_EXIT[report.status]


def run_simulate(cfg: RunConfig) -> int:
    try:
        truth = parse_density_matrix(read_json(cfg.inputs["truth"]), "truth")
        obs = parse_observables(read_json(cfg.inputs["observables"]), "observables")
        if truth.dim != obs.dim:
            raise FormatError("truth and observables differ in dimension")
        n = cfg.inputs["N"]
        if n < 1:
            raise FormatError(f"-N must be positive, got {n}")
        ds = simulate_dataset(truth, obs, n, cfg.seed, truth.label)
    except (FormatError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    write_json(cfg.output, dataset_to_doc(ds))
    print(f"{len(ds.means)} means from N={ds.N} shots each written to {cfg.output}")
    return EXIT_OK


def run_fourqubit(cfg: RunConfig) -> int:
    c_prior, c_data, n = cfg.inputs["c_prior"], cfg.inputs["c_data"], cfg.inputs["N"]
    try:
        if n < 1:
            raise OutOfRange(f"N must be positive, got {n}")
        oracle = fourqubit.worked_example(c_prior, c_data, n, prior_tol=cfg.prior_tol)
        numeric, _ = fourqubit.numeric_example(
            c_prior, c_data, n, cfg.criterion_threshold, cfg.prior_tol
        )
    except OutOfRange as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except TomographyError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    defaults = (c_prior, c_data, n) == (-0.02, -0.025, 10_000)
    print(f"c_prior={c_prior} c_data={c_data} N={n} r={fourqubit.R_FULL}")
    head = f"{'quantity':<13}{'closed form':>26}{'dense 16x16':>26}{'rel. dev':>11}"
    print(head + ("   rounded ref." if defaults else ""))
    for name in fourqubit.NUMERIC_FIELDS:
        a, b = getattr(oracle, name), getattr(numeric, name)
        dev = fourqubit.relative_deviation(b, a)
        line = f"{name:<13}{_fmt(a):>26}{_fmt(b):>26}{dev:>11.2e}"
        if defaults and name in ROUNDED_REFERENCE:
            line += f"   {ROUNDED_REFERENCE[name]}"
        print(line)
    worst = fourqubit.max_relative_deviation(numeric, oracle)
    print(f"status       {oracle.status:>26}{numeric.status:>26}")
    print(f"max relative deviation {worst:.3e}")
    if worst > 1e-5 or oracle.status != numeric.status:
        print("closed form and dense pipeline disagree", file=sys.stderr)
        return EXIT_MISMATCH
    return EXIT_INSUFFICIENT if oracle.status == "InsufficientData" else EXIT_OK


def _parse_sweep(text):
    lo, sep, hi = text.partition("..")
    if not sep:
        raise argparse.ArgumentTypeError("expected a range like 2..16")
    lo, hi = int(lo), int(hi)
    if not 2 <= lo <= hi <= 64:
        raise argparse.ArgumentTypeError("dimension sweep must satisfy 2 <= a <= b <= 64")
    return range(lo, hi + 1)


def run_check(cfg: RunConfig) -> int:
    results = run_checks(
        dims=cfg.inputs.get("dims", (2, 4, 8, 16)),
        seed=cfg.seed or 0,
        beta_perturbation=cfg.inputs.get("beta_perturbation", 0.0),
    )
    width = max(len(r.name) for r in results)
    for r in results:
        mark = "PASS" if r.passed else "FAIL"
        print(f"{mark}  {r.name:<{width}}  deviation {r.deviation:.3e}  tolerance {r.tolerance:.0e}")
    return EXIT_OK if all(r.passed for r in results) else EXIT_MISMATCH


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="evidence-tomo",
        description="Evidence-procedure state estimation from incomplete tomographic data.",
    )
    p.add_argument("-v", "--verbose", action="count", default=0)
    sub = p.add_subparsers(dest="command", required=True)

    e = sub.add_parser("estimate", help="estimate a state from a prior and measured means")
    e.add_argument("--prior", required=True, type=Path)
    e.add_argument("--observables", required=True, type=Path)
    e.add_argument("--data", required=True, type=Path)
    e.add_argument("--out", required=True, type=Path)
    e.add_argument("--criterion-threshold", type=float, default=10.0)
    e.add_argument("--prior-tol", type=float, default=1e-12)

    s = sub.add_parser("simulate", help="simulate sample means from a known state")
    s.add_argument("--truth", required=True, type=Path)
    s.add_argument("--observables", required=True, type=Path)
    s.add_argument("-N", dest="N", required=True, type=int)
    s.add_argument("--seed", required=True, type=int)
    s.add_argument("--out", required=True, type=Path)

    f = sub.add_parser("fourqubit", help="four-qubit example, closed form against dense pipeline")
    f.add_argument("--c-prior", type=float, default=-0.02)
    f.add_argument("--c-data", type=float, default=-0.025)
    f.add_argument("-N", dest="N", type=int, default=10_000)
    f.add_argument("--criterion-threshold", type=float, default=10.0)
    f.add_argument("--prior-tol", type=float, default=1e-12)

    c = sub.add_parser("check", help="run the exact-identity suite")
    c.add_argument("--dim-sweep", type=_parse_sweep, default=None, metavar="A..B")
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--perturb-beta", type=float, default=0.0, help=argparse.SUPPRESS)
    return p


def config_from_args(args) -> RunConfig:
    cfg = RunConfig(args.command, verbosity=args.verbose)
    if args.command == "estimate":
        cfg.inputs = {"prior": args.prior, "observables": args.observables, "data": args.data}
        cfg.output = args.out
        cfg.criterion_threshold, cfg.prior_tol = args.criterion_threshold, args.prior_tol
    elif args.command == "simulate":
        cfg.inputs = {"truth": args.truth, "observables": args.observables, "N": args.N}
        cfg.output, cfg.seed = args.out, args.seed
    elif args.command == "fourqubit":
        cfg.inputs = {"c_prior": args.c_prior, "c_data": args.c_data, "N": args.N}
        cfg.criterion_threshold, cfg.prior_tol = args.criterion_threshold, args.prior_tol
    else:
        cfg.inputs = {"beta_perturbation": args.perturb_beta}
        if args.dim_sweep is not None:
            cfg.inputs["dims"] = args.dim_sweep
        cfg.seed = args.seed
    return cfg


COMMANDS = {
    "estimate": run_estimate,
    "simulate": run_simulate,
    "fourqubit": run_fourqubit,
    "check": run_check,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    logging.basicConfig(
        level=logging.WARNING - 10 * min(args.verbose, 2),
        format="%(levelname)s %(name)s: %(message)s",
    )
    cfg = config_from_args(args)
    return COMMANDS[cfg.command](cfg)


if __name__ == "__main__":
    sys.exit(main())
