"""Command-line entry point: construct, design, bound, eval and simulate.

Exit status is 0 on success, 1 on validation errors and 2 on I/O errors
(unreadable or syntactically malformed files, bad command-line usage).
"""

from __future__ import annotations

import argparse
import contextlib
import os
import sys
from pathlib import Path

from . import fileio
from .bounds import bound_report
from .construct import optimal_multicell
from .fileio import FormatError, MalformedFile, dumps, fmt
from .metrics import etsc, interference_split, papr_ccdf, papr_per_user, tsc
from .mm import solve
from .model import Acceleration, Constraint, validate
from .sim import SimulationConfig, report_csv, run_monte_carlo

THREADS_ENV = "PILOTSEQ_THREADS"


class ValidationError(Exception):
    pass


def _emit(obj, out=None):
    (out or sys.stdout).write(dumps(obj))


def _write_ccdf(path, values_db):
    x, p = papr_ccdf(values_db)
    lines = ["paprDb,ccdf"] + [f"{fmt(a)},{fmt(b)}" for a, b in zip(x, p)]
    fileio.write_text(path, "\n".join(lines) + "\n")


def _eval_record(sset, B) -> dict:
    intra, inter = interference_split(sset, B)
    pp = papr_per_user(sset)
    return {"etsc": etsc(sset, B), "tsc": tsc(sset), "iIntra": intra, "iInter": inter,
            "paprPerUserDb": [float(v) for v in pp], "maxPaprDb": float(pp.max())}


def cmd_construct(args) -> int:
    B = fileio.load_b(args.beta_matrix, args.cells)
    try:
        sset = optimal_multicell(args.tau, args.users, B)
    except ValueError as exc:
        raise ValidationError(str(exc)) from exc
    fileio.save_set(args.out, sset)
    rep = bound_report(args.tau, args.cells, args.users, B)
    achieved = etsc(sset, B)
    _emit({"etsc": achieved, "newExtended": rep.new_extended,
           "relativeGap": (achieved - rep.new_extended) / rep.new_extended,
           "out": str(args.out)})
    return 0


def cmd_design(args) -> int:
    problem = fileio.load_problem(args.config)
    opts = problem.optimizer
    acc = Acceleration.SQUAREM if args.accelerate else opts.acceleration
    max_it = args.max_iterations or opts.max_iterations
    opts = type(opts)(max_it, opts.epsilon, args.seed, acc)
    constraint = Constraint.UNIMODULAR if args.unimodular else problem.constraint
    problem = type(problem)(problem.tau, problem.cells, problem.users_per_cell, problem.B,
                            constraint, opts)
    sset, trace = solve(problem)
    report = validate(sset, problem)
    fileio.save_set(args.out, sset)
    fileio.write_text(args.trace, trace.to_csv())
    pp = papr_per_user(sset)
    if args.ccdf:
        _write_ccdf(args.ccdf, pp)
    bounds = bound_report(problem.tau, problem.cells, problem.users_per_cell, problem.B)
    _emit({"etsc": trace.objectives[-1], "initialEtsc": trace.objectives[0],
           "iterations": trace.iterations, "mapEvaluations": trace.map_evaluations,
           "termination": trace.termination.value, "constraint": constraint.value,
           "acceleration": acc.value, "seed": args.seed, "maxPaprDb": float(pp.max()),
           "bounds": bounds.to_dict(), "valid": report.ok})
    if not report.ok:
        raise ValidationError(f"designed set failed validation: {report.summary()}")
    return 0


def cmd_bound(args) -> int:
    B = fileio.load_b(args.beta_matrix, args.cells)
    _emit(bound_report(args.tau, args.cells, args.users, B).to_dict())
    return 0


def cmd_eval(args) -> int:
    sset = fileio.load_set(args.set)
    B = fileio.load_b(args.beta_matrix, sset.cells)
    rec = _eval_record(sset, B)
    report = validate(sset)
    rec["valid"] = report.ok
    _emit(rec)
    if args.ccdf:
        _write_ccdf(args.ccdf, rec["paprPerUserDb"])
    if not report.ok:
        raise ValidationError(report.summary())
    return 0


def cmd_simulate(args) -> int:
    cfg_path = Path(args.config)
    cfg = fileio.load_json(cfg_path)
    if not isinstance(cfg, dict):
        raise FormatError(f"{cfg_path}: simulation config must be a JSON object")
    try:
        sets = [(str(d["label"]), d["path"]) for d in cfg.get("sets", [])]
    except (KeyError, TypeError) as exc:
        raise FormatError(f"{cfg_path}: each entry of 'sets' needs 'label' and 'path'") from exc
    for spec in args.set or []:
        label, sep, path = spec.partition("=")
        if not sep:
            raise FormatError(f"--set expects LABEL=PATH, got {spec!r}")
        sets.append((label, path))
    if not sets:
        raise FormatError(f"{cfg_path}: no sequence sets given")
    try:
        grid = cfg["sigma_sq"]
        trials = int(cfg.get("trials", 10_000))
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"{cfg_path}: invalid simulation config: {exc}") from exc
    reports = {}
    for label, path in sets:
        p = Path(path)
        sset = fileio.load_set(p if p.is_absolute() else cfg_path.parent / p)
        B = fileio.b_from_obj(cfg.get("B"), sset.cells)
        try:
            conf = SimulationConfig(sset, B, tuple(grid), trials, args.seed)
        except (TypeError, ValueError) as exc:
            raise ValidationError(f"{label}: {exc}") from exc
        reports[label] = run_monte_carlo(conf)
    text = report_csv(reports)
    if args.out:
        fileio.write_text(args.out, text)
    else:
        sys.stdout.write(text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="pilotseq", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    def dims(p):
        p.add_argument("--tau", type=int, required=True)
        p.add_argument("--users", type=int, required=True, help="users per cell (K)")
        p.add_argument("--cells", type=int, required=True, help="number of cells (J)")
        p.add_argument("--beta-matrix", required=True,
                       help='JSON: {"B": rows}, rows, or {"toeplitz": beta, "cells": J}')

    p = sub.add_parser("construct", help="build a bound-achieving set (K >= tau, PD B)")
    dims(p)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("design", help="run the MM optimizer on a problem config")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--trace", required=True, help="CSV: iteration,etsc,elapsed_seconds")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--unimodular", action="store_true")
    p.add_argument("--accelerate", action="store_true", help="use SQUAREM")
    p.add_argument("--max-iterations", type=int)
    p.add_argument("--ccdf", help="write the per-user PAPR CCDF as CSV")
    p.set_defaults(func=cmd_design)

    p = sub.add_parser("bound", help="print all applicable lower bounds")
    dims(p)
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("eval", help="evaluate a sequence set")
    p.add_argument("--set", required=True)
    p.add_argument("--beta-matrix", required=True)
    p.add_argument("--ccdf")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("simulate", help="Monte-Carlo LS sum MSE")
    p.add_argument("--config", required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--set", action="append", metavar="LABEL=PATH")
    p.add_argument("--out")
    p.set_defaults(func=cmd_simulate)
    return ap


def _thread_limit():
    n = os.environ.get(THREADS_ENV)
    if not n:
        return contextlib.nullcontext()
    from threadpoolctl import threadpool_limits
    return threadpool_limits(int(n))


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        with _thread_limit():
            return args.func(args)
    except MalformedFile as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValidationError, FormatError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
