"""JSON file formats for problems, interference matrices and sequence sets.

Floats are written with 17 significant digits, which parse back to the same
binary64 value.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .model import (Acceleration, Constraint, DesignProblem, InterferenceMatrix,
                    OptimizerSettings, SequenceSet)


class FormatError(ValueError):
    """A file parsed as JSON but does not describe a valid object."""


class MalformedFile(FormatError):
    """A file that is not valid JSON."""


def fmt(x: float) -> str:
    return format(float(x), ".17g")


def _dumps(obj, indent=0) -> str:
    """Minimal JSON writer that formats floats with :func:`fmt`."""
    pad = "  " * indent
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f'{pad}  {json.dumps(str(k))}: {_dumps(v, indent + 1)}' for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple)):
        if all(not isinstance(v, (dict, list, tuple)) for v in obj):
            return "[" + ", ".join(_dumps(v) for v in obj) + "]"
        items = [f"{pad}  {_dumps(v, indent + 1)}" for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + pad + "]"
    if isinstance(obj, (bool, np.bool_)) or obj is None:
        return json.dumps(bool(obj) if obj is not None else None)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        if not np.isfinite(obj):
            raise ValueError("cannot serialize non-finite float")
        return fmt(obj)
    return json.dumps(obj)


def dumps(obj) -> str:
    return _dumps(obj) + "\n"


def load_json(path) -> object:
    """Read JSON; decode errors are re-raised with file, line and column."""
    text = Path(path).read_text()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedFile(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc


# -- interference matrix ---------------------------------------------------

def b_to_obj(B: InterferenceMatrix) -> dict:
    return {"B": B.entries.tolist()}


def b_from_obj(obj, cells: int | None = None) -> InterferenceMatrix:
    """Accept ``{"B": rows}``, a bare list of rows, or ``{"toeplitz": beta, "cells": J}``."""
    try:
        if isinstance(obj, dict) and "toeplitz" in obj:
            J = int(obj.get("cells", cells if cells is not None else 0))
            if J < 1:
                raise FormatError("toeplitz shorthand needs a positive 'cells'")
            B = InterferenceMatrix.toeplitz(float(obj["toeplitz"]), J)
        else:
            rows = obj["B"] if isinstance(obj, dict) else obj
            B = InterferenceMatrix(np.array(rows, dtype=float))
    except FormatError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"invalid interference matrix: {exc}") from exc
    if cells is not None and B.order != cells:
        raise FormatError(f"interference matrix has order {B.order}, expected {cells}")
    return B


# -- sequence set ----------------------------------------------------------

def set_to_obj(s: SequenceSet) -> dict:
    rows = [[[float(z.real), float(z.imag)] for z in row] for row in s.data]
    return {"tau": s.tau, "J": s.cells, "K": s.users_per_cell,
            "unimodular": bool(s.unimodular), "data": rows}


def set_from_obj(obj) -> SequenceSet:
    try:
        tau, J, K = int(obj["tau"]), int(obj["J"]), int(obj["K"])
        arr = np.array(obj["data"], dtype=float)
        if arr.shape != (tau, J * K, 2):
            raise FormatError(f"data has shape {arr.shape}, expected {(tau, J * K, 2)}")
        return SequenceSet(arr[..., 0] + 1j * arr[..., 1], J, K, bool(obj.get("unimodular", False)))
    except FormatError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"invalid sequence set: {exc}") from exc


# -- problem ---------------------------------------------------------------

def settings_to_obj(o: OptimizerSettings) -> dict:
    return {"max_iterations": int(o.max_iterations), "epsilon": float(o.epsilon),
            "seed": int(o.seed), "acceleration": o.acceleration.value}


def settings_from_obj(obj) -> OptimizerSettings:
    obj = dict(obj or {})
    unknown = set(obj) - {"max_iterations", "epsilon", "seed", "acceleration"}
    if unknown:
        raise FormatError(f"unknown optimizer keys: {sorted(unknown)}")
    defaults = OptimizerSettings()
    try:
        return OptimizerSettings(
            int(obj.get("max_iterations", defaults.max_iterations)),
            float(obj.get("epsilon", defaults.epsilon)),
            int(obj.get("seed", defaults.seed)),
            Acceleration(obj.get("acceleration", defaults.acceleration)))
    except (TypeError, ValueError) as exc:
        raise FormatError(f"invalid optimizer block: {exc}") from exc


def problem_to_obj(p: DesignProblem) -> dict:
    return {"tau": p.tau, "J": p.cells, "K": p.users_per_cell, "B": p.B.entries.tolist(),
            "constraint": p.constraint.value, "optimizer": settings_to_obj(p.optimizer)}


def problem_from_obj(obj) -> DesignProblem:
    try:
        tau, J, K = int(obj["tau"]), int(obj["J"]), int(obj["K"])
        B = b_from_obj(obj["B"], cells=J)
        return DesignProblem(tau, J, K, B, Constraint(obj.get("constraint", "unit_norm")),
                             settings_from_obj(obj.get("optimizer")))
    except FormatError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"invalid problem config: {exc}") from exc


def write_text(path, text: str):
    Path(path).write_text(text, newline="\n")


def save_set(path, s: SequenceSet):
    write_text(path, dumps(set_to_obj(s)))


def _load(path, parse, *args):
    obj = load_json(path)
    try:
        return parse(obj, *args)
    except FormatError as exc:
        raise FormatError(f"{path}: {exc}") from exc


def load_set(path) -> SequenceSet:
    return _load(path, set_from_obj)


def load_problem(path) -> DesignProblem:
    return _load(path, problem_from_obj)


def load_b(path, cells: int | None = None) -> InterferenceMatrix:
    return _load(path, b_from_obj, cells)
