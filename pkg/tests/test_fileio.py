import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from helpers import B1
from pilotseq import fileio
from pilotseq.model import (Acceleration, Constraint, DesignProblem, InterferenceMatrix,
                            OptimizerSettings, SequenceSet)

any_float = st.floats(allow_nan=False, allow_infinity=False, width=64)


@st.composite
def sets(draw):
    tau, J, K = draw(st.integers(1, 4)), draw(st.integers(1, 3)), draw(st.integers(1, 3))
    re = draw(arrays(float, (tau, J * K), elements=any_float))
    im = draw(arrays(float, (tau, J * K), elements=any_float))
    return SequenceSet(re + 1j * im, J, K, draw(st.booleans()))


@given(sets())
@settings(max_examples=60, deadline=None)
def test_set_round_trip_is_bit_exact(s):
    back = fileio.set_from_obj(json.loads(fileio.dumps(fileio.set_to_obj(s))))
    assert back.data.tobytes() == s.data.tobytes()
    assert (back.cells, back.users_per_cell, back.unimodular) == (s.cells, s.users_per_cell, s.unimodular)


@given(st.lists(any_float, min_size=1, max_size=20))
def test_float_format_round_trips(xs):
    assert [float(fileio.fmt(x)) for x in xs] == xs


def test_dumps_is_stable():
    obj = {"a": [1, 2.5, True, None], "b": {"c": [[0.1, 0.2]]}}
    assert fileio.dumps(obj) == fileio.dumps(json.loads(fileio.dumps(obj)))
    assert json.loads(fileio.dumps(obj)) == obj
    with pytest.raises(ValueError):
        fileio.dumps([float("nan")])


def test_problem_round_trip(tmp_path):
    p = DesignProblem(7, 3, 9, InterferenceMatrix(np.array(B1)), Constraint.UNIMODULAR,
                      OptimizerSettings(123, 1e-12, 2**63 - 1, Acceleration.SQUAREM))
    path = tmp_path / "p.json"
    fileio.write_text(path, fileio.dumps(fileio.problem_to_obj(p)))
    q = fileio.load_problem(path)
    assert q.optimizer == p.optimizer and q.constraint is p.constraint
    assert q.B == p.B and (q.tau, q.cells, q.users_per_cell) == (7, 3, 9)


def test_b_shorthands():
    assert fileio.b_from_obj({"toeplitz": 0.3, "cells": 3}) == InterferenceMatrix.toeplitz(0.3, 3)
    assert fileio.b_from_obj({"toeplitz": 0.3}, cells=2) == InterferenceMatrix.toeplitz(0.3, 2)
    assert fileio.b_from_obj([[1, 0.1], [0.1, 1]]).order == 2
    assert fileio.b_from_obj({"B": [[1.0]]}) == InterferenceMatrix.identity(1)
    with pytest.raises(fileio.FormatError):
        fileio.b_from_obj({"toeplitz": 0.3})
    with pytest.raises(fileio.FormatError):
        fileio.b_from_obj([[1, 0.1], [0.2, 1]])
    with pytest.raises(fileio.FormatError):
        fileio.b_from_obj([[1.0]], cells=2)


def test_problem_defaults_and_errors():
    p = fileio.problem_from_obj({"tau": 4, "J": 2, "K": 4, "B": {"toeplitz": 0.5}})
    assert p.optimizer == OptimizerSettings() and p.constraint is Constraint.UNIT_NORM
    with pytest.raises(fileio.FormatError, match="unknown optimizer keys"):
        fileio.problem_from_obj({"tau": 4, "J": 1, "K": 4, "B": [[1]], "optimizer": {"iters": 3}})
    with pytest.raises(fileio.FormatError):
        fileio.problem_from_obj({"tau": 4, "J": 1, "K": 4, "B": [[1]], "constraint": "circle"})
    with pytest.raises(fileio.FormatError):
        fileio.problem_from_obj({"tau": 4, "J": 1, "B": [[1]]})


def test_set_shape_mismatch():
    obj = fileio.set_to_obj(SequenceSet(np.eye(2), 1, 2))
    obj["K"] = 3
    with pytest.raises(fileio.FormatError, match="shape"):
        fileio.set_from_obj(obj)


def test_malformed_file_reports_position(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{\n  "tau": 4,\n  "J": oops\n}\n')
    with pytest.raises(fileio.MalformedFile) as info:
        fileio.load_set(path)
    assert f"{path}:3:" in str(info.value)


def test_invalid_content_names_file(tmp_path):
    path = tmp_path / "b.json"
    path.write_text('{"B": [[1, 2], [3]]}')
    with pytest.raises(fileio.FormatError) as info:
        fileio.load_b(path)
    assert str(path) in str(info.value) and not isinstance(info.value, fileio.MalformedFile)
