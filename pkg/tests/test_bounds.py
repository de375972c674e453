import numpy as np
import pytest

from helpers import B1, B2
from pilotseq.bounds import (BClass, bound_report, extended_welch_bound_two_cell,
                             is_positive_definite, new_extended_welch_bound,
                             new_extended_welch_bound_value, welch_bound)
from pilotseq.model import InterferenceMatrix


def test_welch_bound():
    assert welch_bound(39, 2, 32) == pytest.approx(4096 / 39)
    assert welch_bound(7, 1, 7) == 7
    assert welch_bound(5, 1, 1) == pytest.approx(1 / 5)


def test_two_cell_bound_examples():
    assert extended_welch_bound_two_cell(39, 32, 1.0).value == pytest.approx(105.02564102564102)
    assert extended_welch_bound_two_cell(39, 32, 0.0).value == pytest.approx(64)
    assert extended_welch_bound_two_cell(20, 10, 1.0).value == pytest.approx(20)


@pytest.mark.parametrize("tau,k", [(39, 32), (10, 10), (20, 10), (15, 11)])
def test_two_cell_bound_equals_welch_at_beta_one(tau, k):
    assert extended_welch_bound_two_cell(tau, k, 1.0).value == pytest.approx(welch_bound(tau, 2, k), rel=1e-14)


@pytest.mark.parametrize("tau,k", [(5, 10), (30, 10)])
def test_two_cell_bound_absent_outside_range(tau, k):
    b = extended_welch_bound_two_cell(tau, k, 0.5)
    assert b.value is None and "K <= tau <= 2K" in b.reason


def test_new_bound_examples():
    ones = InterferenceMatrix(np.ones((3, 3)))
    b = new_extended_welch_bound(39, 42, ones)
    assert b.value is None and b.reason == "B not positive definite"
    b = new_extended_welch_bound(39, 42, InterferenceMatrix.toeplitz(0.5, 3))
    assert b.value == pytest.approx(271.38461538461536)
    assert new_extended_welch_bound(4, 9, InterferenceMatrix.identity(1)).value == pytest.approx(81 / 4)
    assert new_extended_welch_bound(10, 9, InterferenceMatrix.identity(2)).value is None


@pytest.mark.parametrize("J", [1, 2, 3, 5])
def test_new_bound_formula_reduces_to_welch_for_all_ones(J):
    ones = InterferenceMatrix(np.ones((J, J)))
    assert new_extended_welch_bound_value(7, 9, ones) == pytest.approx(welch_bound(7, J, 9))


def test_pd_classification_reference_matrices():
    assert is_positive_definite(InterferenceMatrix(np.array(B1))) == (True, BClass.GENERAL_PD)
    assert is_positive_definite(InterferenceMatrix(np.array(B2))) == (False, BClass.NOT_PD)
    assert is_positive_definite(InterferenceMatrix.identity(4)) == (True, BClass.SPECIAL_TOEPLITZ)


def test_pd_classification_boundaries():
    # special Toeplitz with beta = 1 is the singular all-ones matrix
    assert is_positive_definite(InterferenceMatrix.toeplitz(1.0, 3)) == (False, BClass.NOT_PD)
    assert is_positive_definite(InterferenceMatrix.toeplitz(0.99, 3))[0]
    dd = InterferenceMatrix(np.array([[1, .5, .2], [.5, 1, .3], [.2, .3, 1]]))
    assert is_positive_definite(dd) == (True, BClass.DIAGONALLY_DOMINANT)
    # every row weakly dominant, yet singular
    weak = InterferenceMatrix(np.array([[1, 1, 0], [1, 1, 0], [0, 0, 1]]))
    assert is_positive_definite(weak) == (False, BClass.NOT_PD)


@pytest.mark.parametrize("seed", range(20))
def test_pd_agrees_with_eigenvalues(seed):
    rng = np.random.default_rng(seed)
    b = rng.random((4, 4))
    b = (b + b.T) / 2
    np.fill_diagonal(b, 1)
    pd, cls = is_positive_definite(InterferenceMatrix(b))
    assert pd == (np.linalg.eigvalsh(b)[0] > 1e-10)
    assert (cls is BClass.NOT_PD) == (not pd)


def test_bound_report_fields():
    r = bound_report(39, 2, 32, InterferenceMatrix.toeplitz(0.5, 2))
    assert r.new_extended is None and r.extended_two_cell == pytest.approx(86.53521126760563)
    assert r.etsc_floor() == r.extended_two_cell
    assert bound_report(39, 2, 32, InterferenceMatrix(np.ones((2, 2)))).etsc_floor() == r.welch
    assert bound_report(3, 1, 2, InterferenceMatrix.identity(1)).etsc_floor() == 2
    d = r.to_dict()
    assert set(d) == {"welch", "extendedTwoCell", "newExtended", "applicability",
                      "bIsPositiveDefinite", "bClass"}
    r3 = bound_report(39, 3, 42, InterferenceMatrix.toeplitz(0.5, 3))
    assert r3.extended_two_cell is None and r3.new_extended == pytest.approx(271.38461538461536)
    assert "unimodular" in r3.applicability["newExtended"]
    with pytest.raises(ValueError):
        bound_report(39, 3, 42, InterferenceMatrix.identity(2))
