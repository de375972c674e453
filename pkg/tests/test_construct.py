import numpy as np
import pytest

from helpers import B1, B2, random_b
from oracle import brute_tsc
from pilotseq.bounds import is_positive_definite, new_extended_welch_bound
from pilotseq.construct import (optimal_multicell, pooled_wbe, random_set, replicated_wbe,
                                wbe_truncated_dft)
from pilotseq.metrics import etsc, tsc
from pilotseq.model import InterferenceMatrix, validate


def test_dft_square_is_unitary():
    s = wbe_truncated_dft(6, 6)
    np.testing.assert_allclose(s.conj().T @ s, np.eye(6), atol=1e-14)


def test_dft_small_tsc_brute_force():
    assert brute_tsc(wbe_truncated_dft(2, 4)) == pytest.approx(8, rel=1e-12)


def test_dft_row_gram():
    s = wbe_truncated_dft(13, 16)
    np.testing.assert_allclose(s @ s.conj().T, 16 / 13 * np.eye(13), atol=1e-12)


@pytest.mark.parametrize("tau,k", [(3, 3), (5, 8), (13, 16), (9, 20)])
def test_dft_columns_unit_and_unimodular(tau, k):
    s = wbe_truncated_dft(tau, k)
    np.testing.assert_allclose(np.abs(s) ** 2, 1 / tau, atol=1e-15)
    assert brute_tsc(s) == pytest.approx(k * k / tau, rel=1e-9)


def test_dft_rejects_short_k():
    with pytest.raises(ValueError):
        wbe_truncated_dft(5, 4)


def test_optimal_hits_bound_example():
    B = InterferenceMatrix.toeplitz(0.3, 3)
    s = optimal_multicell(13, 16, B)
    assert etsc(s, B) == pytest.approx(94.52307692307693, rel=1e-9)
    assert validate(s).ok and s.unimodular


def test_optimal_single_cell_is_dft():
    s = optimal_multicell(5, 7, InterferenceMatrix.identity(1))
    np.testing.assert_array_equal(s.data, wbe_truncated_dft(5, 7))


def test_optimal_refuses_outside_regime():
    with pytest.raises(ValueError):
        optimal_multicell(13, 16, InterferenceMatrix(np.array(B2, dtype=float)))
    with pytest.raises(ValueError):
        optimal_multicell(13, 10, InterferenceMatrix.identity(2))


@pytest.mark.parametrize("seed", range(25))
def test_optimal_meets_bound_for_random_pd_b(seed):
    rng = np.random.default_rng(seed)
    J = int(rng.integers(1, 6))
    B = random_b(rng, J)
    if not is_positive_definite(B)[0]:
        B = InterferenceMatrix((B.entries + 2 * np.eye(J)) / 3)
    tau = int(rng.integers(1, 12))
    K = tau + int(rng.integers(0, 6))
    s = optimal_multicell(tau, K, B)
    bound = new_extended_welch_bound(tau, K, B).value
    assert etsc(s, B) - bound <= 1e-9 * bound
    assert etsc(s, B) >= bound * (1 - 1e-9)
    for j in range(J):
        assert tsc(type(s)(s.block(j), 1, K)) == pytest.approx(K * K / tau, rel=1e-9)


def test_row_permutation_keeps_etsc():
    B = InterferenceMatrix(np.array(B1))
    rng = np.random.default_rng(3)
    perms = [rng.permutation(13) for _ in range(3)]
    a = optimal_multicell(13, 15, B)
    b = optimal_multicell(13, 15, B, row_permutations=perms)
    assert not np.array_equal(a.data, b.data)
    assert etsc(b, B) == pytest.approx(etsc(a, B), rel=1e-12)
    with pytest.raises(ValueError):
        replicated_wbe(3, 4, 2, row_permutations=[[0, 1, 1], [0, 1, 2]])


def test_pooled_and_random_sets_are_valid(rng):
    assert validate(pooled_wbe(13, 14, 3)).ok
    assert validate(random_set(5, 3, 2, rng)).ok
    assert validate(random_set(5, 3, 2, rng, unimodular=True)).ok
