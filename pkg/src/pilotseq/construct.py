"""Deterministic constructions: truncated-DFT WBE sets and the multi-cell
assembly that meets the new extended Welch bound with equality."""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .bounds import is_positive_definite
from .model import InterferenceMatrix, SequenceSet


def wbe_truncated_dft(tau: int, users: int) -> np.ndarray:
    """First ``tau`` rows of the ``K``-point DFT, scaled by ``1/sqrt(tau)``.

    Entry ``(mu, k) = exp(2j*pi*mu*k/K) / sqrt(tau)``.  Rows are mutually
    orthogonal with squared norm ``K/tau`` so the columns meet the Welch bound.
    """
    if users < tau:
        raise ValueError(f"a WBE set needs K >= tau (tau={tau}, K={users})")
    # integer phase index reduced mod K keeps the angles exact for large mu*k
    idx = np.outer(np.arange(tau), np.arange(users)) % users
    return np.exp(2j * np.pi * idx / users) / np.sqrt(tau)


def replicated_wbe(tau: int, users: int, cells: int,
                   row_permutations: Sequence[Sequence[int]] | None = None) -> SequenceSet:
    """Give every cell the same truncated-DFT WBE set.

    ``row_permutations[j]``, when given, reorders the rows of cell ``j``; this
    leaves ETSC unchanged for any ``B``.
    """
    base = wbe_truncated_dft(tau, users)
    blocks = []
    for j in range(cells):
        blk = base
        if row_permutations is not None:
            perm = np.asarray(row_permutations[j])
            if sorted(perm.tolist()) != list(range(tau)):
                raise ValueError(f"row_permutations[{j}] is not a permutation of range({tau})")
            blk = base[perm]
        blocks.append(blk)
    return SequenceSet(np.hstack(blocks), cells, users, unimodular=True)


def optimal_multicell(tau: int, users: int, B: InterferenceMatrix,
                      row_permutations=None) -> SequenceSet:
    """Bound-achieving set for ``K >= tau`` and positive definite ``B``."""
    if users < tau:
        raise ValueError(f"construction needs K >= tau (tau={tau}, K={users})")
    pd, _ = is_positive_definite(B)
    if not pd:
        raise ValueError("construction needs a positive definite B")
    return replicated_wbe(tau, users, B.order, row_permutations)


def pooled_wbe(tau: int, users: int, cells: int) -> SequenceSet:
    """One ``tau x JK`` WBE set split across cells, the usual single-pool baseline."""
    return SequenceSet(wbe_truncated_dft(tau, cells * users), cells, users, unimodular=True)


def random_set(tau: int, users: int, cells: int, rng: np.random.Generator,
               unimodular: bool = False) -> SequenceSet:
    """Random unit-norm (complex Gaussian) or unimodular (uniform phase) pilots."""
    n = cells * users
    if unimodular:
        data = np.exp(2j * np.pi * rng.random((tau, n))) / np.sqrt(tau)
    else:
        data = rng.standard_normal((tau, n)) + 1j * rng.standard_normal((tau, n))
        data /= np.linalg.norm(data, axis=0)
    return SequenceSet(data, cells, users, unimodular=unimodular)
