"""Figures of merit for pilot sets: extended Gram matrix, ETSC, TSC,
interference split, analytic LS sum MSE and PAPR."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import InterferenceMatrix, SequenceSet


@dataclass(frozen=True, eq=False)
class GramBlocks:
    """``J x J`` grid of ``K x K`` blocks, block ``(m, n) = sqrt(beta_mn) S_m^H S_n``."""

    blocks: np.ndarray  # shape (J, J, K, K)

    @property
    def cells(self) -> int:
        return self.blocks.shape[0]

    def __getitem__(self, mn):
        return self.blocks[mn]

    def assemble(self) -> np.ndarray:
        j, _, k, _ = self.blocks.shape
        return self.blocks.transpose(0, 2, 1, 3).reshape(j * k, j * k)


def _check(sset: SequenceSet, B: InterferenceMatrix):
    if B.order != sset.cells:
        raise ValueError(f"B has order {B.order} but the set has {sset.cells} cells")


def extended_gram(sset: SequenceSet, B: InterferenceMatrix) -> GramBlocks:
    _check(sset, B)
    sb = sset.blocks()
    cross = np.einsum("mti,ntk->mnik", sb.conj(), sb)
    return GramBlocks(np.sqrt(B.entries)[:, :, None, None] * cross)


def _block_energies(sset: SequenceSet) -> np.ndarray:
    """``E[m, n] = ||S_m^H S_n||_F^2``."""
    g = sset.data.conj().T @ sset.data
    j, k = sset.cells, sset.users_per_cell
    return (np.abs(g) ** 2).reshape(j, k, j, k).sum(axis=(1, 3))


def etsc(sset: SequenceSet, B: InterferenceMatrix) -> float:
    """Squared Frobenius norm of the extended Gram matrix."""
    _check(sset, B)
    return float(np.sum(B.entries * _block_energies(sset)))


def tsc(sset: SequenceSet) -> float:
    g = sset.data.conj().T @ sset.data
    return float(np.sum(np.abs(g) ** 2))


def interference_split(sset: SequenceSet, B: InterferenceMatrix) -> tuple[float, float]:
    """Return ``(I_intra, I_inter)``; ``etsc = I_intra + I_inter + J*K``."""
    _check(sset, B)
    e = _block_energies(sset)
    intra = float(np.trace(e)) - sset.n_users
    off = ~np.eye(sset.cells, dtype=bool)
    inter = float(np.sum(B.entries[off] * e[off]))
    return intra, inter


def sum_mse_analytic(sset: SequenceSet, B: InterferenceMatrix, sigma_sq: float) -> float:
    """Expected LS sum MSE over all users: ``ETSC - JK + JK*sigma^2``."""
    if sigma_sq < 0:
        raise ValueError("noise variance must be >= 0")
    n = sset.n_users
    return etsc(sset, B) - n + n * sigma_sq


def papr_ratio(sequence) -> float:
    s = np.asarray(sequence)
    p = np.abs(s) ** 2
    mean = p.mean()
    if not mean > 0:
        raise ValueError("PAPR is undefined for an all-zero sequence")
    return float(p.max() / mean)


def papr(sequence) -> float:
    """Peak-to-average power ratio in dB."""
    return 10.0 * math.log10(papr_ratio(sequence))


def papr_per_user(sset: SequenceSet) -> np.ndarray:
    p = np.abs(sset.data) ** 2
    mean = p.mean(axis=0)
    if np.any(mean <= 0):
        raise ValueError("PAPR is undefined for an all-zero pilot")
    return 10.0 * np.log10(p.max(axis=0) / mean)


def papr_ccdf(values_db) -> tuple[np.ndarray, np.ndarray]:
    """Empirical CCDF ``P(PAPR > x)`` evaluated at each distinct observed value."""
    v = np.sort(np.asarray(values_db, dtype=float))
    x = np.unique(v)
    prob = 1.0 - np.searchsorted(v, x, side="right") / v.size
    return x, prob
