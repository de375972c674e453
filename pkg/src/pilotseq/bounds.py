"""Welch-type lower bounds on ETSC and positive-definiteness classification of B."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .model import InterferenceMatrix

PD_EIG_TOL = 1e-10


class BClass(str, enum.Enum):
    SPECIAL_TOEPLITZ = "SpecialToeplitz"
    DIAGONALLY_DOMINANT = "DiagonallyDominant"
    GENERAL_PD = "GeneralPD"
    NOT_PD = "NotPD"


class Bound(NamedTuple):
    value: float | None
    reason: str


def welch_bound(tau: int, cells: int, users: int) -> float:
    """TSC lower bound ``N^2 / tau`` with ``N = J*K``."""
    n = cells * users
    return n * n / tau


def extended_welch_bound_two_cell(tau: int, users: int, beta: float) -> Bound:
    """Two-cell bound ``2K^2(1+beta) / (K + beta(tau-K))``, valid for ``K <= tau <= 2K``."""
    k = users
    if not k <= tau <= 2 * k:
        return Bound(None, f"requires K <= tau <= 2K (tau={tau}, K={k})")
    return Bound(2.0 * k * k * (1.0 + beta) / (k + beta * (tau - k)), "J=2 and K <= tau <= 2K")


def new_extended_welch_bound_value(tau: int, users: int, B: InterferenceMatrix) -> float:
    """``(K^2/tau) * sum(B)`` with no applicability gating."""
    return users * users / tau * float(np.sum(B.entries))


def new_extended_welch_bound(tau: int, users: int, B: InterferenceMatrix) -> Bound:
    """Multi-cell bound for ``K >= tau`` and positive definite ``B``.

    Stated for unimodular pilots; the reason string carries that caveat.
    """
    if users < tau:
        return Bound(None, f"requires K >= tau (tau={tau}, K={users})")
    pd, _ = is_positive_definite(B)
    if not pd:
        return Bound(None, "B not positive definite")
    return Bound(new_extended_welch_bound_value(tau, users, B),
                 "K >= tau and B positive definite; proven for unimodular pilots")


def _toeplitz_beta(b: np.ndarray) -> float | None:
    j = b.shape[0]
    if j == 1:
        return 0.0
    off = b[~np.eye(j, dtype=bool)]
    if np.all(off == off[0]):
        return float(off[0])
    return None


def is_positive_definite(B: InterferenceMatrix) -> tuple[bool, BClass]:
    b = B.entries
    beta = _toeplitz_beta(b)
    if beta is not None and beta < 1.0:
        return True, BClass.SPECIAL_TOEPLITZ
    lam_min = float(np.linalg.eigvalsh(b)[0])
    pd = lam_min > PD_EIG_TOL
    if not pd:
        return False, BClass.NOT_PD
    off_sums = b.sum(axis=1) - 1.0
    if np.all(off_sums <= 1.0):
        return True, BClass.DIAGONALLY_DOMINANT
    return True, BClass.GENERAL_PD


@dataclass(frozen=True)
class BoundReport:
    welch: float
    extended_two_cell: float | None
    new_extended: float | None
    applicability: dict
    b_is_positive_definite: bool
    b_class: BClass
    welch_bounds_etsc: bool = False
    n_users: int = 0

    def etsc_floor(self) -> float:
        """Largest lower bound on ETSC that applies here.

        The Welch bound counts only when every power factor is 1; the diagonal
        of the Gram matrix alone contributes ``J*K``.
        """
        vals = [float(self.n_users), self.extended_two_cell, self.new_extended]
        if self.welch_bounds_etsc:
            vals.append(self.welch)
        return max(v for v in vals if v is not None)

    def to_dict(self) -> dict:
        return {
            "welch": self.welch,
            "extendedTwoCell": self.extended_two_cell,
            "newExtended": self.new_extended,
            "applicability": dict(self.applicability),
            "bIsPositiveDefinite": self.b_is_positive_definite,
            "bClass": self.b_class.value,
        }


def bound_report(tau: int, cells: int, users: int, B: InterferenceMatrix) -> BoundReport:
    if B.order != cells:
        raise ValueError(f"B has order {B.order} but {cells} cells were requested")
    pd, cls = is_positive_definite(B)
    all_ones = bool(np.all(B.entries == 1.0))
    why = {"welch": "bounds TSC; bounds ETSC as well" if all_ones
           else "bounds TSC only; ETSC differs because B is not all ones"}
    if cells == 2:
        two = extended_welch_bound_two_cell(tau, users, float(B.entries[0, 1]))
    else:
        two = Bound(None, f"defined for J=2 only (J={cells})")
    why["extendedTwoCell"] = two.reason
    new = new_extended_welch_bound(tau, users, B)
    why["newExtended"] = new.reason
    return BoundReport(welch_bound(tau, cells, users), two.value, new.value, why, pd, cls,
                       all_ones, cells * users)
