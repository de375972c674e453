"""Domain types shared across the package.

A pilot set for ``J`` cells with ``K`` users each is stored as a
``tau x (J*K)`` complex matrix whose column ``n = j*K + k`` is the pilot of
user ``k`` in cell ``j``.  Per-cell block ``S_j`` is columns ``[jK, (j+1)K)``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

NORM_TOL = 1e-9
SYMMETRY_TOL = 1e-12


class Constraint(str, enum.Enum):
    UNIT_NORM = "unit_norm"
    UNIMODULAR = "unimodular"


class Acceleration(str, enum.Enum):
    PLAIN = "plain"
    SQUAREM = "squarem"


def _frozen(a: np.ndarray) -> np.ndarray:
    a.flags.writeable = False
    return a


@dataclass(frozen=True, eq=False)
class InterferenceMatrix:
    """Symmetric ``J x J`` matrix of inter-cell power factors with unit diagonal.

    Asymmetric input is rejected rather than symmetrized.
    """

    entries: np.ndarray

    def __post_init__(self):
        b = np.array(self.entries, dtype=np.float64)
        if b.ndim != 2 or b.shape[0] != b.shape[1] or b.shape[0] < 1:
            raise ValueError(f"interference matrix must be square and non-empty, got shape {b.shape}")
        if not np.all(np.isfinite(b)):
            raise ValueError("interference matrix has non-finite entries")
        diag = np.diag(b)
        if np.any(np.abs(diag - 1.0) > SYMMETRY_TOL):
            raise ValueError(f"diagonal entries must equal 1, got {diag.tolist()}")
        if np.any(b < 0.0) or np.any(b > 1.0):
            raise ValueError("power factors must lie in [0, 1]")
        if np.any(np.abs(b - b.T) > SYMMETRY_TOL):
            raise ValueError("interference matrix must be symmetric")
        object.__setattr__(self, "entries", _frozen(b))

    @property
    def order(self) -> int:
        return self.entries.shape[0]

    @classmethod
    def toeplitz(cls, beta: float, cells: int) -> "InterferenceMatrix":
        """All off-diagonal factors equal to ``beta``."""
        b = np.full((cells, cells), float(beta))
        np.fill_diagonal(b, 1.0)
        return cls(b)

    @classmethod
    def identity(cls, cells: int) -> "InterferenceMatrix":
        return cls(np.eye(cells))

    def __eq__(self, other):
        if not isinstance(other, InterferenceMatrix):
            return NotImplemented
        return np.array_equal(self.entries, other.entries)

    def __repr__(self):
        return f"InterferenceMatrix({self.entries.tolist()})"


@dataclass(frozen=True, eq=False)
class SequenceSet:
    """Pilot matrix for ``cells`` cells of ``users_per_cell`` users each.

    Construction checks shapes only; norm and modulus invariants are reported
    by :func:`validate` so that malformed sets can still be inspected.
    """

    data: np.ndarray
    cells: int
    users_per_cell: int
    unimodular: bool = False

    def __post_init__(self):
        s = np.asfortranarray(np.array(self.data, dtype=np.complex128))
        if s.ndim == 1:
            s = s.reshape(-1, 1, order="F")
        if s.ndim != 2:
            raise ValueError(f"sequence data must be 2-D, got {s.ndim}-D")
        if self.cells < 1 or self.users_per_cell < 1:
            raise ValueError("cells and users_per_cell must be positive")
        if s.shape[1] != self.cells * self.users_per_cell:
            raise ValueError(
                f"expected {self.cells * self.users_per_cell} columns for "
                f"J={self.cells}, K={self.users_per_cell}, got {s.shape[1]}")
        if s.shape[0] < 1:
            raise ValueError("sequence length must be positive")
        object.__setattr__(self, "data", _frozen(s))

    @property
    def tau(self) -> int:
        return self.data.shape[0]

    @property
    def n_users(self) -> int:
        return self.data.shape[1]

    def block(self, j: int) -> np.ndarray:
        k = self.users_per_cell
        return self.data[:, j * k:(j + 1) * k]

    def pilot(self, j: int, k: int) -> np.ndarray:
        return self.data[:, j * self.users_per_cell + k]

    def blocks(self) -> np.ndarray:
        """Per-cell blocks stacked as a ``(J, tau, K)`` array."""
        return self.data.reshape(self.tau, self.cells, self.users_per_cell).transpose(1, 0, 2)

    def __eq__(self, other):
        if not isinstance(other, SequenceSet):
            return NotImplemented
        return (self.cells == other.cells and self.users_per_cell == other.users_per_cell
                and self.unimodular == other.unimodular
                and np.array_equal(self.data, other.data))


@dataclass(frozen=True)
class OptimizerSettings:
    max_iterations: int = 20_000
    epsilon: float = 1e-10
    seed: int = 0
    acceleration: Acceleration = Acceleration.PLAIN

    def __post_init__(self):
        if int(self.max_iterations) < 1:
            raise ValueError("max_iterations must be >= 1")
        if not self.epsilon >= 0:
            raise ValueError("epsilon must be >= 0")
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError("seed must fit in an unsigned 64-bit integer")
        object.__setattr__(self, "acceleration", Acceleration(self.acceleration))


@dataclass(frozen=True)
class DesignProblem:
    tau: int
    cells: int
    users_per_cell: int
    B: InterferenceMatrix
    constraint: Constraint = Constraint.UNIT_NORM
    optimizer: OptimizerSettings = field(default_factory=OptimizerSettings)

    def __post_init__(self):
        if self.tau < 1 or self.cells < 1 or self.users_per_cell < 1:
            raise ValueError("tau, J and K must all be >= 1")
        if self.B.order != self.cells:
            raise ValueError(f"B has order {self.B.order} but the problem has {self.cells} cells")
        object.__setattr__(self, "constraint", Constraint(self.constraint))

    @property
    def n_users(self) -> int:
        return self.cells * self.users_per_cell

    @property
    def unimodular(self) -> bool:
        return self.constraint is Constraint.UNIMODULAR


@dataclass(frozen=True)
class ChannelModel:
    """Unit-variance i.i.d. CN(0, 1) channels plus white noise of variance ``noise_variance``."""

    noise_variance: float

    def __post_init__(self):
        if not self.noise_variance >= 0:
            raise ValueError("noise variance must be >= 0")


@dataclass(frozen=True)
class Violation:
    kind: str          # "dimension", "norm" or "modulus"
    location: tuple    # (column,) or (row, column)
    deviation: float   # signed deviation of the squared quantity


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...] = ()

    def __bool__(self):
        # truthy when the set is valid
        return not self.violations

    @property
    def ok(self) -> bool:
        return not self.violations

    def worst(self, kind: str) -> float:
        devs = [abs(v.deviation) for v in self.violations if v.kind == kind]
        return max(devs, default=0.0)

    def summary(self) -> str:
        if self.ok:
            return "valid"
        kinds = sorted({v.kind for v in self.violations})
        return "; ".join(
            f"{sum(v.kind == k for v in self.violations)} {k} violation(s), worst {self.worst(k):.3g}"
            for k in kinds)


def validate(sset: SequenceSet, problem: DesignProblem | None = None,
             tol: float = NORM_TOL) -> ValidationReport:
    """List every violated invariant of ``sset``; an empty report means valid.

    The modulus check runs when the set is flagged unimodular or the problem
    asks for unimodular pilots.
    """
    out = []
    if problem is not None:
        expected = (problem.tau, problem.cells, problem.users_per_cell)
        got = (sset.tau, sset.cells, sset.users_per_cell)
        for name, e, g in zip(("tau", "cells", "users_per_cell"), expected, got):
            if e != g:
                out.append(Violation("dimension", (name,), float(g - e)))
        if out:
            return ValidationReport(tuple(out))

    norms = np.sum(np.abs(sset.data) ** 2, axis=0)
    for n in np.flatnonzero(np.abs(norms - 1.0) > tol):
        out.append(Violation("norm", (int(n),), float(norms[n] - 1.0)))

    if sset.unimodular or (problem is not None and problem.unimodular):
        mod = np.abs(sset.data) ** 2 - 1.0 / sset.tau
        for t, n in zip(*np.nonzero(np.abs(mod) > tol)):
            out.append(Violation("modulus", (int(t), int(n)), float(mod[t, n])))
    return ValidationReport(tuple(out))
