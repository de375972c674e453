"""ETSC minimization by double majorization-minimization.

The stacked variable ``x`` of length ``tau*N`` is held as an ``(N, tau)``
array whose row ``n`` is pilot ``x_n``; the pilot matrix is ``x.T``.

Each iteration builds the ``N x N`` surrogate ``C = W * conj(x_i^H x_j)``
(so that the quadratic term of the inner majorizer is ``C kron I_tau``),
forms

    y = -(C kron I) x + (N*tau + lambda_max(C)) x

and projects ``y`` blockwise onto the feasible set.  The outer majorizer's
eigenvalue is fixed at ``tau`` for every unit-diagonal weight matrix, so no
eigen-solve of the large quartic-form matrix is ever needed.
"""

from __future__ import annotations

import enum
import time
from dataclasses import dataclass, field, replace

import numpy as np

from .model import (Acceleration, Constraint, DesignProblem, InterferenceMatrix,
                    SequenceSet)

DENSE_EIG_MAX_N = 512
POWER_TOL = 1e-8
POWER_MAX_SWEEPS = 500
POWER_SAFETY = 1.01
ZERO_BLOCK_NORM = 1e-14


class Termination(str, enum.Enum):
    EPSILON = "Epsilon"
    MAX_ITERATIONS = "MaxIterations"


@dataclass(frozen=True, eq=False)
class MmState:
    x: np.ndarray          # (N, tau)
    iteration: int
    lambda1: float
    lambda2: float         # value used to produce this iterate (nan for the start)
    objective: float
    gram: np.ndarray       # x_i^H x_j, cached for the next step
    eigvec: np.ndarray | None = None

    @property
    def stacked(self) -> np.ndarray:
        return self.x.reshape(-1)

    def to_sequence_set(self, cells: int, users: int, unimodular: bool = False) -> SequenceSet:
        return SequenceSet(self.x.T, cells, users, unimodular=unimodular)


@dataclass
class OptimizerTrace:
    objectives: list = field(default_factory=list)
    elapsed: list = field(default_factory=list)
    termination: Termination | None = None
    wall_time: float = 0.0
    seed: int = 0
    map_evaluations: int = 0
    fallbacks: int = 0

    @property
    def iterations(self) -> int:
        return len(self.objectives) - 1

    def to_csv(self) -> str:
        lines = ["iteration,etsc,elapsed_seconds"]
        lines += [f"{i},{f!r},{t!r}" for i, (f, t) in enumerate(zip(self.objectives, self.elapsed))]
        return "\n".join(lines) + "\n"


def weight_matrix(B: InterferenceMatrix, users: int) -> np.ndarray:
    """``W = B kron ones(K, K)``, i.e. ``W[m, n] = beta[m // K, n // K]``."""
    return np.kron(B.entries, np.ones((users, users)))


def _gram(x: np.ndarray) -> np.ndarray:
    return x.conj() @ x.T


def _objective(w: np.ndarray, gram: np.ndarray) -> float:
    return float(np.sum(w * (gram.real ** 2 + gram.imag ** 2)))


def _gershgorin_upper(c: np.ndarray) -> float:
    return float(np.max(np.abs(c).sum(axis=1)))


def _power_lambda_max(c: np.ndarray, start: np.ndarray | None) -> tuple[float, np.ndarray]:
    """Upper estimate of the largest eigenvalue of Hermitian ``c``.

    Iterates on ``c + shift*I`` with a Gershgorin shift making it PSD, so the
    dominant eigenpair is the algebraically largest one.  The Rayleigh quotient
    is inflated by a safety factor; an unconverged run falls back to the
    Gershgorin row-sum bound.
    """
    n = c.shape[0]
    radii = np.abs(c).sum(axis=1) - np.abs(np.diag(c))
    shift = max(0.0, float(np.max(radii - np.diag(c).real)))
    v = np.ones(n, dtype=complex) if start is None else start.astype(complex)
    v = v / np.linalg.norm(v)
    rq = np.inf
    for _ in range(POWER_MAX_SWEEPS):
        u = c @ v + shift * v
        new_rq = float(np.vdot(v, u).real)
        v = u / np.linalg.norm(u)
        if abs(new_rq - rq) <= POWER_TOL * max(1.0, abs(new_rq)):
            return (new_rq - shift) * POWER_SAFETY, v
        rq = new_rq
    return _gershgorin_upper(c), v


def _lambda_max(c: np.ndarray, start=None) -> tuple[float, np.ndarray | None]:
    if c.shape[0] <= DENSE_EIG_MAX_N:
        return float(np.linalg.eigvalsh(c)[-1]), None
    return _power_lambda_max(c, start)


def lambda2_of(sset: SequenceSet, B: InterferenceMatrix) -> tuple[float, np.ndarray]:
    """Largest eigenvalue of the inner surrogate and the ``N x N`` surrogate itself.

    The full ``tau*N`` square matrix equals ``surrogate kron I_tau`` and shares
    its largest eigenvalue.
    """
    w = weight_matrix(B, sset.users_per_cell)
    surrogate = w * _gram(sset.data.T).conj()
    lam, _ = _lambda_max(surrogate)
    return lam, surrogate


def y_vector(x: np.ndarray, surrogate: np.ndarray, lambda2: float, tau: int | None = None) -> np.ndarray:
    """Blockwise ``y_n = -sum_m C[n, m] x_m + (N*tau + lambda2) x_n``.

    ``x`` is ``(N, tau)``; a flat stacked vector is accepted when ``tau`` is given.
    """
    flat = x.ndim == 1
    if flat:
        x = x.reshape(-1, tau)
    n, t = x.shape
    y = (n * t + lambda2) * x - surrogate @ x
    return y.reshape(-1) if flat else y


def project_unit_norm(y: np.ndarray, previous: np.ndarray | None = None) -> np.ndarray:
    """Normalize each row of ``y``; near-zero rows keep the previous block."""
    norms = np.linalg.norm(y, axis=1)
    small = norms < ZERO_BLOCK_NORM
    out = y / np.where(small, 1.0, norms)[:, None]
    if np.any(small):
        if previous is None:
            raise ValueError("zero block and no previous iterate to fall back on")
        out[small] = previous[small]
    return out


def project_unimodular(y: np.ndarray) -> np.ndarray:
    """Unit phase of every entry scaled to modulus ``1/sqrt(tau)``; zeros map to phase 0."""
    tau = y.shape[-1]
    return np.exp(1j * np.angle(y)) / np.sqrt(tau)


class _Engine:
    """Precomputed per-problem quantities for the MM map."""

    def __init__(self, problem: DesignProblem):
        self.problem = problem
        self.tau = problem.tau
        self.n = problem.n_users
        self.w = weight_matrix(problem.B, problem.users_per_cell)
        self.unimodular = problem.unimodular

    def project(self, y, previous):
        if self.unimodular:
            return project_unimodular(y)
        return project_unit_norm(y, previous)

    def state(self, x, iteration=0, lambda2=float("nan"), eigvec=None) -> MmState:
        g = _gram(x)
        return MmState(x, iteration, float(self.tau), lambda2, _objective(self.w, g), g, eigvec)

    def map(self, s: MmState) -> MmState:
        surrogate = self.w * s.gram.conj()
        lam2, vec = _lambda_max(surrogate, s.eigvec)
        y = y_vector(s.x, surrogate, lam2)
        x = self.project(y, s.x)
        return self.state(x, s.iteration + 1, lam2, vec)


def initial_state(problem: DesignProblem, rng: np.random.Generator | None = None) -> MmState:
    """Random feasible start drawn from a Philox generator seeded by the problem."""
    if rng is None:
        rng = make_rng(problem.optimizer.seed)
    n, tau = problem.n_users, problem.tau
    if problem.unimodular:
        x = np.exp(2j * np.pi * rng.random((n, tau))) / np.sqrt(tau)
    else:
        x = rng.standard_normal((n, tau)) + 1j * rng.standard_normal((n, tau))
        x /= np.linalg.norm(x, axis=1, keepdims=True)
    return _Engine(problem).state(x)


def state_from_set(problem: DesignProblem, sset: SequenceSet) -> MmState:
    if sset.tau != problem.tau or sset.n_users != problem.n_users:
        raise ValueError("sequence set does not match the problem dimensions")
    return _Engine(problem).state(np.ascontiguousarray(sset.data.T))


def make_rng(seed: int) -> np.random.Generator:
    """Philox-4x64 counter-based generator keyed from ``seed``."""
    return np.random.Generator(np.random.Philox(int(seed)))


def step(state: MmState, problem: DesignProblem) -> MmState:
    """One plain MM iteration."""
    return _Engine(problem).map(state)


def _squarem(engine: _Engine, s0: MmState) -> tuple[MmState, int, bool]:
    """SQUAREM-1 extrapolation around two MM maps.

    Returns the new state, the number of MM maps evaluated and whether the
    safeguard fell back to the plain double step.
    """
    s1 = engine.map(s0)
    s2 = engine.map(s1)
    r = s1.x - s0.x
    v = s2.x - s1.x - r
    nv = np.linalg.norm(v)
    if not nv > 0:
        return replace(s2, iteration=s0.iteration + 1), 2, True
    alpha = min(-np.linalg.norm(r) / nv, -1.0)
    xp = s0.x - 2.0 * alpha * r + alpha * alpha * v
    xp = engine.project(xp, s2.x)
    s3 = engine.map(engine.state(xp, eigvec=s2.eigvec))
    if s3.objective > s0.objective:
        return replace(s2, iteration=s0.iteration + 1), 3, True
    return replace(s3, iteration=s0.iteration + 1), 3, False


def squarem_step(state: MmState, problem: DesignProblem) -> MmState:
    """One accelerated step; never increases the objective."""
    return _squarem(_Engine(problem), state)[0]


def solve(problem: DesignProblem, initial: SequenceSet | None = None,
          callback=None) -> tuple[SequenceSet, OptimizerTrace]:
    """Run the optimizer until the squared step falls below epsilon or the
    iteration budget is spent."""
    opts = problem.optimizer
    engine = _Engine(problem)
    s = state_from_set(problem, initial) if initial is not None else initial_state(problem)
    trace = OptimizerTrace(objectives=[s.objective], elapsed=[0.0], seed=int(opts.seed))
    accelerate = opts.acceleration is Acceleration.SQUAREM
    t0 = time.perf_counter()
    trace.termination = Termination.MAX_ITERATIONS
    for _ in range(opts.max_iterations):
        if accelerate:
            new, maps, fell_back = _squarem(engine, s)
            trace.map_evaluations += maps
            trace.fallbacks += fell_back
        else:
            new = engine.map(s)
            trace.map_evaluations += 1
        moved = float(np.sum(np.abs(new.x - s.x) ** 2))
        s = new
        trace.objectives.append(s.objective)
        trace.elapsed.append(time.perf_counter() - t0)
        if callback is not None:
            callback(s)
        if moved <= opts.epsilon:
            trace.termination = Termination.EPSILON
            break
    trace.wall_time = time.perf_counter() - t0
    unimodular = problem.constraint is Constraint.UNIMODULAR
    return s.to_sequence_set(problem.cells, problem.users_per_cell, unimodular), trace
