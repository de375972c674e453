"""Monte-Carlo simulation of uplink training with LS channel estimation."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .metrics import sum_mse_analytic
from .model import InterferenceMatrix, SequenceSet

# trials are drawn in fixed-size chunks so a trial's random draws sit at a
# fixed position of its grid point's stream regardless of the total count
CHUNK = 1024


@dataclass(frozen=True)
class SimulationConfig:
    set: SequenceSet
    B: InterferenceMatrix
    sigma_sq_grid: tuple
    trials: int
    seed: int

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        grid = tuple(float(s) for s in self.sigma_sq_grid)
        if not grid or any(not s >= 0 for s in grid):
            raise ValueError("noise variances must be a non-empty list of values >= 0")
        if self.B.order != self.set.cells:
            raise ValueError(f"B has order {self.B.order} but the set has {self.set.cells} cells")
        object.__setattr__(self, "sigma_sq_grid", grid)


@dataclass(frozen=True)
class SimulationPoint:
    sigma_sq: float
    empirical: float
    standard_error: float
    analytic: float
    trials: int
    empirical_per_user: float

    @property
    def z_score(self) -> float:
        diff = self.empirical - self.analytic
        if self.standard_error == 0:
            return 0.0 if diff == 0 else math.copysign(math.inf, diff)
        return diff / self.standard_error


@dataclass(frozen=True)
class SimulationReport:
    points: tuple

    def within(self, n_sigma: float = 3.0) -> bool:
        return all(abs(p.empirical - p.analytic) <= n_sigma * p.standard_error for p in self.points)


def cn(rng: np.random.Generator, shape) -> np.ndarray:
    """Circularly-symmetric CN(0, 1) samples."""
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / math.sqrt(2.0)


def received_pilot(sset: SequenceSet, B: InterferenceMatrix, channels, noise, j: int) -> np.ndarray:
    """Signal at base station ``j``.

    ``channels[jb, k]`` is the coefficient from user ``k`` of cell ``jb`` to BS
    ``j``; a full ``(J, J, K)`` array indexed ``[j, jb, k]`` is also accepted.
    """
    h = np.asarray(channels)
    if h.ndim == 3:
        h = h[j]
    J, K = sset.cells, sset.users_per_cell
    if h.shape != (J, K):
        raise ValueError(f"channels for one BS must have shape {(J, K)}, got {h.shape}")
    noise = np.asarray(noise)
    if noise.shape != (sset.tau,):
        raise ValueError(f"noise must have length {sset.tau}")
    gains = (np.sqrt(B.entries[j])[:, None] * h).reshape(-1)
    return sset.data @ gains + noise


def ls_estimate(sset: SequenceSet, y, j: int, k: int) -> complex:
    """Matched-filter LS estimate ``s_{j,k}^H y_j``."""
    return complex(np.vdot(sset.pilot(j, k), y))


def _trial_errors(sset: SequenceSet, B: InterferenceMatrix, rng, n: int, sigma: float) -> np.ndarray:
    J, K, tau = sset.cells, sset.users_per_cell, sset.tau
    sb = sset.blocks()                           # (J, tau, K)
    h = cn(rng, (n, J, J, K))                     # [trial, bs, cell, user]
    noise = cn(rng, (n, J, tau))
    y = np.einsum("jb,btk,njbk->njt", np.sqrt(B.entries), sb, h) + sigma * noise
    est = np.einsum("jtk,njt->njk", sb.conj(), y)
    own = h[:, np.arange(J), np.arange(J), :]     # h_{j,j,k}
    return np.sum(np.abs(own - est) ** 2, axis=(1, 2))


def run_monte_carlo(config: SimulationConfig) -> SimulationReport:
    """Empirical LS sum MSE per noise level, with the analytic prediction."""
    sset, B = config.set, config.B
    points = []
    for g, sigma_sq in enumerate(config.sigma_sq_grid):
        rng = np.random.Generator(np.random.Philox(np.random.SeedSequence([int(config.seed), g])))
        errs = []
        left = config.trials
        while left > 0:
            n = min(CHUNK, left)
            # a full chunk is always drawn so the stream layout never depends on `trials`
            errs.append(_trial_errors(sset, B, rng, CHUNK, math.sqrt(sigma_sq))[:n])
            left -= n
        e = np.concatenate(errs)
        mean = float(np.mean(e))
        se = float(np.std(e, ddof=1) / math.sqrt(e.size)) if e.size > 1 else 0.0
        points.append(SimulationPoint(sigma_sq, mean, se, sum_mse_analytic(sset, B, sigma_sq),
                                      int(e.size), mean / sset.n_users))
    return SimulationReport(tuple(points))


def report_csv(reports: dict) -> str:
    """CSV rows ``sigmaSq,setLabel,empiricalMse,stderr,analyticMse,empiricalMsePerUser``."""
    lines = ["sigmaSq,setLabel,empiricalMse,stderr,analyticMse,empiricalMsePerUser"]
    for label, rep in reports.items():
        for p in rep.points:
            lines.append(f"{p.sigma_sq!r},{label},{p.empirical!r},{p.standard_error!r},"
                         f"{p.analytic!r},{p.empirical_per_user!r}")
    return "\n".join(lines) + "\n"
