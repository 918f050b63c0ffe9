"""Inner solvers ``S(B, c) = argmin_s s^T B s + c^T s`` over spins.

Any object with a ``solve(B, c, seed=None) -> ndarray`` method can be used as
a sampler by the splitting and LNLS drivers; this is where a hardware client
would plug in. Two classical samplers ship here: seeded simulated annealing
and exhaustive search.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Protocol

import numba
import numpy as np

from .ising import EQUAL_TOL, IsingModel, energy
from .topology import HardwareMask

BRUTE_FORCE_MAX_N = 26
_CHUNK_BITS = 16


@dataclass(frozen=True)
class SolverConfig:
    num_reads: int = 100
    sweeps: int = 1000
    beta_start: float = 0.1
    beta_end: float = 10.0
    schedule: str = "geometric"
    seed: int = 0

    def __post_init__(self) -> None:
        if self.num_reads < 1 or self.sweeps < 1:
            raise ValueError("num_reads and sweeps must be >= 1")
        if not 0 < self.beta_start < self.beta_end:
            raise ValueError("need 0 < beta_start < beta_end")
        if self.schedule not in ("geometric", "linear"):
            raise ValueError(f"unknown beta schedule {self.schedule!r}")

    def betas(self) -> np.ndarray:
        if self.sweeps == 1:
            return np.array([self.beta_end])
        if self.schedule == "geometric":
            return np.geomspace(self.beta_start, self.beta_end, self.sweeps)
        return np.linspace(self.beta_start, self.beta_end, self.sweeps)


class Sampler(Protocol):
    def solve(self, B: np.ndarray, c: np.ndarray, seed: int | None = None) -> np.ndarray: ...


def _check(B, c) -> tuple[np.ndarray, np.ndarray]:
    B = np.asarray(B, dtype=np.float64)
    c = np.asarray(c, dtype=np.float64).reshape(-1)
    if B.ndim != 2 or B.shape[0] != B.shape[1]:
        raise ValueError(f"B must be square, got shape {B.shape}")
    if B.shape[0] != c.shape[0]:
        raise ValueError(f"B is {B.shape[0]}x{B.shape[0]} but c has length {c.shape[0]}")
    return B, c


def sign_solve(c) -> np.ndarray:
    """Exact minimizer of ``c^T s``: ``-sign(c)`` with +1 where ``c == 0``."""
    c = np.asarray(c, dtype=np.float64)
    return np.where(c > 0, -1.0, 1.0)


def _to_csr(B: np.ndarray):
    off = B.copy()
    np.fill_diagonal(off, 0.0)
    rows, cols = np.nonzero(off)
    indptr = np.zeros(B.shape[0] + 1, dtype=np.int64)
    np.add.at(indptr, rows + 1, 1)
    return np.cumsum(indptr), cols.astype(np.int64), off[rows, cols]


@numba.njit(cache=True)
def _anneal(indptr, indices, data, c, betas, read_seeds, out):
    n = c.shape[0]
    num_reads = read_seeds.shape[0]
    field = np.empty(n)
    for r in range(num_reads):
        np.random.seed(read_seeds[r])
        s = out[r]
        for i in range(n):
            s[i] = 1.0 if np.random.random() < 0.5 else -1.0
        for i in range(n):
            h = c[i]
            for p in range(indptr[i], indptr[i + 1]):
                h += 2.0 * data[p] * s[indices[p]]
            field[i] = h
        for beta in betas:
            for i in range(n):
                de = -2.0 * s[i] * field[i]
                if de <= 0.0 or np.random.random() < np.exp(-beta * de):
                    s[i] = -s[i]
                    for p in range(indptr[i], indptr[i + 1]):
                        field[indices[p]] += 4.0 * data[p] * s[i]
        # zero-temperature quench, then zero-field spins go to +1 (energy-neutral)
        changed = True
        while changed:
            changed = False
            for i in range(n):
                if -2.0 * s[i] * field[i] < 0.0:
                    s[i] = -s[i]
                    changed = True
                    for p in range(indptr[i], indptr[i + 1]):
                        field[indices[p]] += 4.0 * data[p] * s[i]
        for i in range(n):
            if field[i] == 0.0 and s[i] < 0.0:
                s[i] = 1.0
                for p in range(indptr[i], indptr[i + 1]):
                    field[indices[p]] += 4.0 * data[p] * s[i]


def read_seeds(seed: int, num_reads: int) -> np.ndarray:
    """Independent per-read seeds derived from ``(seed, read_index)``."""
    ss = np.random.SeedSequence(int(seed) % 2**64)
    return ss.generate_state(num_reads, dtype=np.uint32).astype(np.int64)


def sa_solve(B, c, cfg: SolverConfig = SolverConfig()) -> np.ndarray:
    """Best of ``cfg.num_reads`` Metropolis annealing runs on ``s^T B s + c^T s``.

    Each read starts from random spins, sweeps sequentially over the beta
    schedule, then quenches greedily to a single-flip local minimum. A
    problem without couplings is solved in closed form.
    """
    B, c = _check(B, c)
    n = c.shape[0]
    indptr, indices, data = _to_csr(B)
    if data.size == 0:
        return sign_solve(c)
    samples = np.empty((cfg.num_reads, n))
    _anneal(indptr, indices, data, c, cfg.betas(), read_seeds(cfg.seed, cfg.num_reads), samples)
    e = np.einsum("ij,ij->i", samples @ B, samples) + samples @ c
    return samples[int(np.argmin(e))].copy()


def brute_force_solve(B, c) -> tuple[np.ndarray, float]:
    """Exact minimizer by enumeration; ties go to the lexicographically smallest ``s``."""
    B, c = _check(B, c)
    n = c.shape[0]
    if n > BRUTE_FORCE_MAX_N:
        raise ValueError(f"brute force limited to n <= {BRUTE_FORCE_MAX_N}, got {n}")
    chunk = 1 << min(n, _CHUNK_BITS)
    shifts = np.arange(n - 1, -1, -1, dtype=np.int64)
    best_e, best_idx = np.inf, -1
    for start in range(0, 1 << n, chunk):
        idx = np.arange(start, start + chunk, dtype=np.int64)
        S = 2.0 * ((idx[:, None] >> shifts) & 1) - 1.0
        e = np.einsum("ij,ij->i", S @ B, S) + S @ c
        k = int(np.argmin(e))
        if best_idx < 0 or e[k] < best_e - EQUAL_TOL * max(1.0, abs(best_e)):
            tied = np.nonzero(e <= e[k] + EQUAL_TOL * max(1.0, abs(e[k])))[0]
            best_e, best_idx = float(e[k]), start + int(tied[0])
    s = 2.0 * ((best_idx >> shifts) & 1) - 1.0
    return s, float(s @ B @ s + c @ s)


@dataclass(frozen=True)
class SimulatedAnnealingSampler:
    config: SolverConfig = SolverConfig()

    def solve(self, B, c, seed: int | None = None) -> np.ndarray:
        cfg = self.config if seed is None else replace(self.config, seed=seed)
        return sa_solve(B, c, cfg)


@dataclass(frozen=True)
class BruteForceSampler:
    def solve(self, B, c, seed: int | None = None) -> np.ndarray:
        return brute_force_solve(B, c)[0]


def masked_couplings(A: np.ndarray, mask: HardwareMask) -> np.ndarray:
    """``A ⊙ M``: couplings outside the mask (and the diagonal) set to zero."""
    if mask.n != A.shape[0]:
        raise ValueError(f"mask has {mask.n} nodes, model has {A.shape[0]}")
    out = np.zeros_like(A)
    i, j = mask.edges[:, 0], mask.edges[:, 1]
    out[i, j] = A[i, j]
    out[j, i] = A[j, i]
    return out


def restricted_sa_solve(m: IsingModel, mask: HardwareMask, cfg: SolverConfig = SolverConfig()) -> tuple[np.ndarray, float]:
    """Anneal the mask-truncated objective; report the true energy of the full model."""
    s = sa_solve(masked_couplings(m.A, mask), m.b, cfg)
    return s, energy(m, s)
