"""Comparison methods: large-neighborhood local search and k-Opt descent."""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .ising import IsingModel, as_spins, energy
from .splitting import IterationState, initial_state
from .subsolver import Sampler, SimulatedAnnealingSampler
from .trace import Trace


@dataclass(frozen=True)
class LnlsConfig:
    m: int = 10
    maxiter: int = 25
    seed: int = 0


def lnls_subproblem(model: IsingModel, s_prev, j_set) -> tuple[np.ndarray, np.ndarray]:
    """Objective over the spins in ``j_set`` with every other spin frozen.

    Returns ``(B, c)`` with ``B = A[J, J]`` and
    ``c_i = b_i + 2 sum_{j not in J} A_ij s_prev_j``; the full energy equals
    ``s_J^T B s_J + c^T s_J`` plus a constant depending only on the frozen spins.
    """
    s_prev = as_spins(s_prev, model.n)
    J = np.asarray(j_set, dtype=np.int64)
    free = np.zeros(model.n, dtype=bool)
    free[J] = True
    B = model.A[np.ix_(J, J)]
    c = model.b[J] + 2.0 * model.A[np.ix_(J, ~free)] @ s_prev[~free]
    return B, c


def lnls_constant(model: IsingModel, s_prev, j_set) -> float:
    """Energy contribution of the frozen spins (the constant dropped by :func:`lnls_subproblem`)."""
    s_prev = as_spins(s_prev, model.n)
    fixed = np.ones(model.n, dtype=bool)
    fixed[np.asarray(j_set, dtype=np.int64)] = False
    sf = s_prev[fixed]
    return float(sf @ model.A[np.ix_(fixed, fixed)] @ sf + model.b[fixed] @ sf + model.offset)


def lnls_step(model: IsingModel, s_prev: np.ndarray, j_set, sampler: Sampler, seed: int | None = None) -> np.ndarray:
    J = np.asarray(j_set, dtype=np.int64)
    if J.size == 0:
        return s_prev.copy()
    B, c = lnls_subproblem(model, s_prev, J)
    s_new = s_prev.copy()
    s_new[J] = as_spins(sampler.solve(B, c, seed=seed), J.size)
    return s_new


def lnls_run(
    model: IsingModel,
    cfg: LnlsConfig = LnlsConfig(),
    sampler: Sampler | None = None,
) -> tuple[IterationState, Trace]:
    """Resample a uniform ``m``-subset every iteration and re-optimize it."""
    if not 1 <= cfg.m <= model.n:
        raise ValueError(f"subproblem size m={cfg.m} outside [1, {model.n}]")
    sampler = sampler or SimulatedAnnealingSampler()
    rng = np.random.default_rng(cfg.seed)
    state = initial_state(model, rng)
    trace = Trace()
    trace.add(0, 0, None, state.best_energy, state.best_energy, 0.0)
    s, best_s, best_e = state.s_current, state.best_s, state.best_energy
    for k in range(1, cfg.maxiter + 1):
        t0 = time.perf_counter()
        J = np.sort(rng.choice(model.n, size=cfg.m, replace=False))
        s = lnls_step(model, s, J, sampler, seed=int(rng.integers(2**63)))
        e = energy(model, s)
        if e <= best_e:
            best_s, best_e = s, e
        trace.add(k, 0, None, e, best_e, (time.perf_counter() - t0) * 1e3)
    return IterationState(s, best_s, best_e, cfg.maxiter), trace


def flip_deltas(model: IsingModel, s: np.ndarray) -> np.ndarray:
    """Energy change of every single flip."""
    offdiag = model.A @ s - np.diag(model.A) * s
    return -4.0 * s * offdiag - 2.0 * model.b * s


def pair_deltas(model: IsingModel, s: np.ndarray, single: np.ndarray | None = None) -> np.ndarray:
    """Energy change of flipping both ``i`` and ``j`` (valid for ``i != j``)."""
    d = flip_deltas(model, s) if single is None else single
    return d[:, None] + d[None, :] + 8.0 * model.A * np.outer(s, s)


def k_opt(model: IsingModel, s_start, k: int = 1, max_scans: int | None = None) -> tuple[np.ndarray, Trace]:
    """Steepest descent over all vectors within Hamming distance ``k``.

    Each scan evaluates every neighbor via deltas and moves to the best one,
    ties broken by neighbor index (single flips first, then pairs ``i < j``
    in row order). A move is only taken when the recomputed energy is
    strictly lower, so the result is a ``k``-flip local optimum.
    """
    if k not in (1, 2):
        raise ValueError("k must be 1 or 2")
    s = as_spins(s_start, model.n).copy()
    e = energy(model, s)
    trace = Trace()
    trace.add(0, 0, None, e, e, 0.0)
    n = model.n
    iu, ju = np.triu_indices(n, k=1)
    scan = 0
    while max_scans is None or scan < max_scans:
        t0 = time.perf_counter()
        d1 = flip_deltas(model, s)
        cands = d1
        if k == 2 and n > 1:
            cands = np.concatenate([d1, pair_deltas(model, s, d1)[iu, ju]])
        best = int(np.argmin(cands))
        if not cands[best] < 0:
            break
        trial = s.copy()
        if best < n:
            trial[best] = -trial[best]
        else:
            p = best - n
            trial[[iu[p], ju[p]]] *= -1.0
        e_trial = energy(model, trial)
        if not e_trial < e:
            break
        scan += 1
        s, e = trial, e_trial
        trace.add(scan, 0, None, e, e, (time.perf_counter() - t0) * 1e3)
    return s, trace


def k_opt_run(model: IsingModel, k: int, seed: int = 0, max_scans: int | None = None) -> tuple[IterationState, Trace]:
    """:func:`k_opt` from a seeded random start."""
    rng = np.random.default_rng(seed)
    start = initial_state(model, rng)
    s, trace = k_opt(model, start.s_current, k, max_scans)
    e = energy(model, s)
    return IterationState(s, s, e, trace.solver_calls), trace
