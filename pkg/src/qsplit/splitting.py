"""Masked splitting with linearization and damping.

The couplings are split as ``A = A_quad + A_lin`` where ``A_quad`` keeps only
the entries on a randomly permuted hardware mask. Each step solves

    argmin_s  s^T A_quad s + <b + 2 A_lin s_prev, s> - lam <s, s_prev>

with a hardware-restricted sampler, so only couplings the hardware supports
are ever handed to it. The damping weight ``lam`` is scanned over the values
at which the linear term changes sign.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .ising import IsingModel, apply_diagonal_shift, as_spins, energy
from .subsolver import Sampler, SimulatedAnnealingSampler, brute_force_solve
from .topology import HardwareMask, check_permutation, permuted_mask, random_permutation
from .trace import Trace


@dataclass(frozen=True, eq=False)
class SplitPair:
    """``a_quad + a_lin == A``; ``bias`` is the model's linear term."""

    a_quad: np.ndarray
    a_lin: np.ndarray
    bias: np.ndarray


@dataclass(frozen=True)
class LambdaMode:
    kind: str = "scan"
    value: float = 0.0

    @classmethod
    def parse(cls, text: str) -> "LambdaMode":
        """``scan``, ``fixed:<v>``, ``monotone`` or ``zero``."""
        kind, _, arg = text.strip().lower().partition(":")
        if kind == "fixed":
            v = float(arg)
            if v < 0:
                raise ValueError("fixed lambda must be >= 0")
            return cls("fixed", v)
        if kind in ("scan", "monotone", "zero") and not arg:
            return cls(kind)
        raise ValueError(f"unknown lambda mode {text!r}")

    def __str__(self) -> str:
        return f"fixed:{self.value:g}" if self.kind == "fixed" else self.kind


@dataclass(frozen=True)
class SplitConfig:
    maxiter: int = 10
    maxsubiter: int = 15
    lambda_mode: LambdaMode = field(default_factory=LambdaMode)
    include_gradient_factor_two: bool = True
    diagonal_shift: float = 0.0
    max_calls: int | None = None
    seed: int = 0

    def __post_init__(self) -> None:
        if isinstance(self.lambda_mode, str):
            object.__setattr__(self, "lambda_mode", LambdaMode.parse(self.lambda_mode))
        if self.maxiter < 0:
            raise ValueError("maxiter must be >= 0")
        if self.maxsubiter < 1:
            raise ValueError("maxsubiter must be >= 1")

    @property
    def gradient_factor(self) -> float:
        return 2.0 if self.include_gradient_factor_two else 1.0


@dataclass(frozen=True, eq=False)
class IterationState:
    s_current: np.ndarray
    best_s: np.ndarray
    best_energy: float
    k: int = 0


def split(model: IsingModel, mask: HardwareMask, p) -> SplitPair:
    """Keep the couplings on the permuted mask ``M'[i, j] = M[p[i], p[j]]``."""
    if mask.n != model.n:
        raise ValueError(f"mask has {mask.n} nodes, model has {model.n}")
    pm = permuted_mask(mask, check_permutation(p, model.n))
    a_quad = np.zeros_like(model.A)
    i, j = pm.edges[:, 0], pm.edges[:, 1]
    a_quad[i, j] = model.A[i, j]
    a_quad[j, i] = model.A[j, i]
    return SplitPair(a_quad, model.A - a_quad, model.b)


def linear_term(pair: SplitPair, s_prev, gradient_factor: float = 2.0) -> np.ndarray:
    """The damping-free linear coefficient ``b + 2 A_lin s_prev``."""
    return pair.bias + gradient_factor * (pair.a_lin @ s_prev)


def linearized_subproblem(pair: SplitPair, s_prev, lam: float, gradient_factor: float = 2.0) -> tuple[np.ndarray, np.ndarray]:
    if lam < 0:
        raise ValueError("lambda must be >= 0")
    s_prev = as_spins(s_prev, pair.a_lin.shape[0])
    return pair.a_quad, linear_term(pair, s_prev, gradient_factor) - lam * s_prev


def lambda_candidates(pair: SplitPair, s_prev, maxsubiter: int, gradient_factor: float = 2.0) -> list[float]:
    """Damping weights halfway between consecutive sorted ``|L|`` values.

    ``|L|`` is padded with 0 below and twice its maximum above, duplicates
    are dropped, and every ``ceil(len / maxsubiter)``-th candidate is kept
    starting from the smallest.
    """
    if maxsubiter < 1:
        raise ValueError("maxsubiter must be >= 1")
    s_prev = as_spins(s_prev, pair.a_lin.shape[0])
    v = np.sort(np.abs(linear_term(pair, s_prev, gradient_factor)))
    v = np.concatenate(([0.0], v, [2.0 * v[-1]]))
    mids = np.unique((v[:-1] + v[1:]) / 2.0)
    step = math.ceil(len(mids) / maxsubiter)
    return [float(x) for x in mids[::step]]


def monotone_lambda(pair: SplitPair, max_iter: int = 1000, rtol: float = 1e-12) -> float:
    """``2 ||A_lin||_2`` by power iteration on ``A_lin^T A_lin``.

    With an exact subproblem solver this damping makes the energy of the
    iterates non-increasing.
    """
    A = pair.a_lin
    n = A.shape[0]
    if not np.any(A):
        return 0.0
    # deterministic start with components along every axis
    x = 1.0 + np.arange(n) / (n + 1.0)
    x /= np.linalg.norm(x)
    mu = 0.0
    for _ in range(max_iter):
        y = A.T @ (A @ x)
        new_mu = float(x @ y)
        norm = np.linalg.norm(y)
        if norm == 0.0:
            return 0.0
        x = y / norm
        if abs(new_mu - mu) <= rtol * abs(new_mu):
            mu = new_mu
            break
        mu = new_mu
    return 2.0 * math.sqrt(mu)


def linearization_gap(pair_or_alin, s, s_prev) -> float:
    """Error of the first-order model of ``s^T A_lin s`` around ``s_prev``."""
    A = pair_or_alin.a_lin if isinstance(pair_or_alin, SplitPair) else np.asarray(pair_or_alin)
    s = np.asarray(s, dtype=np.float64)
    sp = np.asarray(s_prev, dtype=np.float64)
    return float(s @ A @ s - sp @ A @ sp - 2.0 * sp @ A @ (s - sp))


def linearization_gap_quadratic(pair_or_alin, s, s_prev) -> float:
    """Closed form ``(s - s_prev)^T A_lin (s - s_prev)`` of :func:`linearization_gap`."""
    A = pair_or_alin.a_lin if isinstance(pair_or_alin, SplitPair) else np.asarray(pair_or_alin)
    d = np.asarray(s, dtype=np.float64) - np.asarray(s_prev, dtype=np.float64)
    return float(d @ A @ d)


def default_sampler() -> Sampler:
    return SimulatedAnnealingSampler()


def _seed(rng: np.random.Generator) -> int:
    return int(rng.integers(2**63))


def split_step(
    model: IsingModel,
    mask: HardwareMask,
    state: IterationState,
    cfg: SplitConfig,
    rng: np.random.Generator,
    sampler: Sampler | None = None,
    trace: Trace | None = None,
) -> IterationState:
    """One outer iteration: draw a permutation, then try the damping weights.

    In ``scan`` and ``zero`` modes the next iterate is the best of the
    previous one and all tried candidates (equal energy replaces). In
    ``fixed`` and ``monotone`` modes it is the single sampler result.
    """
    sampler = sampler or default_sampler()
    mode = cfg.lambda_mode
    split_model = apply_diagonal_shift(model, cfg.diagonal_shift)
    k = state.k + 1
    s_prev = state.s_current
    best_s, best_e = state.best_s, state.best_energy
    iter_s, iter_e = s_prev, energy(model, s_prev)
    guarded = mode.kind in ("scan", "zero")
    calls_left = math.inf if cfg.max_calls is None or trace is None else cfg.max_calls - trace.solver_calls

    pair = split(split_model, mask, random_permutation(model.n, rng))
    if mode.kind == "scan":
        lambdas = lambda_candidates(pair, s_prev, cfg.maxsubiter, cfg.gradient_factor)
    elif mode.kind == "zero":
        lambdas = [0.0] * cfg.maxsubiter
    elif mode.kind == "monotone":
        lambdas = [monotone_lambda(pair)]
    else:
        lambdas = [mode.value]

    for sub, lam in enumerate(lambdas):
        if sub >= calls_left:
            break
        if mode.kind == "zero" and sub > 0:
            pair = split(split_model, mask, random_permutation(model.n, rng))
        t0 = time.perf_counter()
        B, c = linearized_subproblem(pair, s_prev, lam, cfg.gradient_factor)
        s_new = as_spins(sampler.solve(B, c, seed=_seed(rng)), model.n)
        e_new = energy(model, s_new)
        wall = (time.perf_counter() - t0) * 1e3
        if e_new <= best_e:
            best_s, best_e = s_new, e_new
        if not guarded:
            iter_s, iter_e = s_new, e_new
        elif e_new <= iter_e:
            iter_s, iter_e = s_new, e_new
        if trace is not None:
            trace.add(k, sub, lam, e_new, best_e, wall)
    return IterationState(iter_s, best_s, best_e, k)


def initial_state(model: IsingModel, rng: np.random.Generator) -> IterationState:
    s0 = rng.choice(np.array([-1.0, 1.0]), size=model.n)
    e0 = energy(model, s0)
    return IterationState(s0, s0, e0, 0)


def run_splitting(
    model: IsingModel,
    mask: HardwareMask,
    cfg: SplitConfig = SplitConfig(),
    sampler: Sampler | None = None,
    callback: Callable[[IterationState], None] | None = None,
) -> tuple[IterationState, Trace]:
    """Iterate :func:`split_step` from a seeded random start.

    Stops after ``cfg.maxiter`` outer iterations or ``cfg.max_calls`` sampler
    calls, whichever comes first.
    """
    if mask.n != model.n:
        raise ValueError(f"mask has {mask.n} nodes, model has {model.n}; see topology.mask_for_problem")
    rng = np.random.default_rng(cfg.seed)
    state = initial_state(model, rng)
    trace = Trace()
    trace.add(0, 0, None, state.best_energy, state.best_energy, 0.0)
    for _ in range(cfg.maxiter):
        if cfg.max_calls is not None and trace.solver_calls >= cfg.max_calls:
            break
        state = split_step(model, mask, state, cfg, rng, sampler, trace)
        if callback is not None:
            callback(state)
    return state, trace


# --- simulated-annealing-like regularization (experimental) --------------------

def log_temperature(c: float, k: int) -> float:
    if k < 1:
        raise ValueError("k must be >= 1")
    return c / math.log1p(k)


def sa_reg_weight(delta_e: float, temperature: float, r: float) -> float:
    """Coefficient ``exp(-dE / T) - R`` of ``s_i s_prev_i`` in the regularized step."""
    return math.exp(min(-delta_e / temperature, 700.0)) - r


def sa_reg_step(
    model: IsingModel,
    state: IterationState,
    temperature_c: float,
    k: int,
    rng: np.random.Generator,
    subset_size: int | None = None,
    sampler: Sampler | None = None,
    j_set=None,
) -> IterationState:
    """Restricted step with an annealing-style term that may raise the energy.

    A random index set ``J`` is drawn (or taken from ``j_set``); the trial
    neighbor flips all of ``J``. The free variables in ``J`` then minimize the
    true energy plus ``sum_{i in J} (exp(-dE/T) - R) s_i s_prev_i``, which
    pushes towards the flip when the Metropolis-like test passes.
    """
    from .baselines import lnls_subproblem

    n = model.n
    s_prev = state.s_current
    if j_set is None:
        size = subset_size if subset_size is not None else max(1, n // 4)
        j_set = np.sort(rng.choice(n, size=min(size, n), replace=False))
    j_set = np.asarray(j_set, dtype=np.int64)
    if j_set.size == 0:
        return IterationState(s_prev, state.best_s, state.best_energy, state.k + 1)
    s_n = s_prev.copy()
    s_n[j_set] = -s_n[j_set]
    delta = energy(model, s_n) - energy(model, s_prev)
    w = sa_reg_weight(delta, log_temperature(temperature_c, k), float(rng.uniform()))
    B, c = lnls_subproblem(model, s_prev, j_set)
    c = c + w * s_prev[j_set]
    if sampler is None:
        sub = brute_force_solve(B, c)[0] if j_set.size <= 16 else SimulatedAnnealingSampler().solve(B, c, seed=_seed(rng))
    else:
        sub = sampler.solve(B, c, seed=_seed(rng))
    s_new = s_prev.copy()
    s_new[j_set] = sub
    e_new = energy(model, s_new)
    if e_new <= state.best_energy:
        return IterationState(s_new, s_new, e_new, state.k + 1)
    return IterationState(s_new, state.best_s, state.best_energy, state.k + 1)


__all__ = [
    "IterationState",
    "LambdaMode",
    "SplitConfig",
    "SplitPair",
    "initial_state",
    "lambda_candidates",
    "linear_term",
    "linearization_gap",
    "linearization_gap_quadratic",
    "linearized_subproblem",
    "monotone_lambda",
    "run_splitting",
    "sa_reg_step",
    "sa_reg_weight",
    "split",
    "split_step",
]
