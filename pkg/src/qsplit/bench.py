"""Benchmark harness: run (instance, method, seed) cells, aggregate traces."""

from __future__ import annotations

import json
import logging
import math
import os
import time
from collections import defaultdict
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from importlib import resources
from pathlib import Path

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .baselines import LnlsConfig, k_opt_run, lnls_run
from .ising import EQUAL_TOL, energy
from .instances import (
    REG_PREFIX,
    BestKnownTable,
    Instance,
    approximation_ratio,
    load_best_known,
    load_instance,
    reg_ground_state,
    size_predicate,
)
from .splitting import IterationState, LambdaMode, SplitConfig, initial_state, run_splitting
from .subsolver import SimulatedAnnealingSampler, SolverConfig, masked_couplings, sa_solve
from .topology import TopologySpec, mask_for_problem
from .trace import Trace, read_records, trace_records, write_records

log = logging.getLogger(__name__)

METHODS = ("splitting", "lnls", "kopt", "sa-full", "sa-restricted")


def load_defaults(path=None) -> dict:
    text = resources.files("qsplit").joinpath("defaults.toml").read_text()
    cfg = tomllib.loads(text)
    if path is not None:
        user = tomllib.loads(Path(path).read_text())
        for section, values in user.items():
            cfg.setdefault(section, {}).update(values)
    return cfg


@dataclass(frozen=True)
class MethodSpec:
    name: str
    lambda_mode: LambdaMode = field(default_factory=LambdaMode)
    m: int = 10
    k: int = 1

    @property
    def label(self) -> str:
        if self.name == "splitting":
            return "splitting" if self.lambda_mode.kind == "scan" else f"splitting-{self.lambda_mode}"
        if self.name == "lnls":
            return f"lnls-m{self.m}"
        if self.name == "kopt":
            return f"kopt-k{self.k}"
        return self.name


@dataclass(frozen=True)
class RunSpec:
    instances: tuple[str, ...]
    methods: tuple[MethodSpec, ...]
    seeds: tuple[int, ...] = (0,)
    topology: TopologySpec = field(default_factory=lambda: TopologySpec("pegasus"))
    solver: SolverConfig = field(default_factory=SolverConfig)
    maxiter: int = 10
    maxsubiter: int = 15
    include_gradient_factor_two: bool = True
    diagonal_shift: float = 0.0
    method_maxiter: int = 25
    budget: int | None = None
    out: Path | None = None

    def validate(self) -> None:
        if not self.instances:
            raise ValueError("no instances selected")
        if not self.methods:
            raise ValueError("no methods selected")
        for m in self.methods:
            if m.name not in METHODS:
                raise ValueError(f"unknown method {m.name!r}; choose from {', '.join(METHODS)}")
            if m.name == "kopt" and m.k not in (1, 2):
                raise ValueError("kopt needs k in {1, 2}")
            if m.name == "lnls" and m.m < 1:
                raise ValueError("lnls needs m >= 1")
        if self.maxsubiter < 1 or self.maxiter < 0 or self.method_maxiter < 0:
            raise ValueError("iteration counts must be non-negative (maxsubiter >= 1)")
        if self.budget is not None and self.budget < 0:
            raise ValueError("budget must be >= 0")


@dataclass
class CellResult:
    instance: str
    method: str
    seed: int
    n: int | None = None
    kind: str | None = None
    final_energy: float | None = None
    best_energy: float | None = None
    best_objective: float | None = None
    calls: int = 0
    wall_ms: float = 0.0
    error: str | None = None
    records: list = field(default_factory=list, repr=False)


def _run_method(inst: Instance, method: MethodSpec, seed: int, spec: RunSpec) -> tuple[IterationState, Trace]:
    model = inst.model
    sampler = SimulatedAnnealingSampler(spec.solver)
    calls = spec.method_maxiter if spec.budget is None else min(spec.method_maxiter, spec.budget)
    if method.name == "splitting":
        cfg = SplitConfig(
            maxiter=spec.maxiter,
            maxsubiter=spec.maxsubiter,
            lambda_mode=method.lambda_mode,
            include_gradient_factor_two=spec.include_gradient_factor_two,
            diagonal_shift=spec.diagonal_shift,
            max_calls=spec.budget,
            seed=seed,
        )
        return run_splitting(model, mask_for_problem(model.n, spec.topology), cfg, sampler)
    if method.name == "lnls":
        return lnls_run(model, LnlsConfig(m=min(method.m, model.n), maxiter=calls, seed=seed), sampler)
    if method.name == "kopt":
        return k_opt_run(model, method.k, seed=seed, max_scans=calls)
    # sa-full / sa-restricted: independent annealing calls, best so far
    rng = np.random.default_rng(seed)
    state = initial_state(model, rng)
    B = model.A if method.name == "sa-full" else masked_couplings(model.A, mask_for_problem(model.n, spec.topology))
    trace = Trace()
    trace.add(0, 0, None, state.best_energy, state.best_energy, 0.0)
    s, best_s, best_e = state.s_current, state.best_s, state.best_energy
    for k in range(1, calls + 1):
        t0 = time.perf_counter()
        s = sa_solve(B, model.b, replace(spec.solver, seed=int(rng.integers(2**63))))
        e = energy(model, s)
        if e <= best_e:
            best_s, best_e = s, e
        trace.add(k, 0, None, e, best_e, (time.perf_counter() - t0) * 1e3)
    return IterationState(s, best_s, best_e, calls), trace


def run_cell(selector: str, method: MethodSpec, seed: int, spec: RunSpec) -> CellResult:
    res = CellResult(selector, method.label, seed)
    try:
        inst = load_instance(selector)
        res.instance, res.n, res.kind = inst.name, inst.model.n, inst.kind
        t0 = time.perf_counter()
        state, trace = _run_method(inst, method, seed, spec)
        res.wall_ms = (time.perf_counter() - t0) * 1e3
    except Exception as exc:  # recorded per cell; the run continues
        log.warning("cell %s/%s/%d failed: %s", selector, method.label, seed, exc)
        res.error = f"{type(exc).__name__}: {exc}"
        return res
    res.final_energy = energy(inst.model, state.s_current)
    res.best_energy = state.best_energy
    res.best_objective = inst.objective(state.best_energy)
    res.calls = trace.solver_calls
    res.records = list(trace_records(trace, inst.name, inst.model.n, method.label, seed, inst.objective))
    return res


def _run_cell_args(args) -> CellResult:
    return run_cell(*args)


def thread_cap() -> int:
    try:
        return max(1, int(os.environ.get("QSPLIT_THREADS", "1")))
    except ValueError:
        return 1


def cli_run(spec: RunSpec, references: "References | None" = None) -> list[CellResult]:
    """Run every cell; write ``trace.csv`` and ``summary.json`` under ``spec.out``.

    Output order is the cell order (instance, method, seed) regardless of how
    many worker processes were used.
    """
    spec.validate()
    cells = [(sel, m, seed, spec) for sel in spec.instances for m in spec.methods for seed in spec.seeds]
    workers = min(thread_cap(), len(cells))
    out = Path(spec.out) if spec.out is not None else None
    if out is not None:
        out.mkdir(parents=True, exist_ok=True)
    fh = open(out / "trace.csv", "w", newline="") if out is not None else None
    results: list[CellResult] = []
    try:
        if fh is not None:
            write_records(fh, [])
        if workers > 1:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                stream = pool.map(_run_cell_args, cells)
                for res in stream:
                    results.append(_emit(res, fh))
        else:
            for cell in cells:
                results.append(_emit(run_cell(*cell), fh))
    finally:
        if fh is not None:
            fh.close()
    if out is not None:
        refs = references or References()
        (out / "summary.json").write_text(json.dumps(summarize(results, refs), indent=2))
    return results


def _emit(res: CellResult, fh) -> CellResult:
    if fh is not None and res.records:
        write_records(fh, res.records, header=False)
        fh.flush()
    return res


def summarize(results: list[CellResult], refs: "References") -> dict:
    cells = []
    for r in results:
        d = {k: v for k, v in asdict(r).items() if k != "records"}
        d["reference"] = d["ratio"] = None
        if r.error is None:
            ref = refs.get(r.instance)
            if ref is not None:
                d["reference"], kind = ref
                d["ratio"] = approximation_ratio(_achieved(r.best_energy, r.best_objective, kind), ref[0], kind)
        cells.append(d)
    return {"cells": cells, "total_wall_ms": sum(r.wall_ms for r in results)}


def _achieved(best_energy: float, best_objective: float, kind: str) -> float:
    return best_objective if kind == "cut-best" else best_energy


# --- references ------------------------------------------------------------------

class References:
    """Reference values: exact oracle for ``reg:N``, best-known table otherwise."""

    def __init__(self, table: BestKnownTable | None = None):
        self.table = table or BestKnownTable()
        self._reg: dict[str, float] = {}

    @classmethod
    def from_csv(cls, path) -> "References":
        return cls(load_best_known(path))

    def get(self, name: str) -> tuple[float, str] | None:
        if name.startswith(REG_PREFIX):
            if name not in self._reg:
                self._reg[name] = reg_ground_state(int(name[len(REG_PREFIX):]))[1]
            return self._reg[name], "ising-ground"
        if self.table.usable(name):
            return self.table[name], "cut-best"
        return None


def _ratio(rec: dict, ref: tuple[float, str]) -> float:
    value, kind = ref
    return approximation_ratio(_achieved(rec["best_energy"], rec["best_objective"], kind), value, kind)


def _groups(records) -> dict[tuple, list[dict]]:
    g: dict[tuple, list[dict]] = defaultdict(list)
    for rec in records:
        g[(rec["instance"], rec["method"], rec["seed"])].append(rec)
    for rows in g.values():
        rows.sort(key=lambda r: r["call"])
    return g


def _usable_groups(records, refs: References, size_filter: str | None):
    keep = size_predicate(size_filter) if size_filter else None
    missing = set()
    out = {}
    for key, rows in _groups(records).items():
        if keep is not None and not keep(rows[0]["n"]):
            continue
        ref = refs.get(key[0])
        if ref is None:
            missing.add(key[0])
            continue
        out[key] = (rows, ref)
    for name in sorted(missing):
        log.warning("no usable reference for %s; excluded", name)
    return out


def cli_curves(records, refs: References, size_filter: str | None = None) -> list[dict]:
    """Mean approximation ratio per solver call.

    Each (instance, method, seed) sequence is carried forward to the longest
    sequence of its method; seeds are averaged per instance, then instances
    are averaged with equal weight.
    """
    groups = _usable_groups(records, refs, size_filter)
    horizon: dict[str, int] = defaultdict(int)
    for (_, method, _), (rows, _) in groups.items():
        horizon[method] = max(horizon[method], rows[-1]["call"])
    per_instance: dict[tuple[str, str], list[np.ndarray]] = defaultdict(list)
    for (inst, method, _), (rows, ref) in groups.items():
        seq = np.full(horizon[method] + 1, np.nan)
        for r in rows:
            seq[r["call"]] = _ratio(r, ref)
        # carry the last best value forward over missing calls
        for i in range(1, len(seq)):
            if math.isnan(seq[i]):
                seq[i] = seq[i - 1]
        per_instance[(inst, method)].append(seq)
    by_method: dict[str, list[np.ndarray]] = defaultdict(list)
    for (inst, method), seqs in per_instance.items():
        by_method[method].append(np.mean(seqs, axis=0))
    out = []
    for method in sorted(by_method):
        curves = np.array(by_method[method])
        for call in range(curves.shape[1]):
            out.append({"method": method, "iteration": call, "mean_ratio": float(np.mean(curves[:, call])), "n_instances": curves.shape[0]})
    return out


def final_scores(records, refs: References, at_call: int | None = None) -> dict[str, dict[str, float]]:
    """Per instance and method: mean over seeds of the final ratio.

    Instances without a reference fall back to a raw score where larger is
    better: the cut value for edge-list instances, the negated energy for
    Reg instances.
    """
    acc: dict[tuple[str, str], list[float]] = defaultdict(list)
    for (inst, method, _), rows in _groups(records).items():
        last = rows[-1]
        if at_call is not None:
            prior = [r for r in rows if r["call"] <= at_call]
            last = prior[-1] if prior else rows[0]
        ref = refs.get(inst)
        if ref is not None:
            acc[(inst, method)].append(_ratio(last, ref))
        elif inst.startswith(REG_PREFIX):
            acc[(inst, method)].append(-last["best_energy"])
        else:
            acc[(inst, method)].append(last["best_objective"])
    scores: dict[str, dict[str, float]] = defaultdict(dict)
    for (inst, method), vals in acc.items():
        scores[inst][method] = float(np.mean(vals))
    return scores


def cli_rank(records, refs: References, primary: str = "splitting", at_call: int | None = None) -> list[dict]:
    """Per-instance final scores, ordered by the primary method (stable, ascending)."""
    scores = final_scores(records, refs, at_call)
    sizes = {r["instance"]: r["n"] for r in records}
    order = [i for i in sizes if i in scores]
    methods = sorted({m for s in scores.values() for m in s})
    rows = [{"instance": inst, "n": sizes[inst], **{m: scores[inst].get(m) for m in methods}} for inst in order]
    if any(primary in r for r in rows):
        rows.sort(key=lambda r: math.inf if r.get(primary) is None else r[primary])
    return rows


def ablation_counts(records, refs: References, method_a: str, method_b: str, factor: float = 1.001, at_call: int | None = None) -> dict:
    """Better/equal/worse counts of ``method_a`` against ``method_b`` (larger score wins).

    The scaled counts require a margin: ``a`` wins if ``a - b > (factor - 1) |b|``.
    """
    scores = final_scores(records, refs, at_call)
    c = dict(better=0, equal=0, worse=0, better_scaled=0, worse_scaled=0, total=0)
    margin = factor - 1.0
    for inst, s in scores.items():
        if method_a not in s or method_b not in s:
            continue
        a, b = s[method_a], s[method_b]
        c["total"] += 1
        if abs(a - b) <= EQUAL_TOL * max(1.0, abs(a), abs(b)):
            c["equal"] += 1
        elif a > b:
            c["better"] += 1
        else:
            c["worse"] += 1
        if a - b > margin * abs(b):
            c["better_scaled"] += 1
        if b - a > margin * abs(a):
            c["worse_scaled"] += 1
    c.update(method_a=method_a, method_b=method_b, factor=factor)
    return c


def load_traces(paths) -> list[dict]:
    records = []
    for p in paths:
        p = Path(p)
        if p.is_dir():
            p = p / "trace.csv"
        with open(p, newline="") as fh:
            records += read_records(fh)
    return records
