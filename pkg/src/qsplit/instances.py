"""Benchmark instances and reference values.

Reg instances are the fully connected regular spin glasses with

    A[i, j] = 1 - (i + j - 2) / (N - 1)   (i != j, 1-indexed)
    b[i]    = 1 - 2 (i - 1) / (N - 1)

stored as a symmetric matrix with zero diagonal. Their ground state has the
form ``(-1, ..., -1, +1, ..., +1)``, so scanning the ``N + 1`` sign-change
positions gives the exact optimum.
"""

from __future__ import annotations

import csv
import io
import math
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .ising import IsingModel, WeightedGraph, maxcut_to_ising

REG_PREFIX = "reg:"


class InstanceParseError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class RegInstance:
    N: int
    model: IsingModel

    @property
    def name(self) -> str:
        return f"{REG_PREFIX}{self.N}"


def reg_instance(N: int) -> RegInstance:
    if N < 2:
        raise ValueError("Reg instances need N >= 2")
    i = np.arange(1, N + 1, dtype=np.float64)
    A = 1.0 - (i[:, None] + i[None, :] - 2.0) / (N - 1)
    np.fill_diagonal(A, 0.0)
    b = 1.0 - 2.0 * (i - 1.0) / (N - 1)
    return RegInstance(N, IsingModel(A, b, 0.0))


def reg_candidate(N: int, k: int) -> np.ndarray:
    """``k`` leading -1 entries followed by ``N - k`` +1 entries."""
    s = np.ones(N)
    s[:k] = -1.0
    return s


def reg_scaled_integers(N: int) -> tuple[np.ndarray, np.ndarray]:
    """``(N - 1) A`` and ``(N - 1) b`` as exact integers."""
    i = np.arange(1, N + 1, dtype=np.int64)
    A = (N - 1) - (i[:, None] + i[None, :] - 2)
    np.fill_diagonal(A, 0)
    return A, (N - 1) - 2 * (i - 1)


def reg_candidate_energies(N: int) -> np.ndarray:
    """``(N - 1) E(s(k))`` for ``k = 0..N``, in exact integer arithmetic."""
    A, b = reg_scaled_integers(N)
    S = np.ones((N + 1, N), dtype=np.int64)
    S[np.tril_indices(N + 1, -1, N)] = -1
    return np.einsum("kj,kj->k", S @ A, S) + S @ b


def reg_ground_state(N: int) -> tuple[np.ndarray, float]:
    """Exact Reg ground state from the ``N + 1`` sign-change candidates.

    Candidate energies are compared exactly, so mathematical ties are
    detected; they go to the smallest ``k``.
    """
    if N < 2:
        raise ValueError("Reg instances need N >= 2")
    e = reg_candidate_energies(N)
    k = int(np.argmin(e))  # first occurrence = smallest k
    return reg_candidate(N, k), float(e[k]) / (N - 1)


def reg_linear_term_flipped(N: int, k: int) -> float:
    """``b^T s`` for ``k`` leading +1 entries followed by -1 entries, evaluated directly."""
    b = reg_instance(N).model.b
    return float(b @ -reg_candidate(N, k))


def reg_linear_term_closed_form(N: int, k: int) -> float:
    return 2.0 * k * (1.0 - (k - 1) / (N - 1))


# --- MQLib edge lists --------------------------------------------------------

def parse_maxcut_edgelist(text: str) -> WeightedGraph:
    """Parse ``n m`` followed by ``m`` lines ``i j w`` (1-indexed vertices)."""
    lines = [(no, ln.split()) for no, ln in enumerate(text.splitlines(), start=1)]
    lines = [(no, parts) for no, parts in lines if parts and not parts[0].startswith("#")]
    if not lines:
        raise InstanceParseError("empty edge list")
    no, head = lines[0]
    if len(head) != 2:
        raise InstanceParseError(f"line {no}: expected 'n m', got {' '.join(head)!r}")
    try:
        n, m = int(head[0]), int(head[1])
    except ValueError:
        raise InstanceParseError(f"line {no}: header is not two integers") from None
    if n < 1 or m < 0:
        raise InstanceParseError(f"line {no}: invalid header n={n} m={m}")
    body = lines[1:]
    if len(body) != m:
        raise InstanceParseError(f"header declares {m} edges but {len(body)} edge lines follow")
    edges = []
    seen = set()
    for no, parts in body:
        if len(parts) != 3:
            raise InstanceParseError(f"line {no}: expected 'i j w'")
        try:
            i, j, w = int(parts[0]), int(parts[1]), float(parts[2])
        except ValueError:
            raise InstanceParseError(f"line {no}: malformed edge {' '.join(parts)!r}") from None
        if not (1 <= i <= n and 1 <= j <= n):
            raise InstanceParseError(f"line {no}: vertex out of range 1..{n}")
        if i == j:
            raise InstanceParseError(f"line {no}: self-loop on vertex {i}")
        key = (min(i, j), max(i, j))
        if key in seen:
            raise InstanceParseError(f"line {no}: duplicate edge {key[0]} {key[1]}")
        seen.add(key)
        edges.append((key[0] - 1, key[1] - 1, w))
    return WeightedGraph(n, tuple(edges))


def format_maxcut_edgelist(g: WeightedGraph) -> str:
    out = [f"{g.n} {len(g.edges)}"]
    for i, j, w in g.edges:
        out.append(f"{i + 1} {j + 1} {int(w) if float(w).is_integer() else repr(w)}")
    return "\n".join(out) + "\n"


def random_maxcut_graph(n: int, density: float, rng: np.random.Generator, weights=(-1, 1)) -> WeightedGraph:
    """Erdos-Renyi graph with weights drawn uniformly from ``weights``."""
    iu, ju = np.triu_indices(n, k=1)
    keep = rng.random(iu.size) < density
    w = rng.choice(np.asarray(weights, dtype=np.float64), size=int(keep.sum()))
    return WeightedGraph(n, tuple(zip(iu[keep].tolist(), ju[keep].tolist(), w.tolist())))


# --- best-known values ---------------------------------------------------------

@dataclass
class BestKnownTable:
    values: dict[str, float] = field(default_factory=dict)
    provenance: str = ""

    def usable(self, name: str) -> bool:
        """Zero references cannot form a ratio."""
        return name in self.values and self.values[name] != 0

    @property
    def unusable(self) -> list[str]:
        return [k for k, v in self.values.items() if v == 0]

    def __contains__(self, name: str) -> bool:
        return name in self.values

    def __getitem__(self, name: str) -> float:
        return self.values[name]

    def __len__(self) -> int:
        return len(self.values)


def load_best_known(path) -> BestKnownTable:
    return parse_best_known(Path(path).read_text(), provenance=str(path))


def parse_best_known(text: str, provenance: str = "") -> BestKnownTable:
    """Read ``name,value`` rows; a header line is optional."""
    table = BestKnownTable(provenance=provenance)
    for lineno, row in enumerate(csv.reader(io.StringIO(text)), start=1):
        if not row or not "".join(row).strip():
            continue
        if len(row) != 2:
            raise InstanceParseError(f"line {lineno}: expected 'name,value'")
        name, raw = row[0].strip(), row[1].strip()
        try:
            value = float(raw)
        except ValueError:
            if lineno == 1:
                continue
            raise InstanceParseError(f"line {lineno}: non-numeric value {raw!r}") from None
        if not math.isfinite(value):
            raise InstanceParseError(f"line {lineno}: non-finite value")
        if name in table.values:
            raise InstanceParseError(f"line {lineno}: duplicate instance {name!r}")
        table.values[name] = value
    return table


def approximation_ratio(achieved: float, reference: float, kind: str) -> float:
    """``E / E_opt`` for ``ising-ground``; ``|cut| / best`` for ``cut-best``."""
    if reference == 0:
        raise ValueError("reference value is zero")
    if kind == "ising-ground":
        return achieved / reference
    if kind == "cut-best":
        return abs(achieved) / reference
    raise ValueError(f"unknown ratio kind {kind!r}")


# --- instance registry ---------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Instance:
    """A named model plus what its objective means."""

    name: str
    model: IsingModel
    kind: str  # "ising-ground" or "cut-best"
    total_weight: float = 0.0

    def objective(self, e: float) -> float:
        """Reported objective: the energy for Ising instances, the cut for Max-Cut."""
        if self.kind == "cut-best":
            return (self.total_weight - e) / 2.0
        return e


def load_instance(selector: str) -> Instance:
    """``reg:N`` or a path to an MQLib edge list (name: file stem)."""
    if selector.startswith(REG_PREFIX):
        inst = reg_instance(int(selector[len(REG_PREFIX):]))
        return Instance(inst.name, inst.model, "ising-ground")
    path = Path(selector)
    g = parse_maxcut_edgelist(path.read_text())
    return Instance(path.stem, maxcut_to_ising(g), "cut-best", g.total_weight)


def expand_selectors(selectors, size_filter: str | None = None) -> list[str]:
    """Expand ``reg:a..b[:step]`` ranges and directories of ``*.txt`` edge lists."""
    out: list[str] = []
    for sel in selectors:
        if sel.startswith(REG_PREFIX) and ".." in sel:
            lo, _, rest = sel[len(REG_PREFIX):].partition("..")
            hi, _, step = rest.partition(":")
            out += [f"{REG_PREFIX}{N}" for N in range(int(lo), int(hi) + 1, int(step or 1))]
        elif Path(sel).is_dir():
            out += sorted(str(p) for p in Path(sel).glob("*.txt"))
        else:
            out.append(sel)
    if size_filter:
        out = [s for s in out if _passes(s, size_filter)]
    return out


def _passes(selector: str, size_filter: str) -> bool:
    if not selector.startswith(REG_PREFIX):
        warnings.warn(f"size filter only inspects reg instances; keeping {selector}", stacklevel=3)
        return True
    return size_predicate(size_filter)(int(selector[len(REG_PREFIX):]))


def size_predicate(expr: str):
    """``>150``, ``>=500``, ``<1000``, ``500-1000`` (inclusive) or an exact size."""
    expr = expr.strip()
    for op, fn in ((">=", lambda a, b: a >= b), ("<=", lambda a, b: a <= b), (">", lambda a, b: a > b), ("<", lambda a, b: a < b)):
        if expr.startswith(op):
            v = float(expr[len(op):])
            return lambda n: fn(n, v)
    if "-" in expr:
        lo, hi = (float(x) for x in expr.split("-", 1))
        return lambda n: lo <= n <= hi
    v = float(expr)
    return lambda n: n == v
