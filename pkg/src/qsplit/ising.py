"""Ising, QUBO and Max-Cut problem representations.

Energies are ``s^T A s + b^T s + offset`` over spins ``s in {-1, +1}^n``.
Couplings are kept as dense symmetric float64 arrays; every instance the
benchmarks touch has at most a few thousand variables.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

EQUAL_TOL = 1e-12


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=np.float64, copy=True)
    a.setflags(write=False)
    return a


def _is_symmetric(a: np.ndarray) -> bool:
    return bool(np.array_equal(a, a.T))


@dataclass(frozen=True, eq=False)
class IsingModel:
    """Objective ``E(s) = s^T A s + b^T s + offset``.

    A non-symmetric ``A`` (e.g. upper-triangular data) is replaced by
    ``(A + A^T) / 2``, which leaves every energy unchanged; a warning is
    issued and ``symmetrized`` is set.
    """

    A: np.ndarray
    b: np.ndarray
    offset: float = 0.0
    symmetrized: bool = field(default=False, compare=False)

    def __post_init__(self) -> None:
        A = _frozen(self.A)
        b = _frozen(self.b).reshape(-1)
        if A.ndim != 2 or A.shape[0] != A.shape[1]:
            raise ValueError(f"couplings must be square, got shape {A.shape}")
        if A.shape[0] < 1:
            raise ValueError("model needs at least one variable")
        if b.shape[0] != A.shape[0]:
            raise ValueError(f"bias length {b.shape[0]} != dimension {A.shape[0]}")
        if not _is_symmetric(A):
            warnings.warn("non-symmetric coupling matrix symmetrized as (A + A^T)/2", stacklevel=3)
            A = _frozen((A + A.T) / 2.0)
            object.__setattr__(self, "symmetrized", True)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "offset", float(self.offset))

    @classmethod
    def from_matrix(cls, A, b=None, offset: float = 0.0) -> "IsingModel":
        """Model with zero biases unless ``b`` is given."""
        A = np.asarray(A, dtype=np.float64)
        b = np.zeros(A.shape[0]) if b is None else b
        return cls(A, b, offset)

    @property
    def n(self) -> int:
        return self.A.shape[0]

    def energy(self, s) -> float:
        return energy(self, s)


@dataclass(frozen=True, eq=False)
class QuboModel:
    """Objective ``x^T Q x`` over ``x in {0, 1}^n``."""

    Q: np.ndarray

    def __post_init__(self) -> None:
        Q = _frozen(self.Q)
        if Q.ndim != 2 or Q.shape[0] != Q.shape[1]:
            raise ValueError(f"Q must be square, got shape {Q.shape}")
        object.__setattr__(self, "Q", Q)

    @property
    def n(self) -> int:
        return self.Q.shape[0]

    def energy(self, x) -> float:
        x = np.asarray(x, dtype=np.float64)
        return float(x @ self.Q @ x)


@dataclass(frozen=True)
class WeightedGraph:
    """Undirected weighted graph given as ``(i, j, w)`` triples with ``i < j``."""

    n: int
    edges: tuple[tuple[int, int, float], ...]

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError("graph needs at least one vertex")
        norm = []
        seen = set()
        for i, j, w in self.edges:
            i, j = int(i), int(j)
            if i == j:
                raise ValueError(f"self-loop on vertex {i}")
            if i > j:
                i, j = j, i
            if not 0 <= i < j < self.n:
                raise ValueError(f"edge ({i}, {j}) out of range for n={self.n}")
            if (i, j) in seen:
                raise ValueError(f"duplicate edge ({i}, {j})")
            seen.add((i, j))
            norm.append((i, j, float(w)))
        object.__setattr__(self, "edges", tuple(norm))

    @property
    def total_weight(self) -> float:
        return float(sum(w for _, _, w in self.edges))


def as_spins(s, n: int | None = None) -> np.ndarray:
    """Validate a spin vector and return it as a float64 array."""
    s = np.asarray(s, dtype=np.float64).reshape(-1)
    if n is not None and s.shape[0] != n:
        raise ValueError(f"spin vector has length {s.shape[0]}, expected {n}")
    if not np.all(np.abs(s) == 1.0):
        raise ValueError("spin entries must be -1 or +1")
    return s


def energy(m: IsingModel, s) -> float:
    s = as_spins(s, m.n)
    return float(s @ m.A @ s + m.b @ s + m.offset)


def delta_energy(m: IsingModel, s, i: int) -> float:
    """Energy change from flipping spin ``i``; O(n) on the dense row."""
    s = as_spins(s, m.n)
    if not 0 <= i < m.n:
        raise IndexError(f"spin index {i} out of range for n={m.n}")
    row = m.A[i] @ s - m.A[i, i] * s[i]
    return float(-4.0 * s[i] * row - 2.0 * m.b[i] * s[i])


def flip(s, i: int) -> np.ndarray:
    out = np.array(s, dtype=np.float64, copy=True)
    out[i] = -out[i]
    return out


def qubo_to_ising(q: QuboModel) -> IsingModel:
    """Map ``x^T Q x`` to spins via ``x = (s + 1) / 2``.

    A non-symmetric ``Q`` is replaced by ``(Q + Q^T)/2`` (energy-preserving on
    binaries) and the returned model has ``symmetrized=True``.
    """
    Q = np.asarray(q.Q)
    symmetrized = not _is_symmetric(Q)
    if symmetrized:
        warnings.warn("non-symmetric Q symmetrized as (Q + Q^T)/2", stacklevel=2)
        Q = (Q + Q.T) / 2.0
    ones = np.ones(Q.shape[0])
    return IsingModel(Q / 4.0, Q @ ones / 2.0, float(ones @ Q @ ones) / 4.0, symmetrized=symmetrized)


def spins_to_binary(s) -> np.ndarray:
    return ((np.asarray(s) + 1) // 2).astype(np.int8)


def binary_to_spins(x) -> np.ndarray:
    return 2.0 * np.asarray(x, dtype=np.float64) - 1.0


def maxcut_to_ising(g: WeightedGraph) -> IsingModel:
    """Ising model whose minimizers are maximum cuts of ``g``.

    ``cut(s) = (W - s^T A s) / 2`` with ``W`` the total edge weight.
    """
    A = np.zeros((g.n, g.n))
    for i, j, w in g.edges:
        A[i, j] = A[j, i] = w / 2.0
    return IsingModel(A, np.zeros(g.n), 0.0)


def cut_value(g: WeightedGraph, s) -> float:
    s = as_spins(s, g.n)
    return float(sum(w * (1.0 - s[i] * s[j]) / 2.0 for i, j, w in g.edges))


def cut_from_energy(total_weight: float, e: float) -> float:
    """Cut value for the model built by :func:`maxcut_to_ising`."""
    return (total_weight - e) / 2.0


def apply_diagonal_shift(m: IsingModel, c: float) -> IsingModel:
    """Add ``c`` to every diagonal coupling, compensated in the offset.

    Energies on the hypercube are unchanged; only gradients (and therefore the
    linearization used by the splitting method) see the shift.
    """
    if c == 0:
        return m
    return IsingModel(m.A + c * np.eye(m.n), m.b, m.offset - c * m.n, symmetrized=m.symmetrized)


# --- JSON model format -------------------------------------------------------

def model_to_dict(m: IsingModel) -> dict:
    """Couplings are listed as the energy coefficient of ``s_i s_j`` (i < j)."""
    iu, ju = np.nonzero(np.triu(m.A, k=1))
    couplings = [[int(i), int(j), float(2.0 * m.A[i, j])] for i, j in zip(iu, ju)]
    couplings += [[int(i), int(i), float(m.A[i, i])] for i in np.nonzero(np.diag(m.A))[0]]
    return {"n": m.n, "offset": m.offset, "biases": [float(v) for v in m.b], "couplings": couplings}


def model_from_dict(d: dict) -> IsingModel:
    n = int(d["n"])
    biases = d.get("biases") or [0.0] * n
    if len(biases) != n:
        raise ValueError(f"expected {n} biases, got {len(biases)}")
    A = np.zeros((n, n))
    seen = set()
    for i, j, v in d.get("couplings", []):
        i, j = int(i), int(j)
        if i > j:
            i, j = j, i
        if not 0 <= i <= j < n:
            raise ValueError(f"coupling ({i}, {j}) out of range for n={n}")
        if (i, j) in seen:
            raise ValueError(f"duplicate coupling ({i}, {j})")
        seen.add((i, j))
        if i == j:
            A[i, i] = float(v)
        else:
            A[i, j] = A[j, i] = float(v) / 2.0
    return IsingModel(A, np.asarray(biases, dtype=np.float64), float(d.get("offset", 0.0)))


def save_model(m: IsingModel, path) -> None:
    Path(path).write_text(json.dumps(model_to_dict(m)))


def load_model(path) -> IsingModel:
    return model_from_dict(json.loads(Path(path).read_text()))


def all_spin_vectors(n: int) -> np.ndarray:
    """Every spin vector of length ``n`` in lexicographic order (-1 < +1)."""
    idx = np.arange(2**n, dtype=np.int64)
    bits = (idx[:, None] >> np.arange(n - 1, -1, -1)) & 1
    return 2.0 * bits - 1.0


def energies(m: IsingModel, S: np.ndarray) -> np.ndarray:
    """Energies of the rows of ``S``."""
    return np.einsum("ij,ij->i", S @ m.A, S) + S @ m.b + m.offset


def edges_to_graph(n: int, edges: Iterable[Sequence]) -> WeightedGraph:
    return WeightedGraph(n, tuple((int(i), int(j), float(w)) for i, j, w in edges))
