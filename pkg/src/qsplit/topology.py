"""Hardware connectivity graphs (Chimera, Pegasus) used as coupling masks.

Node orderings
--------------
Chimera ``C(rows, cols, shore)``: node ``((r * cols + c) * 2 + u) * shore + k``
for cell ``(r, c)``, orientation ``u`` (0 vertical, 1 horizontal) and index
``k`` within the shore.

Pegasus ``P_m``: node ``u * 12 * m * (m - 1) + w * 12 * (m - 1) + k * (m - 1) + z``
for the standard coordinates ``(u, w, k, z)`` with ``u in {0, 1}``,
``0 <= w < m``, ``0 <= k < 12`` and ``0 <= z < m - 1``. All ``24 m (m - 1)``
coordinates are present (no fabric trimming) and the default offset lists
are used.

When a problem is smaller than the generated graph, :func:`mask_for_problem`
keeps the first ``n`` nodes of a nested ordering: the nodes of the
``P_2`` corner first, then the remaining nodes of the ``P_3`` corner, and so
on, each shell in index order. For Chimera the nested ordering is the plain
index order.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.sparse as sp

# Default Pegasus offsets for vertical (u = 0) and horizontal (u = 1) qubits.
PEGASUS_OFFSETS = (
    (2, 2, 2, 2, 10, 10, 10, 10, 6, 6, 6, 6),
    (6, 6, 6, 6, 2, 2, 2, 2, 10, 10, 10, 10),
)

# Chimera growth sequence for the automatic family: (1,1), (1,2), (2,2), (2,3), ...
_MAX_FAMILY_SIZE = 64


@dataclass(frozen=True, eq=False)
class HardwareMask:
    """Symmetric 0/1 adjacency structure of a hardware graph.

    ``edges`` is an ``(E, 2)`` integer array with ``i < j``, sorted.
    """

    n: int
    edges: np.ndarray
    label: str = ""

    def __post_init__(self) -> None:
        e = np.asarray(self.edges, dtype=np.int64).reshape(-1, 2)
        if e.size:
            if np.any(e[:, 0] == e[:, 1]):
                raise ValueError("mask has a self-loop")
            if e.min() < 0 or e.max() >= self.n:
                raise ValueError("mask edge out of range")
            e = np.sort(e, axis=1)
            e = np.unique(e, axis=0)
        e.setflags(write=False)
        object.__setattr__(self, "edges", e)

    @property
    def num_edges(self) -> int:
        return int(self.edges.shape[0])

    def matrix(self) -> sp.csr_array:
        i, j = self.edges[:, 0], self.edges[:, 1]
        data = np.ones(2 * len(i), dtype=np.int8)
        return sp.csr_array((data, (np.r_[i, j], np.r_[j, i])), shape=(self.n, self.n))

    def dense(self) -> np.ndarray:
        M = np.zeros((self.n, self.n), dtype=np.int8)
        M[self.edges[:, 0], self.edges[:, 1]] = 1
        M[self.edges[:, 1], self.edges[:, 0]] = 1
        return M

    def degrees(self) -> np.ndarray:
        return np.bincount(self.edges.ravel(), minlength=self.n)

    def edge_set(self) -> set[tuple[int, int]]:
        return {(int(a), int(b)) for a, b in self.edges}


def complete_mask(n: int) -> HardwareMask:
    i, j = np.triu_indices(n, k=1)
    return HardwareMask(n, np.c_[i, j], label=f"complete:{n}")


def empty_mask(n: int) -> HardwareMask:
    return HardwareMask(n, np.empty((0, 2), dtype=np.int64), label=f"empty:{n}")


def induced_mask(mask: HardwareMask, nodes, label: str | None = None) -> HardwareMask:
    """Subgraph induced by ``nodes``, relabeled ``0..len(nodes)-1`` in the given order."""
    nodes = np.asarray(nodes, dtype=np.int64)
    pos = np.full(mask.n, -1, dtype=np.int64)
    pos[nodes] = np.arange(len(nodes))
    e = pos[mask.edges]
    e = e[(e >= 0).all(axis=1)]
    return HardwareMask(len(nodes), e, label=label if label is not None else mask.label)


# --- Chimera -----------------------------------------------------------------

def chimera_mask(rows: int, cols: int, shore: int) -> HardwareMask:
    if min(rows, cols, shore) < 1:
        raise ValueError("rows, cols and shore must be >= 1")

    def idx(r, c, u, k):
        return ((r * cols + c) * 2 + u) * shore + k

    edges = []
    for r in range(rows):
        for c in range(cols):
            for k0 in range(shore):
                for k1 in range(shore):
                    edges.append((idx(r, c, 0, k0), idx(r, c, 1, k1)))
            for k in range(shore):
                if r + 1 < rows:
                    edges.append((idx(r, c, 0, k), idx(r + 1, c, 0, k)))
                if c + 1 < cols:
                    edges.append((idx(r, c, 1, k), idx(r, c + 1, 1, k)))
    n = rows * cols * 2 * shore
    return HardwareMask(n, np.array(edges, dtype=np.int64).reshape(-1, 2), label=f"chimera:{rows},{cols},{shore}")


# --- Pegasus -----------------------------------------------------------------

def pegasus_index(m: int, u: int, w: int, k: int, z: int) -> int:
    m1 = m - 1
    return ((u * m + w) * 12 + k) * m1 + z


@lru_cache(maxsize=16)
def _pegasus_edges(m: int) -> np.ndarray:
    m1 = m - 1
    off0, off1 = PEGASUS_OFFSETS
    lab = pegasus_index
    edges = []
    # external couplers: consecutive qubits along a line
    for u in (0, 1):
        for w in range(m):
            for k in range(12):
                for z in range(m1 - 1):
                    edges.append((lab(m, u, w, k, z), lab(m, u, w, k, z + 1)))
    # odd couplers: paired qubits k, k+1 for even k
    for u in (0, 1):
        for w in range(m):
            for k in range(0, 12, 2):
                for z in range(m1):
                    edges.append((lab(m, u, w, k, z), lab(m, u, w, k + 1, z)))
    # internal couplers between vertical and horizontal qubits
    for w in range(m):
        for kk in range(12):
            for k in range(0 if w else off1[kk], 12 if w < m1 else off1[kk]):
                for z in range(m1):
                    a = lab(m, 0, w, k, z)
                    b = lab(m, 1, z + (kk < off0[k]), kk, w - (k < off1[kk]))
                    edges.append((a, b))
    e = np.sort(np.array(edges, dtype=np.int64), axis=1)
    return np.unique(e, axis=0)


def pegasus_mask(size: int) -> HardwareMask:
    if size < 2:
        raise ValueError("Pegasus size must be >= 2")
    return HardwareMask(24 * size * (size - 1), _pegasus_edges(size), label=f"pegasus:{size}")


def pegasus_coordinates(size: int, index: int) -> tuple[int, int, int, int]:
    m1 = size - 1
    z = index % m1
    rest = index // m1
    k = rest % 12
    rest //= 12
    w = rest % size
    u = rest // size
    return u, w, k, z


def _parse_label(label: str) -> tuple[str, tuple[int, ...]]:
    family, _, args = label.partition(":")
    args = args.split("[")[0]
    return family, tuple(int(a) for a in args.split(",") if a)


def sub_pegasus_nodes(full: HardwareMask, sub_size: int) -> np.ndarray:
    """Indices of the ``P_sub_size`` graph sitting at the ``w = z = 0`` corner of ``full``.

    The returned order matches the index order of ``pegasus_mask(sub_size)``,
    so ``induced_mask(full, nodes)`` equals that mask exactly.
    """
    family, args = _parse_label(full.label)
    if family != "pegasus" or len(args) != 1 or "[" in full.label:
        raise ValueError(f"not a full Pegasus mask: {full.label!r}")
    m = args[0]
    if not 2 <= sub_size <= m:
        raise ValueError(f"sub_size must be in [2, {m}], got {sub_size}")
    return np.array(
        [
            pegasus_index(m, u, w, k, z)
            for u in (0, 1)
            for w in range(sub_size)
            for k in range(12)
            for z in range(sub_size - 1)
        ],
        dtype=np.int64,
    )


def nested_pegasus_order(size: int) -> np.ndarray:
    """Node order of ``P_size``: the ``P_2`` corner, then each larger corner's new nodes."""
    full = pegasus_mask(size)
    order: list[int] = []
    seen = np.zeros(full.n, dtype=bool)
    for s in range(2, size + 1):
        shell = sub_pegasus_nodes(full, s)
        new = shell[~seen[shell]]
        seen[new] = True
        order.extend(new.tolist())
    return np.array(order, dtype=np.int64)


# --- problem-sized masks -------------------------------------------------------

@dataclass(frozen=True)
class TopologySpec:
    """A topology family, optionally pinned to one size.

    ``family`` is ``"pegasus"``, ``"chimera"``, ``"complete"`` or ``"empty"``.
    For Chimera ``shore`` fixes the unit-cell shore; ``size`` pins
    ``(rows, cols)`` (Chimera) or ``(m,)`` (Pegasus).
    """

    family: str
    size: tuple[int, ...] | None = None
    shore: int = 4

    @classmethod
    def parse(cls, text: str) -> "TopologySpec":
        """Parse ``pegasus``, ``pegasus:M``, ``chimera``, ``chimera:S`` or ``chimera:R,C,S``."""
        family, _, args = text.strip().lower().partition(":")
        nums = tuple(int(a) for a in args.split(",") if a.strip())
        if family == "pegasus":
            if len(nums) > 1:
                raise ValueError(f"bad pegasus spec {text!r}")
            return cls("pegasus", nums or None)
        if family == "chimera":
            if len(nums) == 0:
                return cls("chimera")
            if len(nums) == 1:
                return cls("chimera", None, nums[0])
            if len(nums) == 3:
                return cls("chimera", nums[:2], nums[2])
            raise ValueError(f"bad chimera spec {text!r}")
        if family in ("complete", "empty") and not nums:
            return cls(family)
        raise ValueError(f"unknown topology {text!r}")

    def __str__(self) -> str:
        if self.family == "pegasus":
            return "pegasus" + (f":{self.size[0]}" if self.size else "")
        if self.family == "chimera":
            if self.size:
                return f"chimera:{self.size[0]},{self.size[1]},{self.shore}"
            return f"chimera:{self.shore}"
        return self.family


def _chimera_sizes():
    r = 1
    while r <= _MAX_FAMILY_SIZE:
        yield r, r
        yield r, r + 1
        r += 1


def mask_for_problem(problem_n: int, family: TopologySpec | str) -> HardwareMask:
    """Mask on exactly ``problem_n`` nodes cut from the smallest fitting graph.

    The first ``problem_n`` nodes of the nested ordering are kept; when the
    graph is larger than the problem the resulting mask is irregular.
    """
    if isinstance(family, str):
        family = TopologySpec.parse(family)
    if problem_n < 1:
        raise ValueError("problem_n must be >= 1")
    if family.family == "complete":
        return complete_mask(problem_n)
    if family.family == "empty":
        return empty_mask(problem_n)
    if family.family == "pegasus":
        sizes = [family.size[0]] if family.size else range(2, _MAX_FAMILY_SIZE + 1)
        for m in sizes:
            if 24 * m * (m - 1) >= problem_n:
                full = pegasus_mask(m)
                nodes = nested_pegasus_order(m)[:problem_n]
                return _truncated(full, nodes, problem_n)
        raise ValueError(f"{family} cannot host {problem_n} nodes")
    if family.family == "chimera":
        sizes = [family.size] if family.size else _chimera_sizes()
        for rows, cols in sizes:
            if rows * cols * 2 * family.shore >= problem_n:
                full = chimera_mask(rows, cols, family.shore)
                return _truncated(full, np.arange(problem_n), problem_n)
        raise ValueError(f"{family} cannot host {problem_n} nodes")
    raise ValueError(f"unknown topology family {family.family!r}")


def _truncated(full: HardwareMask, nodes: np.ndarray, n: int) -> HardwareMask:
    if n == full.n and np.array_equal(nodes, np.arange(full.n)):
        return full
    label = full.label if n == full.n else f"{full.label}[:{n}]"
    return induced_mask(full, nodes, label=label)


# --- permutations --------------------------------------------------------------

def random_permutation(n: int, rng: np.random.Generator) -> np.ndarray:
    if n < 1:
        raise ValueError("n must be >= 1")
    return rng.permutation(n)


def check_permutation(p, n: int | None = None) -> np.ndarray:
    p = np.asarray(p, dtype=np.int64)
    if n is not None and p.shape != (n,):
        raise ValueError(f"permutation has length {p.shape[0]}, expected {n}")
    if not np.array_equal(np.sort(p), np.arange(p.shape[0])):
        raise ValueError("not a permutation")
    return p


def inverse_permutation(p) -> np.ndarray:
    p = check_permutation(p)
    inv = np.empty_like(p)
    inv[p] = np.arange(p.shape[0])
    return inv


def permuted_mask(mask: HardwareMask, p) -> HardwareMask:
    """Mask with ``M'[i, j] = M[p[i], p[j]]``."""
    p = check_permutation(p, mask.n)
    inv = inverse_permutation(p)
    return HardwareMask(mask.n, inv[mask.edges], label=mask.label)


def edgelist_lines(mask: HardwareMask) -> list[str]:
    return [f"{i} {j}" for i, j in mask.edges]
