"""Per-solver-call trace records and their CSV form."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Iterable, Iterator

TRACE_COLUMNS = (
    "instance",
    "n",
    "method",
    "seed",
    "call",
    "iteration",
    "subiteration",
    "lambda",
    "energy",
    "best_energy",
    "best_objective",
    "wall_ms",
)


@dataclass(frozen=True)
class TraceRow:
    """One solver call.

    ``call`` counts solver calls from 1 (row 0 holds the starting point),
    ``iteration`` is the method's outer iteration and ``subiteration`` the
    position within it.
    """

    call: int
    iteration: int
    subiteration: int
    lam: float | None
    energy: float
    best_energy: float
    wall_ms: float


class Trace(list):
    """List of :class:`TraceRow` in call order."""

    def add(self, iteration: int, subiteration: int, lam, e: float, best: float, wall_ms: float) -> TraceRow:
        row = TraceRow(len(self), iteration, subiteration, None if lam is None else float(lam), float(e), float(best), float(wall_ms))
        self.append(row)
        return row

    @property
    def solver_calls(self) -> int:
        return max(len(self) - 1, 0)

    def best_energies(self) -> list[float]:
        return [r.best_energy for r in self]


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def trace_records(trace: Iterable[TraceRow], instance: str, n: int, method: str, seed: int, objective=None) -> Iterator[dict]:
    """Flatten rows into CSV records; ``objective`` maps best energy to the reported objective."""
    for r in trace:
        yield {
            "instance": instance,
            "n": n,
            "method": method,
            "seed": seed,
            "call": r.call,
            "iteration": r.iteration,
            "subiteration": r.subiteration,
            "lambda": r.lam,
            "energy": r.energy,
            "best_energy": r.best_energy,
            "best_objective": objective(r.best_energy) if objective else r.best_energy,
            "wall_ms": r.wall_ms,
        }


def write_records(fh, records: Iterable[dict], header: bool = True) -> None:
    w = csv.writer(fh, lineterminator="\n")
    if header:
        w.writerow(TRACE_COLUMNS)
    for rec in records:
        w.writerow([_fmt(rec[c]) for c in TRACE_COLUMNS])


_INT_COLS = {"n", "seed", "call", "iteration", "subiteration"}
_FLOAT_COLS = {"energy", "best_energy", "best_objective", "wall_ms"}


def read_records(fh) -> list[dict]:
    out = []
    for rec in csv.DictReader(fh):
        for c in _INT_COLS:
            rec[c] = int(rec[c])
        for c in _FLOAT_COLS:
            rec[c] = float(rec[c])
        rec["lambda"] = float(rec["lambda"]) if rec["lambda"] else None
        out.append(rec)
    return out


def records_to_csv(records: Iterable[dict]) -> str:
    buf = io.StringIO()
    write_records(buf, records)
    return buf.getvalue()


def is_nonincreasing(values: Iterable[float]) -> bool:
    prev = math.inf
    for v in values:
        if v > prev:
            return False
        prev = v
    return True


__all__ = [
    "TRACE_COLUMNS",
    "Trace",
    "TraceRow",
    "is_nonincreasing",
    "read_records",
    "records_to_csv",
    "trace_records",
    "write_records",
]
