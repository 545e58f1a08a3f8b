"""Rate regions as polytopes in the nonnegative orthant."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from typing import TextIO

import numpy as np

from . import _kernels
from .infotheory import BoundTable
from .subsets import nonempty_subsets, indicator_vector

MEMBERSHIP_TOL = 1e-9
MAX_VERTEX_K = 4


@dataclass(frozen=True)
class RateRegion:
    """``{R >= 0 : A @ R <= c}``."""

    k: int
    A: np.ndarray
    c: np.ndarray

    def __post_init__(self):
        A = np.asarray(self.A, dtype=np.float64).reshape(-1, self.k)
        c = np.asarray(self.c, dtype=np.float64).reshape(-1)
        if A.shape[0] != c.shape[0]:
            raise ValueError(f"{A.shape[0]} rows but {c.shape[0]} bounds")
        A.setflags(write=False)
        c.setflags(write=False)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "c", c)

    @property
    def inequalities(self) -> list[tuple[np.ndarray, float]]:
        return [(a, float(b)) for a, b in zip(self.A, self.c)]

    def is_empty(self, tol: float = MEMBERSHIP_TOL) -> bool:
        if np.all(self.A >= 0):
            # downward closed: nonempty iff the origin is feasible
            return bool(np.any(self.c < -tol))
        return len(vertices(self, tol)) == 0

    def tightened(self, row: int, delta: float) -> "RateRegion":
        c = self.c.copy()
        c[row] -= delta
        return RateRegion(self.k, self.A, c)


@dataclass(frozen=True)
class VertexSet:
    points: np.ndarray

    def __len__(self) -> int:
        return self.points.shape[0]

    def __iter__(self):
        return iter(self.points)

    def to_csv(self, fh: TextIO | None = None) -> str:
        buf = io.StringIO() if fh is None else fh
        writer = csv.writer(buf, lineterminator="\n")
        for p in self.points:
            writer.writerow([f"{v:.12g}" for v in p])
        return buf.getvalue() if fh is None else ""

    def to_json(self) -> str:
        return json.dumps([[float(f"{v:.12g}") for v in p] for p in self.points])

    @classmethod
    def from_csv(cls, text: str, k: int) -> "VertexSet":
        rows = [[float(v) for v in row] for row in csv.reader(io.StringIO(text)) if row]
        return cls(np.array(rows, dtype=np.float64).reshape(-1, k))


def closed_form_region(bt: BoundTable) -> RateRegion:
    """``sum_{j in J} R_j <= b+J - b-J`` for every nonempty ``J``."""
    subsets = nonempty_subsets(bt.k)
    A = np.array([indicator_vector(J) for J in subsets], dtype=np.float64)
    c = np.array([bt.plus(J) - bt.minus(J) for J in subsets])
    return RateRegion(bt.k, A, c)


def mac_region(bt: BoundTable) -> RateRegion:
    """The reliability-only region ``sum_{j in J} R_j <= b+J``."""
    subsets = nonempty_subsets(bt.k)
    A = np.array([indicator_vector(J) for J in subsets], dtype=np.float64)
    c = np.array([bt.plus(J) for J in subsets])
    return RateRegion(bt.k, A, c)


def contains(r: RateRegion, point, tol: float = MEMBERSHIP_TOL) -> bool:
    x = np.asarray(point, dtype=np.float64).reshape(-1)
    if x.size != r.k:
        raise ValueError(f"point has dimension {x.size}, region has {r.k}")
    if np.any(x < -tol):
        return False
    return bool(np.all(r.A @ x <= r.c + tol))


def _dedup(points: np.ndarray, tol: float) -> np.ndarray:
    kept: list[np.ndarray] = []
    for p in points:
        if not any(np.max(np.abs(p - q)) <= tol for q in kept):
            kept.append(p)
    return np.array(kept).reshape(-1, points.shape[1])


def vertices(r: RateRegion, tol: float = MEMBERSHIP_TOL) -> VertexSet:
    """All vertices, by solving every ``k x k`` subsystem of region rows and axes."""
    if r.k > MAX_VERTEX_K:
        raise ValueError(f"vertex enumeration supports k <= {MAX_VERTEX_K}, got {r.k}")
    A = np.vstack([r.A, -np.eye(r.k)])
    b = np.concatenate([r.c, np.zeros(r.k)])
    pts = _kernels.basis_vertices(np.ascontiguousarray(A), np.ascontiguousarray(b), tol)
    pts = _dedup(pts, tol)
    pts[np.abs(pts) < 1e-15] = 0.0
    order = np.lexsort(pts.T[::-1]) if len(pts) else np.arange(0)
    return VertexSet(pts[order])


def polytope_equal(rA: RateRegion, rB: RateRegion, tol: float = MEMBERSHIP_TOL) -> bool:
    """Same polytope, up to ``tol``, judged by cross-membership of vertices.

    Both regions must be bounded; every region built from a bound table is.
    """
    if rA.k != rB.k:
        raise ValueError(f"dimension mismatch: {rA.k} vs {rB.k}")
    vA, vB = vertices(rA), vertices(rB)
    if (len(vA) == 0) != (len(vB) == 0):
        return False
    return all(contains(rB, p, tol) for p in vA) and all(contains(rA, p, tol) for p in vB)
