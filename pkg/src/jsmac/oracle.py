"""Brute-force reference paths used to cross-check the main pipeline.

Nothing here touches the symbolic elimination code. The eliminator is plain
floating-point Fourier-Motzkin with LP-based redundancy removal, and the
mutual information is a per-atom loop over entropy sums.
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog

from .infotheory import BoundTable, JointDistribution
from .region import RateRegion, polytope_equal, closed_form_region

REDUNDANCY_TOL = 1e-10


@dataclass(frozen=True)
class NumericSystem:
    """Rows ``A[i] . x <= b[i]``."""

    A: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        A = np.atleast_2d(np.asarray(self.A, dtype=np.float64))
        b = np.asarray(self.b, dtype=np.float64).reshape(-1)
        if A.shape[0] != b.shape[0] and b.size:
            raise ValueError(f"{A.shape[0]} rows but {b.shape[0]} bounds")
        if not (np.all(np.isfinite(A)) and np.all(np.isfinite(b))):
            raise ValueError("numeric system has non-finite entries")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", b)

    @property
    def nvars(self) -> int:
        return self.A.shape[1]

    def __len__(self) -> int:
        return self.b.shape[0]


# ------------------------------------------------------------ mutual information


def _entropy_of(counts: dict) -> float:
    h = 0.0
    for p in counts.values():
        if p > 0.0:
            h -= p * math.log2(p)
    return h


def oracle_mi(j: JointDistribution, A, B, C=()) -> float:
    """``H(A,C) + H(B,C) - H(A,B,C) - H(C)`` from marginals accumulated atom by atom."""
    a, b, c = (tuple(j.axes((v,) if isinstance(v, (int, str)) else v)) for v in (A, B, C))
    if set(a) & set(b) or set(a) & set(c) or set(b) & set(c):
        raise ValueError(f"variable sets overlap: {a}, {b}, {c}")
    m_ac, m_bc, m_abc, m_c = (defaultdict(float) for _ in range(4))
    pmf = j.pmf
    for idx in np.ndindex(*pmf.shape):
        p = float(pmf[idx])
        if p == 0.0:
            continue
        ka = tuple(idx[i] for i in a)
        kb = tuple(idx[i] for i in b)
        kc = tuple(idx[i] for i in c)
        m_ac[ka + kc] += p
        m_bc[kb + kc] += p
        m_abc[ka + kb + kc] += p
        m_c[kc] += p
    return _entropy_of(m_ac) + _entropy_of(m_bc) - _entropy_of(m_abc) - _entropy_of(m_c)


# ------------------------------------------------------------ elimination


def numeric_wiretap_system(bt: BoundTable) -> NumericSystem:
    """Reliability and secrecy rows over ``(R_1..R_k, R_1r..R_kr)`` built straight from ``bt``."""
    k = bt.k
    rows, bounds = [], []
    for bits in range(1, 1 << k):
        ind = [float((bits >> i) & 1) for i in range(k)]
        rows.append(ind + ind)
        bounds.append(bt.b_plus[bits])
    for bits in range(1, 1 << k):
        ind = [float((bits >> i) & 1) for i in range(k)]
        rows.append([0.0] * k + [-v for v in ind])
        bounds.append(-bt.b_minus[bits])
    return NumericSystem(np.array(rows), np.array(bounds))


def _is_redundant(A: np.ndarray, b: np.ndarray, i: int, tol: float) -> bool:
    others = np.ones(len(b), dtype=bool)
    others[i] = False
    if not others.any():
        return False
    res = linprog(-A[i], A_ub=A[others], b_ub=b[others], bounds=[(None, None)] * A.shape[1], method="highs")
    if res.status != 0:
        return False
    return -res.fun <= b[i] + tol


def remove_redundant(sys: NumericSystem, tol: float = REDUNDANCY_TOL) -> NumericSystem:
    A, b = sys.A.copy(), sys.b.copy()
    keep = np.ones(len(b), dtype=bool)
    for i in range(len(b)):
        idx = np.flatnonzero(keep)
        pos = int(np.searchsorted(idx, i))
        if _is_redundant(A[idx], b[idx], pos, tol):
            keep[i] = False
    return NumericSystem(A[keep], b[keep])


def _fm_step(A: np.ndarray, b: np.ndarray, var: int):
    col = A[:, var]
    zero = np.abs(col) <= 1e-15
    pos = np.flatnonzero(col > 1e-15)
    neg = np.flatnonzero(col < -1e-15)
    new_A = [A[zero]]
    new_b = [b[zero]]
    for p in pos:
        for n in neg:
            wp, wn = -col[n], col[p]
            row = wp * A[p] + wn * A[n]
            row[var] = 0.0
            new_A.append(row[None, :])
            new_b.append(np.array([wp * b[p] + wn * b[n]]))
    A2 = np.vstack(new_A)
    b2 = np.concatenate(new_b)
    scale = np.abs(A2).max(axis=1)
    scale[scale == 0] = 1.0
    return A2 / scale[:, None], b2 / scale


def oracle_fm(sys: NumericSystem, eliminate, prune: bool = True) -> NumericSystem:
    """Eliminate the listed columns one at a time and delete the eliminated columns.

    Rows with an all-zero left-hand side are dropped when their bound is
    nonnegative; a negative one makes the system infeasible and is kept as
    ``0 <= b``.
    """
    eliminate = list(eliminate)
    A, b = sys.A.copy(), sys.b.copy()
    if not eliminate:
        return NumericSystem(A, b)
    for var in eliminate:
        A, b = _fm_step(A, b, var)
        trivial = np.all(A == 0.0, axis=1) & (b >= -REDUNDANCY_TOL)
        A, b = A[~trivial], b[~trivial]
        if prune and len(b):
            reduced = remove_redundant(NumericSystem(A, b))
            A, b = reduced.A, reduced.b
    kept = [c for c in range(A.shape[1]) if c not in set(eliminate)]
    return NumericSystem(A[:, kept], b)


def oracle_region(bt: BoundTable) -> RateRegion:
    """Rate region obtained by brute-force elimination of the randomization rates."""
    k = bt.k
    reduced = oracle_fm(numeric_wiretap_system(bt), range(k, 2 * k))
    return RateRegion(k, reduced.A, reduced.b)


def cross_check(bt: BoundTable, tol: float = 1e-9) -> bool:
    """Whether brute-force elimination and the closed form describe the same polytope."""
    return polytope_equal(oracle_region(bt), closed_form_region(bt), tol)
