"""Hot numeric loops, each with a numba and a numpy implementation.

The public names at the bottom dispatch to one of the two according to
:mod:`jsmac._backend`. Both implementations are importable directly so the
test-suite and the benchmark can compare them.
"""

from itertools import combinations

import numpy as np

from ._backend import USE_NUMBA, njit

PIVOT_FLOOR = 1e-12


# ---------------------------------------------------------------- set families


@njit(cache=True)
def _presence_batch_nb(masks, k):
    n, t = masks.shape
    out = np.zeros((n, k), dtype=np.int64)
    for r in range(n):
        for i in range(t):
            m = masks[r, i]
            for e in range(k):
                if (m >> e) & 1:
                    out[r, e] += 1
    return out


def _presence_batch_np(masks, k):
    masks = np.asarray(masks, dtype=np.int64)
    bits = (masks[..., None] >> np.arange(k, dtype=np.int64)) & 1
    return bits.sum(axis=1).astype(np.int64)


@njit(cache=True)
def _compact_batch_nb(masks, k):
    n, t = masks.shape
    out = np.zeros((n, t), dtype=np.int64)
    counts = np.zeros(k, dtype=np.int64)
    for r in range(n):
        counts[:] = 0
        for i in range(t):
            m = masks[r, i]
            for e in range(k):
                if (m >> e) & 1:
                    counts[e] += 1
        for i in range(t):
            acc = 0
            for e in range(k):
                if counts[e] >= i + 1:
                    acc |= 1 << e
            out[r, i] = acc
    return out


def _compact_batch_np(masks, k):
    masks = np.asarray(masks, dtype=np.int64)
    t = masks.shape[1]
    counts = _presence_batch_np(masks, k)
    levels = np.arange(1, t + 1, dtype=np.int64)
    hit = counts[:, None, :] >= levels[None, :, None]
    weights = np.int64(1) << np.arange(k, dtype=np.int64)
    return (hit * weights).sum(axis=2).astype(np.int64)


# ---------------------------------------------------------- mutual information


@njit(cache=True)
def _cmi_nb(p3):
    a, b, c = p3.shape
    pac = np.zeros((a, c))
    pbc = np.zeros((b, c))
    pc = np.zeros(c)
    for i in range(a):
        for j in range(b):
            for l in range(c):
                v = p3[i, j, l]
                pac[i, l] += v
                pbc[j, l] += v
                pc[l] += v
    total = 0.0
    for i in range(a):
        for j in range(b):
            for l in range(c):
                v = p3[i, j, l]
                if v > 0.0:
                    total += v * np.log2(v * pc[l] / (pac[i, l] * pbc[j, l]))
    return total


def _cmi_np(p3):
    p3 = np.asarray(p3, dtype=np.float64)
    pac = p3.sum(axis=1, keepdims=True)
    pbc = p3.sum(axis=0, keepdims=True)
    pc = p3.sum(axis=(0, 1), keepdims=True)
    num = p3 * pc
    den = pac * pbc
    live = p3 > 0.0
    ratio = np.ones_like(p3)
    ratio[live] = (num / np.where(live, den, 1.0))[live]
    return float(np.sum(p3[live] * np.log2(ratio[live])))


# ------------------------------------------------------- vertex basis solves


@njit(cache=True)
def _basis_vertices_nb(A, b, tol):
    m, d = A.shape
    if d == 0 or m < d:
        return np.zeros((0, d))
    idx = np.arange(d)
    cap = 64
    out = np.zeros((cap, d))
    n_out = 0
    M = np.zeros((d, d))
    rhs = np.zeros(d)
    x = np.zeros(d)
    while True:
        for r in range(d):
            for col in range(d):
                M[r, col] = A[idx[r], col]
            rhs[r] = b[idx[r]]
        ok = True
        for col in range(d):
            piv = col
            best = abs(M[col, col])
            for r in range(col + 1, d):
                if abs(M[r, col]) > best:
                    best = abs(M[r, col])
                    piv = r
            if best < 1e-12:
                ok = False
                break
            if piv != col:
                for cc in range(d):
                    tmp = M[col, cc]
                    M[col, cc] = M[piv, cc]
                    M[piv, cc] = tmp
                tmp = rhs[col]
                rhs[col] = rhs[piv]
                rhs[piv] = tmp
            for r in range(col + 1, d):
                f = M[r, col] / M[col, col]
                if f != 0.0:
                    for cc in range(col, d):
                        M[r, cc] -= f * M[col, cc]
                    rhs[r] -= f * rhs[col]
        if ok:
            for r in range(d - 1, -1, -1):
                s = rhs[r]
                for cc in range(r + 1, d):
                    s -= M[r, cc] * x[cc]
                x[r] = s / M[r, r]
            feasible = True
            for r in range(m):
                s = 0.0
                for cc in range(d):
                    s += A[r, cc] * x[cc]
                if s > b[r] + tol:
                    feasible = False
                    break
            if feasible:
                if n_out == cap:
                    grown = np.zeros((2 * cap, d))
                    grown[:cap] = out
                    out = grown
                    cap *= 2
                out[n_out] = x
                n_out += 1
        # next combination in lexicographic order
        i = d - 1
        while i >= 0 and idx[i] == m - d + i:
            i -= 1
        if i < 0:
            break
        idx[i] += 1
        for j in range(i + 1, d):
            idx[j] = idx[j - 1] + 1
    return out[:n_out].copy()


def _basis_vertices_np(A, b, tol):
    A = np.asarray(A, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    m, d = A.shape
    if d == 0 or m < d:
        return np.zeros((0, d))
    combos = np.array(list(combinations(range(m), d)), dtype=np.int64)
    M = A[combos].copy()
    rhs = b[combos].copy()
    n = len(combos)
    ok = np.ones(n, dtype=bool)
    rows = np.arange(n)
    for col in range(d):
        piv = col + np.argmax(np.abs(M[:, col:, col]), axis=1)
        best = np.abs(M[rows, piv, col])
        ok &= best >= PIVOT_FLOOR
        top = M[rows, col].copy()
        M[rows, col] = M[rows, piv]
        M[rows, piv] = top
        top_r = rhs[rows, col].copy()
        rhs[rows, col] = rhs[rows, piv]
        rhs[rows, piv] = top_r
        diag = np.where(ok, M[rows, col, col], 1.0)
        for r in range(col + 1, d):
            f = M[:, r, col] / diag
            M[:, r, col:] -= f[:, None] * M[:, col, col:]
            rhs[:, r] -= f * rhs[:, col]
    x = np.zeros((n, d))
    for r in range(d - 1, -1, -1):
        s = rhs[:, r] - np.einsum("nc,nc->n", M[:, r, r + 1:], x[:, r + 1:])
        x[:, r] = s / np.where(ok, M[:, r, r], 1.0)
    x = x[ok]
    feasible = np.all(x @ A.T <= b + tol, axis=1)
    return x[feasible]


if USE_NUMBA:
    presence_batch = _presence_batch_nb
    compact_batch = _compact_batch_nb
    cmi_from_table = _cmi_nb
    basis_vertices = _basis_vertices_nb
else:
    presence_batch = _presence_batch_np
    compact_batch = _compact_batch_np
    cmi_from_table = _cmi_np
    basis_vertices = _basis_vertices_np

IMPLEMENTATIONS = {
    "numba": {
        "presence_batch": _presence_batch_nb,
        "compact_batch": _compact_batch_nb,
        "cmi_from_table": _cmi_nb,
        "basis_vertices": _basis_vertices_nb,
    },
    "numpy": {
        "presence_batch": _presence_batch_np,
        "compact_batch": _compact_batch_np,
        "cmi_from_table": _cmi_np,
        "basis_vertices": _basis_vertices_np,
    },
}
