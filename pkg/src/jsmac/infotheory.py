"""Channel and input-policy model, the joint pmf, and the set-indexed bounds.

All information quantities are in bits. A joint pmf is a dense array with
axes ordered ``(q, v_1, ..., v_k, y, z)``; variables are addressed either by
axis number or by name (``"Q"``, ``"V1"`` ... ``"Vk"``, ``"Y"``, ``"Z"``).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import _kernels
from .subsets import SetFamily, SubsetMask, compact_form_direct, nonempty_subsets

MAX_ATOMS = 10**7
SLICE_TOL = 1e-12
MASS_TOL = 1e-10


class DistributionError(ValueError):
    """A pmf slice is malformed; the message names the slice."""


def _check_slices(name: str, arr: np.ndarray, tol: float, axis: int | tuple = -1):
    """Every slice of ``arr`` summed over ``axis`` must be a pmf."""
    if not np.all(np.isfinite(arr)):
        raise DistributionError(f"{name} has non-finite entries")
    if np.any(arr < 0) or np.any(arr > 1):
        raise DistributionError(f"{name} has entries outside [0, 1]")
    sums = arr.sum(axis=axis)
    bad = np.argwhere(np.abs(sums - 1.0) > tol)
    if bad.size:
        where = tuple(int(i) for i in bad[0])
        total = float(np.asarray(sums)[where]) if where else float(sums)
        label = f"{name}[{','.join(map(str, where))}]" if where else name
        raise DistributionError(f"{label} sums to {total:.12g}, expected 1")


@dataclass(frozen=True)
class ChannelSpec:
    """Memoryless kernel ``w[x_1, ..., x_k, y, z] = p(y, z | x_1, ..., x_k)``."""

    w: np.ndarray
    k: int
    tol: float = field(default=SLICE_TOL, repr=False, compare=False)

    def __post_init__(self):
        w = np.asarray(self.w, dtype=np.float64)
        if w.ndim != self.k + 2:
            raise ValueError(f"channel array has {w.ndim} axes, expected k + 2 = {self.k + 2}")
        if any(s < 1 for s in w.shape):
            raise ValueError(f"alphabet sizes must be positive, got {w.shape}")
        _check_slices("p_yz_given_x", w, self.tol, axis=(-2, -1))
        w.setflags(write=False)
        object.__setattr__(self, "w", w)

    @property
    def x_sizes(self) -> tuple[int, ...]:
        return self.w.shape[: self.k]

    @property
    def y_size(self) -> int:
        return self.w.shape[-2]

    @property
    def z_size(self) -> int:
        return self.w.shape[-1]


@dataclass(frozen=True)
class InputPolicy:
    """Time-sharing variable ``Q``, auxiliaries ``V_i | Q`` and prefixes ``X_i | V_i``.

    ``p_v_given_q[i]`` has shape ``(|Q|, |V_i|)`` and ``p_x_given_v[i]`` shape
    ``(|V_i|, |X_i|)``; list position ``i`` is transmitter ``i + 1``.
    """

    p_q: np.ndarray
    p_v_given_q: tuple[np.ndarray, ...]
    p_x_given_v: tuple[np.ndarray, ...]
    tol: float = field(default=SLICE_TOL, repr=False, compare=False)

    def __post_init__(self):
        p_q = np.asarray(self.p_q, dtype=np.float64)
        if p_q.ndim != 1:
            raise ValueError("p_q must be one-dimensional")
        _check_slices("p_q", p_q, self.tol)
        vq = tuple(np.asarray(a, dtype=np.float64) for a in self.p_v_given_q)
        xv = tuple(np.asarray(a, dtype=np.float64) for a in self.p_x_given_v)
        if len(vq) != len(xv):
            raise ValueError(f"{len(vq)} V|Q tables but {len(xv)} X|V tables")
        for i, (a, b) in enumerate(zip(vq, xv), start=1):
            if a.ndim != 2 or a.shape[0] != p_q.size:
                raise ValueError(f"p_v_given_q[{i}] has shape {a.shape}, expected (|Q|={p_q.size}, |V_{i}|)")
            if b.ndim != 2 or b.shape[0] != a.shape[1]:
                raise ValueError(f"p_x_given_v[{i}] has shape {b.shape}, expected (|V_{i}|={a.shape[1]}, |X_{i}|)")
            _check_slices(f"p_v_given_q[{i}]", a, self.tol)
            _check_slices(f"p_x_given_v[{i}]", b, self.tol)
        for arr in (p_q, *vq, *xv):
            arr.setflags(write=False)
        object.__setattr__(self, "p_q", p_q)
        object.__setattr__(self, "p_v_given_q", vq)
        object.__setattr__(self, "p_x_given_v", xv)

    @property
    def k(self) -> int:
        return len(self.p_v_given_q)

    @property
    def q_size(self) -> int:
        return self.p_q.size

    @property
    def v_sizes(self) -> tuple[int, ...]:
        return tuple(a.shape[1] for a in self.p_v_given_q)

    @property
    def x_sizes(self) -> tuple[int, ...]:
        return tuple(a.shape[1] for a in self.p_x_given_v)


@dataclass(frozen=True)
class JointDistribution:
    pmf: np.ndarray
    k: int

    def __post_init__(self):
        pmf = np.asarray(self.pmf, dtype=np.float64)
        if pmf.ndim != self.k + 3:
            raise ValueError(f"joint pmf has {pmf.ndim} axes, expected k + 3 = {self.k + 3}")
        if abs(pmf.sum() - 1.0) > MASS_TOL:
            raise DistributionError(f"joint pmf has total mass {pmf.sum():.12g}")
        pmf.setflags(write=False)
        object.__setattr__(self, "pmf", pmf)

    @property
    def names(self) -> tuple[str, ...]:
        return ("Q", *(f"V{i}" for i in range(1, self.k + 1)), "Y", "Z")

    def axis(self, var: int | str) -> int:
        if isinstance(var, str):
            try:
                return self.names.index(var.upper())
            except ValueError:
                raise ValueError(f"unknown variable {var!r}; known: {self.names}") from None
        if not 0 <= var < self.pmf.ndim:
            raise ValueError(f"axis {var} out of range")
        return int(var)

    def axes(self, variables: Iterable[int | str]) -> tuple[int, ...]:
        return tuple(self.axis(v) for v in variables)

    def v_axes(self, J: SubsetMask) -> tuple[int, ...]:
        return tuple(J.elements())

    def marginal(self, keep: Sequence[int]) -> np.ndarray:
        """Marginal over ``keep`` with axes in the order given."""
        keep = tuple(keep)
        drop = tuple(a for a in range(self.pmf.ndim) if a not in keep)
        m = self.pmf.sum(axis=drop) if drop else self.pmf
        remaining = sorted(keep)
        return np.transpose(m, [remaining.index(a) for a in keep])


def joint_distribution(c: ChannelSpec, p: InputPolicy) -> JointDistribution:
    """``p(q) * prod_i p(v_i|q) * sum_x prod_i p(x_i|v_i) * w(y, z | x)``."""
    if c.k != p.k:
        raise ValueError(f"channel has k={c.k} but policy has k={p.k}")
    if tuple(c.x_sizes) != p.x_sizes:
        raise ValueError(f"channel input alphabets {c.x_sizes} != policy X alphabets {p.x_sizes}")
    atoms = p.q_size * int(np.prod(p.v_sizes)) * c.y_size * c.z_size
    if atoms > MAX_ATOMS:
        raise ValueError(f"joint state space has {atoms} atoms, limit is {MAX_ATOMS}")

    chan = c.w
    for i, px in enumerate(p.p_x_given_v):
        chan = np.moveaxis(np.tensordot(chan, px, axes=([i], [1])), -1, i)

    prior = p.p_q
    for pv in p.p_v_given_q:
        prior = prior[..., None] * pv.reshape((pv.shape[0],) + (1,) * (prior.ndim - 1) + (pv.shape[1],))
    pmf = prior[..., None, None] * chan[None, ...]
    return JointDistribution(pmf, c.k)


def _as_axes(j: JointDistribution, variables) -> tuple[int, ...]:
    if isinstance(variables, (str, int)):
        variables = (variables,)
    return j.axes(variables)


def conditional_mutual_information(j: JointDistribution, A, B, C=()) -> float:
    """``I(A; B | C)`` in bits with ``0 log 0 = 0``."""
    a, b, c = _as_axes(j, A), _as_axes(j, B), _as_axes(j, C)
    if set(a) & set(b) or set(a) & set(c) or set(b) & set(c):
        raise ValueError(f"variable sets overlap: {a}, {b}, {c}")
    if not a or not b:
        return 0.0
    m = j.marginal(a + b + c)
    sa = int(np.prod(m.shape[: len(a)]))
    sb = int(np.prod(m.shape[len(a): len(a) + len(b)]))
    table = np.ascontiguousarray(m.reshape(sa, sb, -1))
    return max(float(_kernels.cmi_from_table(table)), 0.0)


def entropy(j: JointDistribution, A) -> float:
    p = j.marginal(_as_axes(j, A)).ravel()
    p = p[p > 0]
    return float(-(p * np.log2(p)).sum())


def max_factorization_gap(j: JointDistribution) -> float:
    """Largest deviation from ``V_J`` independent of ``V_{J^c}`` given ``Q`` over all ``J``."""
    gap = 0.0
    full = SubsetMask.full(j.k)
    p_q = j.marginal((0,))
    for J in nonempty_subsets(j.k):
        if J == full:
            continue
        ja, jc = j.v_axes(J), j.v_axes(J.complement())
        pjoint = j.marginal((0,) + ja + jc)
        pa = j.marginal((0,) + ja)
        pc = j.marginal((0,) + jc)
        safe_q = np.where(p_q > 0, p_q, 1.0)
        pa_ = pa.reshape(pa.shape + (1,) * len(jc))
        pc_ = pc.reshape((pc.shape[0],) + (1,) * len(ja) + pc.shape[1:])
        q_ = safe_q.reshape((-1,) + (1,) * (len(ja) + len(jc)))
        gap = max(gap, float(np.abs(pjoint - pa_ * pc_ / q_).max()))
    return gap


def _key(J) -> int:
    return J.bits if isinstance(J, SubsetMask) else int(J)


@dataclass(frozen=True)
class BoundTable:
    """``b_plus[J] = I(V_J; Y | V_{J^c}, Q)``, ``b_minus[J] = I(V_J; Z | Q)``, keyed by mask bits.

    The empty set maps to exactly 0 in both tables.
    """

    k: int
    b_plus: Mapping[int, float]
    b_minus: Mapping[int, float]

    def __post_init__(self):
        bp = {int(key): float(v) for key, v in self.b_plus.items()}
        bm = {int(key): float(v) for key, v in self.b_minus.items()}
        for table, name in ((bp, "b_plus"), (bm, "b_minus")):
            table.setdefault(0, 0.0)
            missing = [b for b in range(1 << self.k) if b not in table]
            if missing:
                raise ValueError(f"{name} is missing subsets {[str(SubsetMask(b, self.k)) for b in missing]}")
            if table[0] != 0.0:
                raise ValueError(f"{name} of the empty set must be 0")
        object.__setattr__(self, "b_plus", bp)
        object.__setattr__(self, "b_minus", bm)

    def plus(self, J) -> float:
        return self.b_plus[_key(J)]

    def minus(self, J) -> float:
        return self.b_minus[_key(J)]

    def gap(self, J) -> float:
        return self.plus(J) - self.minus(J)


def bound_table(j: JointDistribution) -> BoundTable:
    q, y, z = j.axis("Q"), j.axis("Y"), j.axis("Z")
    b_plus, b_minus = {0: 0.0}, {0: 0.0}
    for J in nonempty_subsets(j.k):
        vj = j.v_axes(J)
        cond = (q,) + j.v_axes(J.complement())
        b_plus[J.bits] = conditional_mutual_information(j, vj, (y,), cond)
        b_minus[J.bits] = conditional_mutual_information(j, vj, (z,), (q,))
    return BoundTable(j.k, b_plus, b_minus)


def check_rate_condition(rates: Sequence[float] | Mapping[int, float], bt: BoundTable):
    """Test ``sum_{j in J} R_j >= b_minus[J]`` for every nonempty ``J``.

    ``rates`` is a length-``k`` sequence or a mapping from 1-based index to rate.
    Returns ``(True, None)`` or ``(False, J)`` for the first violating ``J`` in
    mask order.
    """
    if isinstance(rates, Mapping):
        r = [float(rates.get(i, 0.0)) for i in range(1, bt.k + 1)]
    else:
        r = [float(x) for x in rates]
    if len(r) != bt.k:
        raise ValueError(f"expected {bt.k} rates, got {len(r)}")
    if any(x < 0 for x in r):
        raise ValueError(f"rates must be nonnegative, got {r}")
    for J in nonempty_subsets(bt.k):
        if sum(r[e - 1] for e in J.elements()) < bt.minus(J) - 1e-12:
            return False, J
    return True, None


def check_modularity(bt: BoundTable, T1: SubsetMask, T2: SubsetMask) -> tuple[float, float]:
    """Submodularity residual of ``b_plus`` and supermodularity residual of ``b_minus``."""
    lo, hi = T1 & T2, T1 | T2
    sub = bt.plus(T1) + bt.plus(T2) - bt.plus(lo) - bt.plus(hi)
    sup = bt.minus(lo) + bt.minus(hi) - bt.minus(T1) - bt.minus(T2)
    return sub, sup


def check_dominance_sums(bt: BoundTable, F: SetFamily) -> tuple[float, float]:
    """How far ``sum b_plus`` drops and ``sum b_minus`` rises when ``F`` is compacted."""
    if len(F) == 0:
        raise ValueError("dominance sums need a nonempty family")
    star = compact_form_direct(F)
    plus = sum(bt.plus(T) for T in F) - sum(bt.plus(T) for T in star)
    minus = sum(bt.minus(T) for T in star) - sum(bt.minus(T) for T in F)
    return plus, minus


# ------------------------------------------------------------------ sampling


def _simplex(rng: np.random.Generator, shape: tuple[int, ...], n: int) -> np.ndarray:
    """Flat-Dirichlet draws: an array of ``shape + (n,)`` whose last axis are pmfs."""
    return rng.dirichlet(np.ones(n), size=shape) if shape else rng.dirichlet(np.ones(n))


def random_channel(
    k: int,
    rng: np.random.Generator,
    max_alphabet: int = 3,
    max_q: int = 2,
    eve_noise: float = 0.0,
) -> tuple[ChannelSpec, InputPolicy]:
    """Random channel and input policy; every conditional slice is flat-Dirichlet.

    Alphabet sizes for ``V_i``, ``X_i``, ``Y`` and ``Z`` are drawn uniformly
    from ``2..max_alphabet`` and ``|Q|`` from ``1..max_q``. With
    ``eve_noise = e`` the kernel becomes ``(1 - e) w + e p(y|x) / |Z|``: the
    eavesdropper sees pure noise with probability ``e``, which makes nonempty
    regions likely.
    """
    if not 0.0 <= eve_noise <= 1.0:
        raise ValueError(f"eve_noise must lie in [0, 1], got {eve_noise}")
    lo = min(2, max_alphabet)
    q_size = int(rng.integers(1, max_q + 1))
    v_sizes = [int(s) for s in rng.integers(lo, max_alphabet + 1, size=k)]
    x_sizes = [int(s) for s in rng.integers(lo, max_alphabet + 1, size=k)]
    y_size, z_size = (int(s) for s in rng.integers(lo, max_alphabet + 1, size=2))

    p_q = _simplex(rng, (), q_size)
    p_vq = tuple(_simplex(rng, (q_size,), v) for v in v_sizes)
    p_xv = tuple(_simplex(rng, (v,), x) for v, x in zip(v_sizes, x_sizes))
    w = _simplex(rng, tuple(x_sizes), y_size * z_size).reshape(*x_sizes, y_size, z_size)
    if eve_noise:
        w = (1.0 - eve_noise) * w + eve_noise * w.sum(axis=-1, keepdims=True) / z_size
    return ChannelSpec(w, k), InputPolicy(p_q, p_vq, p_xv)


def random_joint(k: int, rng: np.random.Generator, **kwargs) -> JointDistribution:
    return joint_distribution(*random_channel(k, rng, **kwargs))


def random_bound_table(k: int, rng: np.random.Generator, **kwargs) -> BoundTable:
    return bound_table(random_joint(k, rng, **kwargs))
