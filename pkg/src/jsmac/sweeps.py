"""Seeded property sweeps shared by the ``props``/``verify`` commands and the tests.

Randomness: ``numpy.random.default_rng`` (PCG64). Trial ``i`` of a sweep
seeded with ``s`` uses the ``i``-th child of ``SeedSequence(s).spawn(n)``, so
a trial's draw does not depend on how many trials run.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product

import numpy as np

from .infotheory import (
    BoundTable,
    bound_table,
    check_dominance_sums,
    check_modularity,
    conditional_mutual_information,
    random_channel,
    joint_distribution,
)
from .subsets import SetFamily, SubsetMask, compact_batch, presence_batch
from .oracle import cross_check, oracle_mi

PROPERTY_TOL = 1e-10


def trial_rngs(seed: int, n: int) -> list[np.random.Generator]:
    return [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(n)]


def all_families(k: int, t: int) -> np.ndarray:
    """Every ordered length-``t`` family over ``k`` elements, empty members included."""
    grid = np.indices((1 << k,) * t, dtype=np.int64).reshape(t, -1).T
    return np.ascontiguousarray(grid)


def compact_recursive_batch(families: np.ndarray) -> np.ndarray:
    """Column-wise version of :func:`jsmac.subsets.compact_form_recursive`."""
    families = np.asarray(families, dtype=np.int64)
    n, t = families.shape
    cur = families[:, :1].copy()
    for s in range(1, t):
        T = families[:, s]
        nxt = np.empty((n, s + 1), dtype=np.int64)
        nxt[:, 0] = cur[:, 0] | T
        for i in range(1, s):
            nxt[:, i] = cur[:, i] | (cur[:, i - 1] & T)
        nxt[:, s] = cur[:, s - 1] & T
        cur = nxt
    return cur


@dataclass
class SweepReport:
    name: str
    checked: int = 0
    min_residual: float = float("inf")
    failures: list = field(default_factory=list)
    max_error: float | None = None

    @property
    def passed(self) -> bool:
        return not self.failures

    def line(self) -> str:
        verdict = "PASS" if self.passed else "FAIL"
        res = "" if self.min_residual == float("inf") else f", min residual {self.min_residual:.3e}"
        if self.max_error is not None:
            res += f", max disagreement {self.max_error:.3e}"
        return f"{verdict} {self.name}: {self.checked} checks{res}, {len(self.failures)} failures"


def exhaustive_compact_sweep(k_max: int = 4, t_max: int = 4) -> tuple[SweepReport, SweepReport]:
    """Presence invariance and direct-vs-recursive agreement over all small families."""
    presence = SweepReport("presence vector preserved by compaction")
    recursion = SweepReport("recursive compact form equals direct")
    for k in range(1, k_max + 1):
        for t in range(1, t_max + 1):
            fams = all_families(k, t)
            direct = compact_batch(fams, k)
            rec = compact_recursive_batch(fams)
            bad_p = np.flatnonzero(np.any(presence_batch(fams, k) != presence_batch(direct, k), axis=1))
            bad_r = np.flatnonzero(np.any(direct != rec, axis=1))
            presence.checked += len(fams)
            recursion.checked += len(fams)
            presence.failures += [(k, fams[i].tolist()) for i in bad_p[:5]]
            recursion.failures += [(k, fams[i].tolist()) for i in bad_r[:5]]
    return presence, recursion


def random_tables(n: int, k: int, seed: int, max_alphabet: int = 3, eve_noise: float = 0.0) -> list[BoundTable]:
    return [
        bound_table(joint_distribution(*random_channel(k, rng, max_alphabet, eve_noise=eve_noise)))
        for rng in trial_rngs(seed, n)
    ]


def modularity_sweep(tables: list[BoundTable]) -> SweepReport:
    rep = SweepReport("b+ submodular / b- supermodular")
    for idx, bt in enumerate(tables):
        n = 1 << bt.k
        for a, b in product(range(n), repeat=2):
            r = check_modularity(bt, SubsetMask(a, bt.k), SubsetMask(b, bt.k))
            rep.checked += 1
            rep.min_residual = min(rep.min_residual, *r)
            if min(r) < -PROPERTY_TOL:
                rep.failures.append((idx, a, b, r))
    return rep


def random_families(n: int, k: int, seed: int, t_max: int = 4) -> list[SetFamily]:
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(n):
        t = int(rng.integers(1, t_max + 1))
        out.append(SetFamily.from_bits(rng.integers(0, 1 << k, size=t), k))
    return out


def dominance_sweep(tables: list[BoundTable], families: list[SetFamily]) -> SweepReport:
    rep = SweepReport("compaction lowers sum b+ and raises sum b-")
    for idx, bt in enumerate(tables):
        for F in families:
            r = check_dominance_sums(bt, F)
            rep.checked += 1
            rep.min_residual = min(rep.min_residual, *r)
            if min(r) < -PROPERTY_TOL:
                rep.failures.append((idx, F.bits(), r))
    return rep


def mi_agreement_sweep(n: int, seed: int, k: int = 2, max_alphabet: int = 3) -> SweepReport:
    """Main vs brute-force conditional MI on random joints and random variable splits."""
    rep = SweepReport("conditional MI agrees with brute-force entropy sums")
    worst = 0.0
    for rng in trial_rngs(seed, n):
        j = joint_distribution(*random_channel(k, rng, max_alphabet))
        labels = rng.permutation(j.pmf.ndim)
        roles = rng.integers(0, 4, size=j.pmf.ndim)  # 0: A, 1: B, 2: C, 3: unused
        roles[labels[0]], roles[labels[1]] = 0, 1
        A, B, C = (tuple(int(a) for a in np.flatnonzero(roles == r)) for r in range(3))
        main = conditional_mutual_information(j, A, B, C)
        ref = oracle_mi(j, A, B, C)
        rep.checked += 1
        worst = max(worst, abs(main - ref))
        if abs(main - ref) > PROPERTY_TOL:
            rep.failures.append((A, B, C, main, ref))
    rep.max_error = worst
    return rep


def equivalence_sweep(
    n: int, k: int, seed: int, tol: float = 1e-9, eve_noise: float = 0.0
) -> list[tuple[int, bool, BoundTable]]:
    """Brute-force elimination vs closed form on ``n`` random channels."""
    tables = random_tables(n, k, seed, eve_noise=eve_noise)
    return [(i, cross_check(bt, tol), bt) for i, bt in enumerate(tables)]
