"""Subsets of the transmitter index set and families of them.

Elements are numbered ``1..k`` in every user-facing place; a :class:`SubsetMask`
stores them 0-based as bits (element ``i`` lives in bit ``i - 1``).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

import numpy as np

from . import _kernels


@dataclass(frozen=True, order=True)
class SubsetMask:
    """A subset of ``{1, ..., k}`` stored as a ``k``-bit integer."""

    bits: int
    k: int

    def __post_init__(self):
        if self.k < 0:
            raise ValueError(f"ground set size must be nonnegative, got {self.k}")
        if self.bits < 0 or self.bits >> self.k:
            raise ValueError(f"mask {self.bits:#b} has bits outside a ground set of size {self.k}")

    @classmethod
    def from_elements(cls, elements: Iterable[int], k: int) -> "SubsetMask":
        bits = 0
        for e in elements:
            if not 1 <= e <= k:
                raise ValueError(f"element {e} outside 1..{k}")
            bits |= 1 << (e - 1)
        return cls(bits, k)

    @classmethod
    def full(cls, k: int) -> "SubsetMask":
        return cls((1 << k) - 1, k)

    @classmethod
    def empty(cls, k: int) -> "SubsetMask":
        return cls(0, k)

    def elements(self) -> tuple[int, ...]:
        """1-based elements in ascending order."""
        return tuple(i + 1 for i in range(self.k) if (self.bits >> i) & 1)

    def complement(self) -> "SubsetMask":
        return SubsetMask(((1 << self.k) - 1) & ~self.bits, self.k)

    def issubset(self, other: "SubsetMask") -> bool:
        return self.bits & ~other.bits == 0

    def _check(self, other: "SubsetMask"):
        if self.k != other.k:
            raise ValueError(f"ground set sizes differ: {self.k} vs {other.k}")

    def __and__(self, other: "SubsetMask") -> "SubsetMask":
        self._check(other)
        return SubsetMask(self.bits & other.bits, self.k)

    def __or__(self, other: "SubsetMask") -> "SubsetMask":
        self._check(other)
        return SubsetMask(self.bits | other.bits, self.k)

    def __len__(self) -> int:
        return bin(self.bits).count("1")

    def __bool__(self) -> bool:
        return self.bits != 0

    def __iter__(self) -> Iterator[int]:
        return iter(self.elements())

    def __str__(self) -> str:
        if not self.bits:
            return "∅"
        return "{" + ",".join(str(e) for e in self.elements()) + "}"


def nonempty_subsets(k: int) -> list[SubsetMask]:
    """All ``2**k - 1`` nonempty subsets, ordered by mask value."""
    return [SubsetMask(b, k) for b in range(1, 1 << k)]


@dataclass(frozen=True)
class SetFamily:
    """Ordered list of subsets of one ground set; duplicates are kept."""

    members: tuple[SubsetMask, ...]
    k: int

    def __post_init__(self):
        object.__setattr__(self, "members", tuple(self.members))
        for m in self.members:
            if m.k != self.k:
                raise ValueError(f"member {m} has ground size {m.k}, family has {self.k}")

    @classmethod
    def from_lists(cls, sets: Iterable[Iterable[int]], k: int) -> "SetFamily":
        return cls(tuple(SubsetMask.from_elements(s, k) for s in sets), k)

    @classmethod
    def from_bits(cls, bits: Iterable[int], k: int) -> "SetFamily":
        return cls(tuple(SubsetMask(int(b), k) for b in bits), k)

    def bits(self) -> tuple[int, ...]:
        return tuple(m.bits for m in self.members)

    def nonempty(self) -> "SetFamily":
        return SetFamily(tuple(m for m in self.members if m), self.k)

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self) -> Iterator[SubsetMask]:
        return iter(self.members)

    def __getitem__(self, i: int) -> SubsetMask:
        return self.members[i]

    def __str__(self) -> str:
        return "(" + ", ".join(str(m) for m in self.members) + ")"


@dataclass(frozen=True)
class PresenceVector:
    """Per-element appearance counts of a family, element 1 first."""

    counts: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "counts", tuple(int(c) for c in self.counts))
        if any(c < 0 for c in self.counts):
            raise ValueError(f"negative presence count in {self.counts}")

    @property
    def k(self) -> int:
        return len(self.counts)

    def __str__(self) -> str:
        return "(" + ",".join(str(c) for c in self.counts) + ")"


def indicator_vector(T: SubsetMask) -> np.ndarray:
    """0/1 vector of length ``k``; position ``i`` (0-based) marks element ``i + 1``."""
    return ((T.bits >> np.arange(T.k)) & 1).astype(np.int64)


def presence_vector(F: SetFamily) -> PresenceVector:
    if len(F) == 0:
        return PresenceVector((0,) * F.k)
    masks = np.array([F.bits()], dtype=np.int64)
    return PresenceVector(tuple(_kernels.presence_batch(masks, F.k)[0]))


def t_max(p: PresenceVector) -> int:
    return max(p.counts, default=0)


def _require_nonempty(F: SetFamily):
    if len(F) == 0:
        raise ValueError("compact form is undefined for an empty family (t = 0)")


def compact_form_direct(F: SetFamily) -> SetFamily:
    """Compact form by thresholding: member ``i`` holds the elements seen at least ``i`` times."""
    _require_nonempty(F)
    masks = np.array([F.bits()], dtype=np.int64)
    return SetFamily.from_bits(_kernels.compact_batch(masks, F.k)[0], F.k)


def compact_form_recursive(F: SetFamily) -> SetFamily:
    """Compact form grown one member at a time from the compact form of the prefix.

    With ``C`` the compact form of the first ``t - 1`` members and ``T`` the
    next member, the new form is ``C[0] | T``, then ``C[i] | (C[i-1] & T)``,
    and finally ``C[t-2] & T``.
    """
    _require_nonempty(F)
    current = [F.members[0].bits]
    for T in F.members[1:]:
        t = T.bits
        nxt = [current[0] | t]
        for i in range(1, len(current)):
            nxt.append(current[i] | (current[i - 1] & t))
        nxt.append(current[-1] & t)
        current = nxt
    return SetFamily.from_bits(current, F.k)


def compact_batch(families: Sequence[Sequence[int]] | np.ndarray, k: int) -> np.ndarray:
    """Vectorised :func:`compact_form_direct` over an ``(n, t)`` array of masks."""
    return _kernels.compact_batch(np.ascontiguousarray(families, dtype=np.int64), k)


def presence_batch(families: Sequence[Sequence[int]] | np.ndarray, k: int) -> np.ndarray:
    return _kernels.presence_batch(np.ascontiguousarray(families, dtype=np.int64), k)


def parse_subset(text: str, k: int) -> SubsetMask:
    """Parse ``"1,2"`` (or ``"{1,2}"``, ``"∅"``, ``"{}"``) into a mask."""
    body = text.strip().strip("{}").strip()
    if body in ("", "∅"):
        return SubsetMask.empty(k)
    try:
        elems = [int(tok) for tok in body.split(",")]
    except ValueError:
        raise ValueError(f"cannot parse subset {text!r}") from None
    return SubsetMask.from_elements(elems, k)
