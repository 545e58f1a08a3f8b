"""Exact symbolic Fourier-Motzkin elimination of the randomization rates.

Variables are ordered ``R_1..R_k`` (message rates) followed by
``R_1r..R_kr`` (randomization rates); variable index ``k + i - 1`` is
``R_ir``. Right-hand sides are :class:`SymbolicAffine` combinations of the
symbols ``b+J`` and ``b-J``; all arithmetic is in :class:`fractions.Fraction`.

Text form of one row (see README for the grammar)::

    1*R1 + 1*R2 <= b+{1,2} - b-{1,2}
"""

from __future__ import annotations

import re
from fractions import Fraction
from functools import reduce
from math import gcd, lcm
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

from .infotheory import BoundTable, random_bound_table
from .oracle import NumericSystem
from .subsets import SetFamily, SubsetMask, compact_form_direct, nonempty_subsets, parse_subset

MAX_K = 8

PLUS, MINUS = "+", "-"
Symbol = tuple  # (sign, mask bits)


def _frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


class SymbolicAffine:
    """Exact linear combination of ``b+J`` / ``b-J`` symbols plus a constant."""

    __slots__ = ("_coeffs", "constant", "_hash")

    def __init__(self, coeffs: Mapping[Symbol, object] | None = None, constant=0):
        clean = {}
        for sym, v in (coeffs or {}).items():
            sign, bits = sym
            if sign not in (PLUS, MINUS) or int(bits) <= 0:
                raise ValueError(f"bad symbol {sym!r}")
            v = _frac(v)
            if v:
                clean[(sign, int(bits))] = v
        self._coeffs = clean
        self.constant = _frac(constant)
        self._hash = None

    @classmethod
    def plus(cls, J: SubsetMask | int) -> "SymbolicAffine":
        bits = J.bits if isinstance(J, SubsetMask) else J
        return cls({(PLUS, bits): 1}) if bits else cls()

    @classmethod
    def minus(cls, J: SubsetMask | int) -> "SymbolicAffine":
        bits = J.bits if isinstance(J, SubsetMask) else J
        return cls({(MINUS, bits): 1}) if bits else cls()

    @property
    def coeffs(self) -> dict:
        return dict(self._coeffs)

    def __getitem__(self, sym: Symbol) -> Fraction:
        return self._coeffs.get(sym, Fraction(0))

    def items(self):
        return sorted(self._coeffs.items(), key=lambda kv: (kv[0][0] == MINUS, kv[0][1]))

    def __add__(self, other: "SymbolicAffine") -> "SymbolicAffine":
        out = dict(self._coeffs)
        for sym, v in other._coeffs.items():
            out[sym] = out.get(sym, 0) + v
        return SymbolicAffine(out, self.constant + other.constant)

    def __neg__(self) -> "SymbolicAffine":
        return self * -1

    def __sub__(self, other: "SymbolicAffine") -> "SymbolicAffine":
        return self + (-other)

    def __mul__(self, scalar) -> "SymbolicAffine":
        s = _frac(scalar)
        return SymbolicAffine({sym: v * s for sym, v in self._coeffs.items()}, self.constant * s)

    __rmul__ = __mul__

    def __truediv__(self, scalar) -> "SymbolicAffine":
        return self * (1 / _frac(scalar))

    def __eq__(self, other) -> bool:
        if not isinstance(other, SymbolicAffine):
            return NotImplemented
        return self._coeffs == other._coeffs and self.constant == other.constant

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((frozenset(self._coeffs.items()), self.constant))
        return self._hash

    def evaluate(self, bt: BoundTable) -> float:
        total = float(self.constant)
        for (sign, bits), v in self._coeffs.items():
            if bits >= 1 << bt.k:
                raise KeyError(f"symbol b{sign}{SubsetMask(bits, bits.bit_length())} not in a k={bt.k} table")
            total += float(v) * (bt.plus(bits) if sign == PLUS else bt.minus(bits))
        return total

    def format(self, k: int) -> str:
        terms = []
        for (sign, bits), v in self.items():
            terms.append((v, f"b{sign}{SubsetMask(bits, k)}"))
        if self.constant:
            terms.append((self.constant, None))
        if not terms:
            return "0"
        return _join_terms(terms)

    def __repr__(self) -> str:
        k = max((bits.bit_length() for _, bits in self._coeffs), default=1)
        return f"SymbolicAffine({self.format(k)!r})"


def _join_terms(terms: Sequence[tuple[Fraction, str | None]], explicit_one: bool = False) -> str:
    out = []
    for v, name in terms:
        mag = abs(v)
        if name is None:
            body = str(mag)
        elif mag == 1 and not explicit_one:
            body = name
        else:
            body = f"{mag}*{name}"
        if not out:
            out.append(body if v > 0 else f"-{body}")
        else:
            out.append(f"{'+' if v > 0 else '-'} {body}")
    return " ".join(out)


def var_names(k: int) -> list[str]:
    return [f"R{i}" for i in range(1, k + 1)] + [f"R{i}r" for i in range(1, k + 1)]


def rand_var(k: int, i: int) -> int:
    """Index of ``R_ir`` (``i`` is 1-based)."""
    return k + i - 1


class Inequality:
    """``lhs . x <= rhs`` over the ``2k`` rate variables."""

    __slots__ = ("lhs", "rhs", "_hash")

    def __init__(self, lhs: Iterable, rhs: SymbolicAffine):
        self.lhs = tuple(_frac(v) for v in lhs)
        if len(self.lhs) % 2:
            raise ValueError("lhs must have even length 2k")
        self.rhs = rhs
        self._hash = None

    @property
    def k(self) -> int:
        return len(self.lhs) // 2

    @property
    def rate_part(self) -> tuple[Fraction, ...]:
        return self.lhs[: self.k]

    @property
    def rand_part(self) -> tuple[Fraction, ...]:
        return self.lhs[self.k:]

    def is_rate_only(self) -> bool:
        return not any(self.rand_part)

    def scaled(self, s) -> "Inequality":
        s = _frac(s)
        if s <= 0:
            raise ValueError("inequalities may only be scaled by positive factors")
        return Inequality((v * s for v in self.lhs), self.rhs * s)

    def normalized(self) -> "Inequality":
        """Scale so the lhs is integral with coprime entries."""
        if not any(self.lhs):
            return self
        den = reduce(lcm, (v.denominator for v in self.lhs), 1)
        g = reduce(gcd, (int(v * den) for v in self.lhs), 0)
        s = Fraction(den, g)
        return self if s == 1 else self.scaled(s)

    def rate_mask(self) -> int:
        return sum(1 << i for i, v in enumerate(self.rate_part) if v)

    def sort_key(self):
        return (self.rate_mask(), self.rate_part, self.rand_part, self.rhs.format(self.k))

    def __eq__(self, other) -> bool:
        if not isinstance(other, Inequality):
            return NotImplemented
        return self.lhs == other.lhs and self.rhs == other.rhs

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.lhs, self.rhs))
        return self._hash

    def format(self) -> str:
        names = var_names(self.k)
        terms = [(v, n) for v, n in zip(self.lhs, names) if v]
        lhs = _join_terms(terms, explicit_one=True) if terms else "0"
        return f"{lhs} <= {self.rhs.format(self.k)}"

    __str__ = format

    def __repr__(self) -> str:
        return f"Inequality({self.format()!r})"


class InequalitySystem:
    __slots__ = ("rows", "k")

    def __init__(self, rows: Iterable[Inequality], k: int):
        self.rows = tuple(rows)
        self.k = k
        for r in self.rows:
            if len(r.lhs) != 2 * k:
                raise ValueError(f"row {r} has {len(r.lhs)} coefficients, expected {2 * k}")

    def __len__(self) -> int:
        return len(self.rows)

    def __iter__(self):
        return iter(self.rows)

    def __eq__(self, other) -> bool:
        if not isinstance(other, InequalitySystem):
            return NotImplemented
        return self.k == other.k and self.rows == other.rows

    def canonical(self) -> "InequalitySystem":
        """Normalized, de-duplicated, sorted by rate-support mask."""
        uniq = {r.normalized() for r in self.rows}
        return InequalitySystem(sorted(uniq, key=Inequality.sort_key), self.k)

    def format(self) -> str:
        return "\n".join(r.format() for r in self.rows)

    __str__ = format

    def __repr__(self) -> str:
        return f"InequalitySystem(k={self.k}, rows={len(self.rows)})"


_TERM = re.compile(r"\s*([+-])?\s*(?:(\d+(?:/\d+)?)\s*\*\s*)?(b[+-]\{[^}]*\}|R\d+r?|\d+(?:/\d+)?)\s*")


def _parse_terms(text: str) -> list[tuple[Fraction, str]]:
    text = text.strip()
    if text == "0":
        return []
    pos, out = 0, []
    while pos < len(text):
        m = _TERM.match(text, pos)
        if not m or m.end() == pos:
            raise ValueError(f"cannot parse {text[pos:]!r}")
        sign, coef, name = m.groups()
        if out and sign is None:
            raise ValueError(f"missing operator before {name!r}")
        v = Fraction(coef) if coef else Fraction(1)
        if re.fullmatch(r"\d+(?:/\d+)?", name):
            v, name = v * Fraction(name), ""
        out.append((-v if sign == "-" else v, name))
        pos = m.end()
    return out


def parse_inequality(line: str, k: int) -> Inequality:
    """Inverse of :meth:`Inequality.format`."""
    if "<=" not in line:
        raise ValueError(f"no '<=' in {line!r}")
    left, right = line.split("<=", 1)
    index = {n: i for i, n in enumerate(var_names(k))}
    lhs = [Fraction(0)] * (2 * k)
    for v, name in _parse_terms(left):
        if name not in index:
            raise ValueError(f"unknown variable {name!r} for k={k}")
        lhs[index[name]] += v
    coeffs, const = {}, Fraction(0)
    for v, name in _parse_terms(right):
        if not name:
            const += v
            continue
        if not name.startswith(("b+", "b-")):
            raise ValueError(f"unexpected term {name!r} on the right-hand side")
        J = parse_subset(name[2:], k)
        sym = (name[1], J.bits)
        coeffs[sym] = coeffs.get(sym, 0) + v
    return Inequality(lhs, SymbolicAffine(coeffs, const))


def parse_system(text: str, k: int) -> InequalitySystem:
    lines = [ln for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    return InequalitySystem((parse_inequality(ln, k) for ln in lines), k)


# ---------------------------------------------------------------- construction


def _check_k(k: int):
    if not 1 <= k <= MAX_K:
        raise ValueError(f"k must be in 1..{MAX_K}, got {k}")


def build_system(k: int) -> InequalitySystem:
    """Reliability rows ``[1_J | 1_J] x <= b+J`` then secrecy rows ``[0 | -1_J] x <= -b-J``."""
    _check_k(k)
    subsets = nonempty_subsets(k)
    rows = []
    for J in subsets:
        ind = [1 if (J.bits >> i) & 1 else 0 for i in range(k)]
        rows.append(Inequality(ind + ind, SymbolicAffine.plus(J)))
    for J in subsets:
        ind = [-1 if (J.bits >> i) & 1 else 0 for i in range(k)]
        rows.append(Inequality([0] * k + ind, -SymbolicAffine.minus(J)))
    return InequalitySystem(rows, k)


def closed_form_system(k: int) -> InequalitySystem:
    """One row ``1_J . R <= b+J - b-J`` per nonempty ``J``, in mask order."""
    _check_k(k)
    rows = []
    for J in nonempty_subsets(k):
        ind = [1 if (J.bits >> i) & 1 else 0 for i in range(k)]
        rows.append(Inequality(ind + [0] * k, SymbolicAffine.plus(J) - SymbolicAffine.minus(J)))
    return InequalitySystem(rows, k)


def indicator_matrix(k: int) -> np.ndarray:
    """``(2^k - 1) x k`` matrix whose row ``i`` is the indicator of mask ``i + 1``."""
    masks = np.arange(1, 1 << k, dtype=np.int64)
    return ((masks[:, None] >> np.arange(k)) & 1).astype(np.int64)


def rate_matrix(k: int) -> np.ndarray:
    """Coefficients of ``R_1..R_k`` in :func:`build_system`."""
    ind = indicator_matrix(k)
    return np.vstack([ind, np.zeros_like(ind)])


def randomization_matrix(k: int) -> np.ndarray:
    """Coefficients of ``R_1r..R_kr``: ``[1; -1]`` Kronecker the indicator matrix."""
    return np.kron(np.array([[1], [-1]], dtype=np.int64), indicator_matrix(k))


def base_matrix_G(k: int) -> np.ndarray:
    """``[1 1]`` Kronecker the ``(2^k - 1)`` identity; row ``i`` pairs reliability and secrecy rows of mask ``i + 1``."""
    if k < 1:
        raise ValueError(f"k must be positive, got {k}")
    n = (1 << k) - 1
    return np.kron(np.array([[1, 1]], dtype=np.int64), np.eye(n, dtype=np.int64))


def combine_rows(sys: InequalitySystem, weights: np.ndarray) -> InequalitySystem:
    """Apply each weight vector (one per row of ``weights``) to the rows of ``sys``."""
    out = []
    for w in np.asarray(weights):
        lhs = [Fraction(0)] * (2 * sys.k)
        rhs = SymbolicAffine()
        for c, row in zip(w, sys.rows):
            if c:
                c = Fraction(int(c))
                lhs = [a + c * b for a, b in zip(lhs, row.lhs)]
                rhs = rhs + row.rhs * c
        out.append(Inequality(lhs, rhs))
    return InequalitySystem(out, sys.k)


# ----------------------------------------------------------------- elimination


def eliminate(sys: InequalitySystem, var: int) -> InequalitySystem:
    """One Fourier-Motzkin step on variable index ``var``; rows come back normalized."""
    if not 0 <= var < 2 * sys.k:
        raise ValueError(f"variable index {var} out of range for k={sys.k}")
    zero, pos, neg = [], [], []
    for r in sys.rows:
        a = r.lhs[var]
        (zero if a == 0 else pos if a > 0 else neg).append(r)
    out = [r.normalized() for r in zero]
    for p in pos:
        for n in neg:
            a, b = p.lhs[var], -n.lhs[var]
            lhs = [x * b + y * a for x, y in zip(p.lhs, n.lhs)]
            out.append(Inequality(lhs, p.rhs * b + n.rhs * a).normalized())
    return InequalitySystem(dict.fromkeys(out), sys.k)


class DominanceError(AssertionError):
    """A pruned row failed numeric re-verification."""


def row_provenance(row: Inequality):
    """Recover the nonnegative combination of :func:`build_system` rows behind ``row``.

    Each original row carries its own symbol, so the rhs spells out the
    multipliers. Returns ``(scale, plus_family, minus_family)`` with
    ``scale * row`` equal to that integer combination, or ``None`` when the rhs
    is not of that shape or disagrees with the lhs.
    """
    k = row.k
    rhs = row.rhs
    if rhs.constant:
        return None
    items = rhs.items()
    if not items:
        return None
    scale = reduce(lcm, (v.denominator for _, v in items), 1)
    plus, minus = [], []
    for (sign, bits), v in items:
        n = v * scale
        if sign == PLUS and n > 0:
            plus.extend([bits] * int(n))
        elif sign == MINUS and n < 0:
            minus.extend([bits] * int(-n))
        else:
            return None
    p_plus = [sum((b >> i) & 1 for b in plus) for i in range(k)]
    p_minus = [sum((b >> i) & 1 for b in minus) for i in range(k)]
    if any(scale * v != c for v, c in zip(row.rate_part, p_plus)):
        return None
    if any(scale * v != cp - cm for v, cp, cm in zip(row.rand_part, p_plus, p_minus)):
        return None
    return scale, SetFamily.from_bits(plus, k), SetFamily.from_bits(minus, k)


def _chain(F: SetFamily) -> list[int]:
    if len(F) == 0:
        return []
    return [m.bits for m in compact_form_direct(F) if m]


def _canonical_row(bits: int, k: int) -> Inequality:
    ind = [1 if (bits >> i) & 1 else 0 for i in range(k)]
    return Inequality(ind + [0] * k, SymbolicAffine.plus(bits) - SymbolicAffine.minus(bits))


def is_canonical(row: Inequality) -> bool:
    if not row.is_rate_only():
        return False
    rp = row.rate_part
    if any(v not in (0, 1) for v in rp) or not any(rp):
        return False
    return row == _canonical_row(row.rate_mask(), row.k)


def _tightened(row: Inequality, scale: int, plus: SetFamily, minus: SetFamily) -> Inequality:
    rhs = SymbolicAffine()
    for b in _chain(plus):
        rhs = rhs + SymbolicAffine.plus(b)
    for b in _chain(minus):
        rhs = rhs - SymbolicAffine.minus(b)
    return Inequality(row.lhs, rhs / scale)


def _verify_dominated(row: Inequality, dominating: SymbolicAffine, k: int, rng, trials: int):
    for _ in range(trials):
        bt = random_bound_table(k, rng)
        slack = row.rhs.evaluate(bt) - dominating.evaluate(bt)
        if slack < -1e-10:
            raise DominanceError(f"pruned row {row} is not dominated (slack {slack:.3g})")


def prune_by_compact_dominance(
    sys: InequalitySystem,
    *,
    tighten: bool = True,
    paranoid: bool = False,
    rng: np.random.Generator | None = None,
    trials: int = 20,
) -> InequalitySystem:
    """Drop rows implied by canonical rows via the compact-form dominance bound.

    A row with no randomization coefficients whose multiplier families compact
    to a chain ``J_1 ⊇ J_2 ⊇ ...`` is implied by the sum of the canonical rows
    ``1_{J_i} . R <= b+J_i - b-J_i``; it is removed when all of those are in the
    system. A row that is literally a sum of present canonical rows is removed
    as well. Canonical rows always stay.

    With ``tighten`` (default), rows that still carry randomization
    coefficients get their rhs replaced by the compacted combination, which
    has the same lhs and a no-larger rhs. This is only sound for systems
    derived from :func:`build_system`, and it collapses all rows sharing an
    lhs into one.

    ``paranoid`` re-checks every removal and tightening on ``trials`` random
    bound tables drawn from real distributions.
    """
    k = sys.k
    for r in sys.rows:
        if any(v < 0 for v in r.rate_part):
            raise ValueError(f"row {r} has a negative rate coefficient")
    if paranoid and rng is None:
        rng = np.random.default_rng(0)

    rows = list(dict.fromkeys(sys.rows))
    canonical = {r.rate_mask() for r in rows if is_canonical(r)}
    kept = []
    by_lhs = {}
    for r in sorted(rows, key=lambda r: sum(abs(v) for v in r.lhs)):
        if is_canonical(r):
            kept.append(r)
            continue
        prov = row_provenance(r)
        if prov is None:
            kept.append(r)
            continue
        scale, plus, minus = prov
        if r.is_rate_only():
            chain = _chain(plus)
            literal = sorted(plus.bits()) == sorted(minus.bits()) and set(plus.bits()) <= canonical
            if literal or (chain and set(chain) <= canonical):
                if paranoid:
                    members = plus.bits() if literal else chain
                    dom = SymbolicAffine()
                    for b in members:
                        dom = dom + SymbolicAffine.plus(b) - SymbolicAffine.minus(b)
                    _verify_dominated(r, dom / scale, k, rng, trials)
                continue
            kept.append(r)
        elif tighten:
            t = _tightened(r, scale, plus, minus)
            if paranoid and t.rhs != r.rhs:
                _verify_dominated(r, t.rhs, k, rng, trials)
            split = _split_off_canonical(t, scale, plus, minus, canonical, by_lhs)
            if split is not None:
                if paranoid:
                    _verify_dominated(r, split, k, rng, trials)
                continue
            kept.append(t)
            by_lhs[t.lhs] = t
        else:
            kept.append(r)
    return InequalitySystem(dict.fromkeys(sorted(kept, key=Inequality.sort_key)), k)


def _split_off_canonical(row, scale, plus, minus, canonical, by_lhs):
    """Rhs of ``canonical(J) + other`` when ``scale * row`` equals that sum, both rows present.

    ``other`` is the row kept for the residual lhs; since every kept row is
    compacted, its rhs is no larger than the residual combination's.
    """
    k = row.k
    chain_plus, chain_minus = _chain(plus), _chain(minus)
    for J in set(chain_plus) & set(chain_minus):
        if J not in canonical:
            continue
        ind = [Fraction((J >> i) & 1) for i in range(k)]
        residual = [scale * v - d for v, d in zip(row.lhs, ind + [Fraction(0)] * k)]
        if not any(residual):
            continue
        other = by_lhs.get(Inequality(residual, SymbolicAffine()).normalized().lhs)
        if other is None:
            continue
        pivot = next(i for i, v in enumerate(other.lhs) if v)
        o_scale = residual[pivot] / other.lhs[pivot]
        if o_scale <= 0 or [v * o_scale for v in other.lhs] != residual:
            continue
        return (_canonical_row(J, k).rhs + other.rhs * o_scale) / scale
    return None


StepCallback = Callable[[int, int, int, int], None]


def eliminate_all_randomization(
    sys: InequalitySystem,
    *,
    prune: bool = True,
    tighten: bool = True,
    paranoid: bool = False,
    rng: np.random.Generator | None = None,
    on_step: StepCallback | None = None,
) -> InequalitySystem:
    """Eliminate ``R_kr, ..., R_1r`` in that order, pruning after every step.

    ``on_step(var, rows_before, rows_after_elimination, rows_after_pruning)``
    is called once per eliminated variable.
    """
    k = sys.k
    cur = sys
    for i in range(k, 0, -1):
        var = rand_var(k, i)
        before = len(cur)
        cur = eliminate(cur, var)
        after = len(cur)
        if prune:
            cur = prune_by_compact_dominance(cur, tighten=tighten, paranoid=paranoid, rng=rng)
        if on_step is not None:
            on_step(var, before, after, len(cur))
    if prune:
        cur = prune_by_compact_dominance(cur, tighten=tighten, paranoid=paranoid, rng=rng)
    return cur.canonical()


def evaluate_system(sys: InequalitySystem, bt: BoundTable, rate_only: bool = False) -> NumericSystem:
    """Substitute numeric bounds; ``rate_only`` keeps just the ``R_1..R_k`` columns."""
    if bt.k != sys.k:
        raise ValueError(f"bound table has k={bt.k}, system has k={sys.k}")
    if rate_only:
        for r in sys.rows:
            if not r.is_rate_only():
                raise ValueError(f"row {r} still has randomization coefficients")
    ncols = sys.k if rate_only else 2 * sys.k
    A = np.array([[float(v) for v in r.lhs[:ncols]] for r in sys.rows], dtype=np.float64).reshape(-1, ncols)
    b = np.array([r.rhs.evaluate(bt) for r in sys.rows], dtype=np.float64)
    return NumericSystem(A, b)
