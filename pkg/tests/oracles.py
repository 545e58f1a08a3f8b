"""Reference implementations that share no code with the package."""

import math
from itertools import combinations


def compact_by_formula(family, k):
    """Member i is the union, over all i-subsets of the family, of their intersections."""
    t = len(family)
    full = (1 << k) - 1
    out = []
    for i in range(1, t + 1):
        acc = 0
        for idx in combinations(range(t), i):
            inter = full
            for j in idx:
                inter &= family[j]
            acc |= inter
        out.append(acc)
    return out


def presence_by_count(family, k):
    return tuple(sum(1 for m in family if m >> e & 1) for e in range(k))


def h2(p):
    return 0.0 if p in (0.0, 1.0) else -p * math.log2(p) - (1 - p) * math.log2(1 - p)


# XOR/AND channel, uniform independent bits:
#   H(Z) with P(Z=1) = 1/4; H(Z | V1=1) = h2(1/2), H(Z | V1=0) = 0.
AND_HZ = h2(0.25)
AND_B_MINUS_SINGLE = AND_HZ - 0.5 * h2(0.5)
XOR_B_PLUS = 1.0
