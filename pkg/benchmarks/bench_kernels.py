"""Time the numba kernels against their numpy fallbacks.

    python3 benchmarks/bench_kernels.py [--repeat 5]

Each kernel is called once untimed so numba compilation is excluded, then the
best of ``--repeat`` runs is reported along with whether both outputs agree.
"""

import argparse
import time

import numpy as np

from jsmac import _backend
from jsmac._kernels import IMPLEMENTATIONS
from jsmac.sweeps import all_families


def _best(fn, args, repeat):
    fn(*args)
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, out


def _same(a, b):
    if np.ndim(a) == 2 and len(a) and len(b):
        key = lambda x: sorted(map(tuple, np.round(x, 9)))
        return key(a) == key(b)
    return np.allclose(a, b, atol=1e-12)


def cases():
    rng = np.random.default_rng(0)
    fams = all_families(4, 4)
    p = rng.dirichlet(np.ones(8 * 27 * 9)).reshape(8, 27, 9)
    A = np.vstack([rng.integers(0, 3, size=(15, 4)).astype(float), -np.eye(4)])
    b = np.r_[rng.uniform(0.2, 2.0, size=15), np.zeros(4)]
    return [
        ("presence_batch", (fams, 4), f"{len(fams)} families, K=4 t=4"),
        ("compact_batch", (fams, 4), f"{len(fams)} families, K=4 t=4"),
        ("cmi_from_table", (p,), "8x27x9 table"),
        ("basis_vertices", (A, b, 1e-9), "19 rows, k=4"),
    ]


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    if not _backend.HAS_NUMBA:
        print("numba is not installed; nothing to compare")
        return 0
    print(f"{'kernel':<16}{'input':<30}{'numba (ms)':>12}{'numpy (ms)':>12}{'speedup':>9}  agree")
    for name, fargs, desc in cases():
        t_nb, out_nb = _best(IMPLEMENTATIONS["numba"][name], fargs, args.repeat)
        t_np, out_np = _best(IMPLEMENTATIONS["numpy"][name], fargs, args.repeat)
        print(f"{name:<16}{desc:<30}{t_nb * 1e3:>12.3f}{t_np * 1e3:>12.3f}{t_np / t_nb:>8.1f}x  "
              f"{'yes' if _same(out_nb, out_np) else 'NO'}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
