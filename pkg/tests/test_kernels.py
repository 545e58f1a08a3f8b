"""Numba and numpy kernels must agree."""

import numpy as np
import pytest

from jsmac import _backend, _kernels
from jsmac.sweeps import all_families

NB = _kernels.IMPLEMENTATIONS["numba"]
NP = _kernels.IMPLEMENTATIONS["numpy"]


@pytest.mark.parametrize("k,t", [(1, 3), (3, 3), (4, 4)])
def test_set_kernels_agree(k, t):
    fams = all_families(k, t)
    assert np.array_equal(NB["presence_batch"](fams, k), NP["presence_batch"](fams, k))
    assert np.array_equal(NB["compact_batch"](fams, k), NP["compact_batch"](fams, k))


def test_cmi_kernels_agree():
    rng = np.random.default_rng(0)
    for shape in [(2, 3, 1), (3, 3, 4), (1, 5, 2)]:
        p = rng.dirichlet(np.ones(np.prod(shape))).reshape(shape)
        p[p < 0.01] = 0.0
        p /= p.sum()
        assert NB["cmi_from_table"](p) == pytest.approx(NP["cmi_from_table"](p), abs=1e-12)


def test_cmi_independent_is_zero():
    p = np.outer([0.3, 0.7], [0.5, 0.5]).reshape(2, 2, 1)
    for impl in (NB, NP):
        assert abs(impl["cmi_from_table"](p)) < 1e-15


def test_vertex_kernels_agree():
    rng = np.random.default_rng(1)
    for d in (2, 3, 4):
        A = np.vstack([rng.integers(0, 3, size=(2**d, d)).astype(float), -np.eye(d)])
        b = np.r_[rng.uniform(0.2, 2.0, size=2**d), np.zeros(d)]
        a = NB["basis_vertices"](A, b, 1e-9)
        c = NP["basis_vertices"](A, b, 1e-9)
        key = lambda x: sorted(map(tuple, np.round(x, 9)))
        assert key(a) == key(c)


def test_singular_subsystems_skipped():
    A = np.array([[1.0, 1.0], [2.0, 2.0], [-1.0, 0.0], [0.0, -1.0]])
    b = np.array([1.0, 2.0, 0.0, 0.0])
    for impl in (NB, NP):
        pts = impl["basis_vertices"](A, b, 1e-9)
        assert np.all(np.isfinite(pts))


def test_backend_flag_is_reported():
    assert _backend.backend_name() in ("numba", "numpy")
    assert _kernels.compact_batch is (NB if _backend.USE_NUMBA else NP)["compact_batch"]


def test_env_flag_selects_numpy(tmp_path):
    import subprocess
    import sys

    code = "from jsmac import _backend; print(_backend.backend_name())"
    out = subprocess.run([sys.executable, "-c", code], env={"JSMAC_DISABLE_NUMBA": "1", "PATH": ""},
                         capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "numpy"


def test_benchmark_runs(capsys):
    import importlib.util
    from pathlib import Path

    path = Path(__file__).resolve().parent.parent / "benchmarks" / "bench_kernels.py"
    spec = importlib.util.spec_from_file_location("bench_kernels", path)
    mod = importlib.util.module_from_spec(spec)
    spec.loader.exec_module(mod)
    assert mod.main(["--repeat", "1"]) == 0
    assert " NO" not in capsys.readouterr().out
