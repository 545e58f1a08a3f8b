import json
from itertools import combinations

import numpy as np
import pytest

from jsmac.infotheory import BoundTable
from jsmac.region import (
    RateRegion,
    VertexSet,
    closed_form_region,
    contains,
    mac_region,
    polytope_equal,
    vertices,
)
from jsmac.sweeps import random_tables


def table(k, plus, minus=None):
    minus = minus or {b: 0.0 for b in range(1, 1 << k)}
    return BoundTable(k, plus, minus)


PENTAGON = table(2, {1: 1.0, 2: 1.0, 3: 1.5})


def brute_vertices(r: RateRegion):
    """Independent check: numpy solves of every square subsystem, no pivot floor tricks."""
    A = np.vstack([r.A, -np.eye(r.k)])
    b = np.concatenate([r.c, np.zeros(r.k)])
    pts = []
    for idx in combinations(range(len(b)), r.k):
        M = A[list(idx)]
        if abs(np.linalg.det(M)) < 1e-9:
            continue
        x = np.linalg.solve(M, b[list(idx)])
        if np.all(A @ x <= b + 1e-9) and not any(np.allclose(x, p, atol=1e-9) for p in pts):
            pts.append(x)
    return sorted(map(tuple, np.round(pts, 9)))


class TestClosedForm:
    def test_xor_and(self, xor_and_table):
        r = closed_form_region(xor_and_table)
        assert r.A.tolist() == [[1, 0], [0, 1], [1, 1]]
        assert r.c == pytest.approx([0.688722, 0.688722, 0.188722], abs=1e-6)
        assert not r.is_empty()

    def test_zero_eavesdropper_gives_mac_region(self):
        for bt in random_tables(5, 3, 1):
            plain = BoundTable(3, bt.b_plus, {b: 0.0 for b in range(8)})
            assert polytope_equal(closed_form_region(plain), mac_region(plain), 1e-12)

    def test_negative_singleton_is_empty(self):
        bt = table(2, {1: 0.1, 2: 1.0, 3: 1.0}, {1: 0.2, 2: 0.0, 3: 0.2})
        r = closed_form_region(bt)
        assert r.is_empty()
        assert len(vertices(r)) == 0
        assert r.c[0] < 0  # reported, not clamped


class TestContains:
    def test_origin(self, xor_and_table):
        assert contains(closed_form_region(xor_and_table), [0, 0])

    def test_inside_and_outside(self, xor_and_table):
        r = closed_form_region(xor_and_table)
        assert contains(r, (0.1, 0.05))
        assert not contains(r, (0.1, 0.1))
        assert not contains(r, (-0.01, 0.0))

    def test_dimension_mismatch(self, xor_and_table):
        with pytest.raises(ValueError):
            contains(closed_form_region(xor_and_table), [0, 0, 0])


class TestVertices:
    def test_xor_and(self, xor_and_table):
        vs = vertices(closed_form_region(xor_and_table))
        s = 1 - 0.8112781244591328
        assert np.allclose(vs.points, [[0, 0], [0, s], [s, 0]], atol=1e-12)

    def test_pentagon(self):
        vs = vertices(mac_region(PENTAGON))
        assert np.allclose(vs.points, [[0, 0], [0, 1], [0.5, 1], [1, 0], [1, 0.5]], atol=1e-12)

    def test_against_brute_force(self):
        for bt in random_tables(10, 3, 4, eve_noise=0.8):
            r = closed_form_region(bt)
            got = sorted(map(tuple, np.round(vertices(r).points, 9)))
            assert got == brute_vertices(r)

    def test_invariants(self):
        for bt in random_tables(10, 3, 6, eve_noise=0.8):
            r = closed_form_region(bt)
            pts = vertices(r).points
            for p in pts:
                assert contains(r, p, 1e-9)
                # binding constraints hold with equality
                A = np.vstack([r.A, -np.eye(3)])
                b = np.concatenate([r.c, np.zeros(3)])
                active = np.abs(A @ p - b) <= 1e-9
                assert np.linalg.matrix_rank(A[active]) == 3
            d = np.abs(pts[:, None, :] - pts[None, :, :]).max(axis=2)
            assert np.all(d[~np.eye(len(pts), dtype=bool)] > 1e-9)

    def test_k_limit(self):
        r = RateRegion(5, np.eye(5), np.ones(5))
        with pytest.raises(ValueError):
            vertices(r)


class TestPolytopeEqual:
    def test_self(self, xor_and_table):
        r = closed_form_region(xor_and_table)
        assert polytope_equal(r, r)

    def test_tightened_bound_detected(self):
        r = mac_region(PENTAGON)
        for row in range(3):
            assert not polytope_equal(r, r.tightened(row, 0.01), 1e-9)

    def test_redundant_rows_ignored(self):
        r = mac_region(PENTAGON)
        extra = RateRegion(2, np.vstack([r.A, [2, 1]]), np.r_[r.c, 5.0])
        assert polytope_equal(r, extra, 1e-12)

    def test_empty_vs_nonempty(self, xor_and_table):
        r = closed_form_region(xor_and_table)
        empty = RateRegion(2, r.A, r.c - 1.0)
        assert not polytope_equal(r, empty)
        assert polytope_equal(empty, empty)


class TestRegionProperties:
    def test_downward_closed(self):
        rng = np.random.default_rng(0)
        for bt in random_tables(10, 3, 8, eve_noise=0.8):
            r = closed_form_region(bt)
            for p in vertices(r).points:
                assert contains(r, p * rng.uniform(0, 1, size=3))

    def test_monotone_in_bounds(self):
        for bt in random_tables(10, 3, 10, eve_noise=0.8):
            r = closed_form_region(bt)
            bigger = RateRegion(3, r.A, r.c + 0.05)
            assert all(contains(bigger, p) for p in vertices(r).points)


class TestExport:
    def test_csv_twelve_significant_digits(self, xor_and_table):
        text = vertices(closed_form_region(xor_and_table)).to_csv()
        assert text.splitlines() == ["0,0", "0,0.188721875541", "0.188721875541,0"]

    def test_csv_round_trip(self):
        vs = vertices(mac_region(PENTAGON))
        back = VertexSet.from_csv(vs.to_csv(), 2)
        assert np.allclose(back.points, vs.points, atol=1e-12)

    def test_json(self):
        vs = vertices(mac_region(PENTAGON))
        assert json.loads(vs.to_json()) == [[0, 0], [0, 1], [0.5, 1], [1, 0], [1, 0.5]]

    def test_empty_exports(self):
        vs = VertexSet(np.zeros((0, 2)))
        assert vs.to_csv() == "" and vs.to_json() == "[]"
