import numpy as np
import pytest

from jsmac import oracle
from jsmac.infotheory import BoundTable, conditional_mutual_information
from jsmac.oracle import (
    NumericSystem,
    cross_check,
    numeric_wiretap_system,
    oracle_fm,
    oracle_mi,
    oracle_region,
    remove_redundant,
)
from jsmac.region import closed_form_region, polytope_equal
from jsmac.sweeps import equivalence_sweep, random_tables, trial_rngs
from jsmac.infotheory import random_joint
from oracles import AND_HZ


def test_oracle_does_not_use_symbolic_code():
    import inspect

    src = inspect.getsource(oracle)
    assert "fourier_motzkin" not in src


class TestOracleMI:
    def test_and_channel(self, xor_and_joint):
        assert oracle_mi(xor_and_joint, ("V1", "V2"), "Z") == pytest.approx(AND_HZ, abs=1e-10)
        assert oracle_mi(xor_and_joint, ("V1", "V2"), "Z") == pytest.approx(
            conditional_mutual_information(xor_and_joint, ("V1", "V2"), "Z"), abs=1e-10
        )

    def test_independence(self, xor_and_joint):
        assert abs(oracle_mi(xor_and_joint, "V1", "V2", "Q")) <= 1e-12

    def test_symmetry(self):
        for r in trial_rngs(1, 10):
            j = random_joint(2, r)
            assert oracle_mi(j, "V1", "Y", "Q") == pytest.approx(oracle_mi(j, "Y", "V1", "Q"), abs=1e-12)

    def test_overlap_rejected(self, xor_and_joint):
        with pytest.raises(ValueError):
            oracle_mi(xor_and_joint, "V1", "V1")


class TestOracleFM:
    def test_k1(self):
        bt = BoundTable(1, {1: 0.7}, {1: 0.2})
        out = oracle_fm(numeric_wiretap_system(bt), [1])
        assert out.A.tolist() == [[1.0]]
        assert out.b == pytest.approx([0.5])

    def test_no_elimination_is_identity(self, xor_and_table):
        sys = numeric_wiretap_system(xor_and_table)
        out = oracle_fm(sys, [])
        assert np.array_equal(out.A, sys.A) and np.array_equal(out.b, sys.b)

    def test_xor_and_matches_closed_form(self, xor_and_table):
        assert polytope_equal(oracle_region(xor_and_table), closed_form_region(xor_and_table), 1e-9)
        assert cross_check(xor_and_table)

    def test_redundant_rows_removed(self):
        sys = NumericSystem(np.array([[1.0, 0.0], [0.0, 1.0], [1.0, 1.0]]), np.array([1.0, 1.0, 5.0]))
        out = remove_redundant(sys)
        assert len(out) == 2

    def test_duplicate_rows_collapse_to_one(self):
        sys = NumericSystem(np.array([[1.0], [1.0]]), np.array([1.0, 1.0]))
        assert len(remove_redundant(sys)) == 1

    def test_detects_wrong_region(self, xor_and_table):
        r = closed_form_region(xor_and_table)
        assert not polytope_equal(oracle_region(xor_and_table), r.tightened(2, 0.01), 1e-9)

    @pytest.mark.parametrize("k", [2, 3])
    def test_nonempty_regions_agree(self, k):
        results = equivalence_sweep(10, k, 31, eve_noise=0.9)
        assert all(ok for _, ok, _ in results)
        assert sum(not closed_form_region(bt).is_empty() for _, _, bt in results) >= 8

    def test_unpruned_elimination_agrees(self):
        for bt in random_tables(5, 2, 3, eve_noise=0.9):
            raw = oracle_fm(numeric_wiretap_system(bt), [2, 3], prune=False)
            from jsmac.region import RateRegion

            assert polytope_equal(RateRegion(2, raw.A, raw.b), closed_form_region(bt), 1e-9)
