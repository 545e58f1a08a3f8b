import json

import pytest

from jsmac.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def final_rows(text):
    tail = text.split("final system", 1)[1]
    return [ln for ln in tail.splitlines()[1:] if "<=" in ln]


class TestRegion:
    def test_xor_and(self, capsys, spec_dir):
        code, out, _ = run(capsys, "region", str(spec_dir / "xor_and_k2.json"))
        assert code == 0
        assert "0.688722" in out and "0.188722" in out and "0.811278" in out
        assert "status: nonempty" in out

    def test_vertex_export(self, capsys, spec_dir, tmp_path):
        csv = tmp_path / "v.csv"
        js = tmp_path / "v.json"
        code, _, _ = run(capsys, "region", str(spec_dir / "xor_and_k2.json"),
                         "--vertices", str(csv), "--vertices-json", str(js))
        assert code == 0
        assert csv.read_text().splitlines() == ["0,0", "0,0.188721875541", "0.188721875541,0"]
        assert len(json.loads(js.read_text())) == 3

    def test_malformed_pmf_names_slice(self, capsys, spec_dir, tmp_path):
        spec = json.loads((spec_dir / "xor_and_k2.json").read_text())
        spec["p_v_given_q"][0][0] = [0.4, 0.5]
        bad = tmp_path / "bad.json"
        bad.write_text(json.dumps(spec))
        code, _, err = run(capsys, "region", str(bad))
        assert code == 3
        assert "p_v_given_q" in err

    def test_bad_json(self, capsys, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text("{not json")
        code, _, err = run(capsys, "region", str(bad))
        assert code == 2 and err

    def test_missing_file(self, capsys, tmp_path):
        code, _, _ = run(capsys, "region", str(tmp_path / "nope.json"))
        assert code == 2


class TestFM:
    @pytest.mark.parametrize("k,rows", [(1, 1), (2, 3), (3, 7)])
    def test_symbolic(self, capsys, k, rows):
        code, out, _ = run(capsys, "fm", "--symbolic", str(k))
        assert code == 0
        assert len(final_rows(out)) == rows
        assert "matches closed form: yes" in out

    def test_symbolic_no_prune_keeps_redundant_rows(self, capsys):
        _, pruned, _ = run(capsys, "fm", "--symbolic", "2")
        code, raw, _ = run(capsys, "fm", "--symbolic", "2", "--no-prune")
        assert code == 0 and "contains closed form: yes" in raw
        assert set(final_rows(pruned)) < set(final_rows(raw))
        assert len(final_rows(raw)) == 6

    def test_paranoid(self, capsys):
        code, out, _ = run(capsys, "fm", "--symbolic", "3", "--paranoid", "--seed", "3")
        assert code == 0 and "matches closed form: yes" in out

    def test_numeric(self, capsys, spec_dir):
        code, out, _ = run(capsys, "fm", str(spec_dir / "xor_and_k2.json"))
        assert code == 0
        assert sorted(final_rows(out)) == sorted(
            ["  R1 <= 0.688722", "  R2 <= 0.688722", "  R1 + R2 <= 0.188722"])

    def test_needs_spec_or_symbolic(self, capsys):
        code, _, _ = run(capsys, "fm")
        assert code == 2

    def test_symbolic_range(self, capsys):
        code, _, _ = run(capsys, "fm", "--symbolic", "0")
        assert code == 2


class TestVerify:
    def test_fixed_spec(self, capsys, spec_dir):
        code, out, _ = run(capsys, "verify", str(spec_dir / "xor_and_k2.json"))
        assert code == 0 and "1/1 pass" in out

    @pytest.mark.parametrize("k", [2, 3])
    def test_random(self, capsys, k):
        code, out, _ = run(capsys, "verify", "--random", "25", "--k", str(k), "--seed", "7")
        assert code == 0
        assert "25/25 pass" in out

    def test_random_is_reproducible(self, capsys):
        _, a, _ = run(capsys, "verify", "--random", "3", "--k", "2", "--seed", "11")
        _, b, _ = run(capsys, "verify", "--random", "3", "--k", "2", "--seed", "11")
        assert a == b


class TestProps:
    def test_vacuous(self, capsys):
        code, out, _ = run(capsys, "props", "--random", "0", "--no-exhaustive")
        assert code == 0 and "vacuous" in out

    def test_small_run(self, capsys):
        code, out, _ = run(capsys, "props", "--random", "3", "--families", "5",
                           "--exhaustive-k", "2", "--exhaustive-t", "2")
        assert code == 0
        assert "FAIL" not in out


class TestCompact:
    def test_example(self, capsys):
        code, out, _ = run(capsys, "compact", "--k", "3", "1,2,3", "1,2", "{}")
        assert code == 0
        assert "presence vector: (2,2,1)" in out
        assert "t_max: 2" in out
        assert "compact form: ({1,2,3}, {1,2}, ∅)" in out

    def test_odd_elements(self, capsys):
        code, out, _ = run(capsys, "compact", "--k", "5", "1,3,5")
        assert code == 0 and "presence vector: (1,0,1,0,1)" in out

    def test_repeated_full_set(self, capsys):
        code, out, _ = run(capsys, "compact", "--k", "3", "1,2,3", "1,2,3", "1,2,3")
        assert code == 0
        assert "compact form: ({1,2,3}, {1,2,3}, {1,2,3})" in out

    @pytest.mark.parametrize("bad", ["0", "4", "a"])
    def test_bad_element(self, capsys, bad):
        code, _, err = run(capsys, "compact", "--k", "3", bad)
        assert code == 2 and err

    def test_empty_family(self, capsys):
        code, _, _ = run(capsys, "compact", "--k", "3")
        assert code == 2
