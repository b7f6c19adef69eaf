import json
import random

import pytest

from kloosterman.classicalgroups import SymplecticForm
from kloosterman.cli import CACHE_ENV, main
from kloosterman.matrixcore import matrix_to_file
from kloosterman.sl4fine import FineCellLabel, build_from_gammas
from kloosterman.verify import random_gamma_factor


def run_json(capsys, argv):
    code = main(argv)
    out = capsys.readouterr().out
    return code, json.loads(out)


def test_classical_json(capsys):
    code, doc = run_json(capsys, ["classical", "-m", "1", "-n", "1", "-c", "3"])
    assert code == 0
    assert doc["value_re"] == pytest.approx(-1.0, abs=1e-9)
    assert doc["value_im"] == pytest.approx(0.0, abs=1e-12)
    assert doc["exact_phases"] == [[1, 3, 1], [2, 3, 1]]
    assert doc["method"] == "oracle"
    assert doc["query"] == {"kind": "classical", "m": 1, "n": 1, "c": 3}
    assert doc["cache_hit"] is False
    assert "elapsed_ms" in doc


def test_classical_bound_flag(capsys):
    code, doc = run_json(capsys, ["classical", "-m", "2", "-n", "3", "-c", "10",
                                  "--check-bound"])
    assert code == 0
    assert doc["bound"]["holds"] is True
    assert doc["bound"]["lhs"] <= doc["bound"]["rhs"]


def test_classical_negative_character(capsys):
    code, doc = run_json(capsys, ["classical", "-m=-1", "-n", "1", "-c", "5"])
    assert code == 0
    code2, doc2 = run_json(capsys, ["classical", "-m", "1", "-n=-1", "-c", "5"])
    assert doc["exact_phases"] == doc2["exact_phases"]


def test_classical_domain_error(capsys):
    code = main(["classical", "-m", "1", "-n", "1", "-c", "0"])
    captured = capsys.readouterr()
    assert code == 1
    assert captured.out == ""
    err = json.loads(captured.err)
    assert err["error"] == "non-positive"


def test_usage_error_exit_code(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["classical", "-m", "1", "-n", "1"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        main(["sl4", "fine", "--cell", "1,1,1", "-m", "0,0,0", "-n", "0,0,0"])
    assert exc.value.code == 2


def test_sl4_fine_both_trivial(capsys):
    code, doc = run_json(capsys, ["sl4", "fine", "--cell", "1,1,1,1,1,1",
                                  "-m", "1,1,1", "-n", "1,1,1", "--method", "both"])
    assert code == 0
    assert doc["value_re"] == pytest.approx(1.0, abs=1e-12)
    assert doc["closed_value_re"] == pytest.approx(1.0, abs=1e-12)
    assert doc["discrepancy"] is None
    assert doc["method"] == "both"


def test_sl4_fine_both_discrepancy(capsys):
    code, doc = run_json(capsys, ["sl4", "fine", "--cell", "1,1,1,1,1,2",
                                  "-m", "0,0,0", "-n", "0,0,0", "--method", "both"])
    assert code == 0
    assert doc["value_re"] == pytest.approx(4.0, abs=1e-9)
    assert doc["closed_value_re"] == pytest.approx(16.0, abs=1e-9)
    disc = doc["discrepancy"]
    assert disc is not None
    assert disc["authoritative"] == "oracle"
    assert disc["abs_diff"] == pytest.approx(12.0, abs=1e-9)


def test_sl4_fine_closed_only(capsys):
    code, doc = run_json(capsys, ["sl4", "fine", "--cell", "1,1,1,1,1,2",
                                  "-m", "0,0,1", "-n", "0,0,0", "--method", "closed"])
    assert code == 0
    assert doc["method"] == "closed_form"
    assert doc["exact_phases"] == []
    assert doc["value_re"] == 0.0


def test_sl4_coarse(capsys):
    code, doc = run_json(capsys, ["sl4", "coarse", "--c", "2,2,2",
                                  "-m", "1,1,1", "-n", "1,1,1"])
    assert code == 0
    assert doc["value_re"] == pytest.approx(-3.0, abs=1e-9)
    assert doc["exact_phases"] == [[0, 1, 3], [1, 2, 6]]


def test_sl4_budget_exceeded(capsys):
    code = main(["sl4", "fine", "--cell", "2,2,2,2,2,2",
                 "-m", "0,0,0", "-n", "0,0,0", "--budget", "100"])
    captured = capsys.readouterr()
    assert code == 1
    assert json.loads(captured.err)["error"] == "budget-exceeded"


def test_sl5_fine(capsys):
    code, doc = run_json(capsys, ["sl5", "fine", "--cell", "1,1,1,1,1,1,1,1,1,2",
                                  "-m", "0,0,0,1", "-n", "0,0,0,0"])
    assert code == 0
    assert doc["exact_phases"] == [[0, 1, 4], [1, 2, 4]]
    assert doc["value_re"] == pytest.approx(0.0, abs=1e-9)
    assert doc["query"]["strict_paper_psi"] is False


def test_decompose(capsys, tmp_path):
    rng = random.Random(6)
    cell = FineCellLabel(2, 1, 1, 1, 1, 1)
    gammas = [random_gamma_factor(v, rng) for v in cell.as_tuple()]
    path = tmp_path / "matrix.json"
    matrix_to_file(build_from_gammas(cell, gammas), str(path))
    code, doc = run_json(capsys, ["decompose", "--matrix", str(path)])
    assert code == 0
    assert doc["weyl"] == "long-word"
    assert doc["t"] == [1, 1, 2, [1, 2]]
    assert len(doc["u_L"]) == 4 and len(doc["u_R"]) == 4
    for row in doc["u_L"]:
        assert len(row) == 4


def test_decompose_rejects_non_cell_matrix(capsys, tmp_path):
    path = tmp_path / "id.json"
    from kloosterman.matrixcore import identity
    matrix_to_file(identity(4), str(path))
    code = main(["decompose", "--matrix", str(path)])
    captured = capsys.readouterr()
    assert code == 1
    assert json.loads(captured.err)["error"] == "not-in-big-cell"


def test_groups_check(capsys, tmp_path):
    path = tmp_path / "j.json"
    matrix_to_file(SymplecticForm(2).matrix, str(path))
    code, doc = run_json(capsys, ["groups", "check", "--kind", "sp4",
                                  "--matrix", str(path)])
    assert code == 0
    assert doc["member"] is True
    assert all(v == 0 for v in doc["residuals"].values())
    code, doc = run_json(capsys, ["groups", "check", "--kind", "so4",
                                  "--matrix", str(path)])
    assert code == 0
    assert doc["member"] is True


def test_verify_longword(capsys):
    code, doc = run_json(capsys, ["verify", "--suite", "longword"])
    assert code == 0
    assert doc["passed"] is True
    assert doc["reports"][0]["suite"] == "longword"
    assert doc["reports"][0]["failures"] == 0


def test_verify_seed_required(capsys):
    code = main(["verify", "--suite", "trivial"])
    captured = capsys.readouterr()
    assert code == 1
    assert json.loads(captured.err)["error"] == "seed-required"
    code, doc = run_json(capsys, ["verify", "--suite", "trivial", "--seed", "5"])
    assert code == 0
    assert doc["passed"] is True


def test_verify_scoped_flags(capsys):
    code, doc = run_json(capsys, ["verify", "--suite", "weil", "--max-c", "25"])
    assert code == 0
    assert doc["reports"][0]["details"]["c_max"] == 25
    code, doc = run_json(capsys, ["verify", "--suite", "crossval", "--d-bound", "1"])
    assert code == 0
    assert doc["reports"][0]["details"]["cells"] == 1


def test_cache_round_trip(capsys, tmp_path):
    cache = tmp_path / "cache.jsonl"
    argv = ["classical", "-m", "1", "-n", "1", "-c", "7", "--cache", str(cache)]
    code, first = run_json(capsys, argv)
    assert code == 0 and first["cache_hit"] is False
    code, second = run_json(capsys, argv)
    assert code == 0 and second["cache_hit"] is True
    for key in ("exact_phases", "value_re", "value_im", "method"):
        assert first[key] == second[key]
    lines = cache.read_text().strip().splitlines()
    assert len(lines) == 1
    record = json.loads(lines[0])
    assert record["payload"]["exact_phases"] == first["exact_phases"]


def test_cache_tolerates_corrupt_lines(capsys, tmp_path):
    cache = tmp_path / "cache.jsonl"
    cache.write_text("this is not json\n")
    argv = ["sl4", "fine", "--cell", "1,1,1,1,1,2", "-m", "0,0,1", "-n", "0,0,0",
            "--cache", str(cache)]
    code, first = run_json(capsys, argv)
    assert code == 0 and first["cache_hit"] is False
    code = main(argv)
    captured = capsys.readouterr()
    second = json.loads(captured.out)
    assert code == 0 and second["cache_hit"] is True
    assert "corrupt cache line" in captured.err
    assert second["exact_phases"] == first["exact_phases"] == [[0, 1, 2], [1, 2, 2]]


def test_cache_env_var(capsys, tmp_path, monkeypatch):
    cache = tmp_path / "env-cache.jsonl"
    monkeypatch.setenv(CACHE_ENV, str(cache))
    argv = ["classical", "-m", "2", "-n", "5", "-c", "9"]
    code, first = run_json(capsys, argv)
    assert code == 0 and first["cache_hit"] is False
    assert cache.exists()
    code, second = run_json(capsys, argv)
    assert second["cache_hit"] is True


def test_csv_format(capsys):
    code = main(["classical", "-m", "1", "-n", "1", "-c", "3", "--format", "csv"])
    out = capsys.readouterr().out.splitlines()
    assert code == 0
    header = out[0].split(",")
    assert "value_re" in header
    values = out[1]
    assert str(-1.0) in values or "-0.99" in values


def test_text_format(capsys):
    code = main(["classical", "-m", "1", "-n", "1", "-c", "3", "--format", "text"])
    out = capsys.readouterr().out
    assert code == 0
    assert "value_re" in out
    assert "query.c" in out


def test_version_flag(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["--version"])
    assert exc.value.code == 0
    from kloosterman import __version__
    assert capsys.readouterr().out.strip() == __version__
