import json

import pytest

from hullmce.cli import EXIT_FAIL, EXIT_OK, EXIT_USAGE, main
from hullmce.instances import gen_instance, gen_negative_instance, write_instance, write_solution


def test_gen_attack_verify(tmp_path, capsys):
    inst = tmp_path / "i.json"
    sol = tmp_path / "s.json"
    planted = tmp_path / "p.json"
    assert main(["gen", "--q", "11", "--m", "4", "--k", "12", "--seed", "1", "--out", str(inst), "--solution", str(planted)]) == EXIT_OK
    assert main(["verify", "--input", str(inst), "--solution", str(planted)]) == EXIT_OK
    assert main(["attack", "--input", str(inst), "--out", str(sol), "--deterministic", "--seed", "1", "--format", "json"]) == EXIT_OK
    out = capsys.readouterr().out
    assert json.loads(out.strip().splitlines()[-1])["success"] is True
    assert main(["verify", "--input", str(inst), "--solution", str(sol)]) == EXIT_OK


def test_gen_stdout(capsys):
    assert main(["gen", "--q", "7", "--m", "3", "--k", "4", "--embed-solution"]) == EXIT_OK
    obj = json.loads(capsys.readouterr().out)
    assert obj["schema"] == "mce-instance/1" and "solution" in obj


def test_verify_wrong_solution(tmp_path, capsys):
    inst, _ = gen_instance(7, 3, 3, 4, 0)
    _, other = gen_instance(7, 3, 3, 4, 1)
    write_instance(tmp_path / "i.json", inst)
    write_solution(tmp_path / "s.json", other.P, other.Q)
    assert main(["verify", "--input", str(tmp_path / "i.json"), "--solution", str(tmp_path / "s.json")]) == EXIT_FAIL
    assert "INVALID" in capsys.readouterr().out


def test_attack_negative(tmp_path, capsys):
    write_instance(tmp_path / "n.json", gen_negative_instance(11, 4, 4, 12, 0))
    code = main(["attack", "--input", str(tmp_path / "n.json"), "--deterministic", "--dict-size", "3", "--probes", "5"])
    assert code == EXIT_FAIL
    assert "attack failed" in capsys.readouterr().out


def test_out_of_range(tmp_path, capsys):
    inst, _ = gen_instance(11, 4, 4, 15, 0)
    write_instance(tmp_path / "i.json", inst)
    assert main(["attack", "--input", str(tmp_path / "i.json"), "--format", "json"]) == EXIT_USAGE
    err = json.loads(capsys.readouterr().err)
    assert err["error"] == "OutOfRange"


def test_parse_error(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["attack", "--input", str(bad)]) == EXIT_USAGE
    assert "ParseError" in capsys.readouterr().err


def test_missing_file(capsys):
    assert main(["verify", "--input", "/nonexistent.json", "--solution", "/x"]) == EXIT_USAGE


def test_bad_params(capsys):
    assert main(["gen", "--q", "9", "--m", "3", "--k", "2"]) == EXIT_USAGE


def test_argparse_usage():
    with pytest.raises(SystemExit) as exc:
        main(["attack"])
    assert exc.value.code == 2


def test_stats_hull_csv(capsys):
    assert main(["stats", "--kind", "hull", "--q", "7", "--m", "4", "--k", "8", "--samples", "50", "--format", "csv"]) == EXIT_OK
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "dim,count,fraction"
    assert sum(int(row.split(",")[1]) for row in lines[1:]) == 50


def test_stats_count_and_classes(capsys):
    assert main(["stats", "--kind", "count", "--q", "7", "--m", "5", "--format", "json"]) == EXIT_OK
    assert json.loads(capsys.readouterr().out)["classes"] == 44
    assert main(["stats", "--kind", "classes", "--q", "11", "--m", "4", "--k", "12", "--samples", "300", "--format", "json"]) == EXIT_OK
    assert json.loads(capsys.readouterr().out)["distinct"] <= 11
    assert main(["stats", "--kind", "hull", "--q", "7", "--m", "4"]) == EXIT_USAGE


def test_selftest(capsys):
    assert main(["selftest"]) == EXIT_OK
    assert "selftest passed" in capsys.readouterr().out
