import json

import pytest

from o2reps import cli


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_compare_sl2(capsys):
    code, out, _ = run(capsys, "compare", "--family", "sl", "--n", "2", "--p", "3")
    assert code == 0
    data = json.loads(out)
    assert data["equal"] and data["orbit_alignment"] and data["diff"] == []
    assert data["schema_version"] == cli.SCHEMA_VERSION
    assert data["irr"]["unramified"] == data["irr"]["ramified"]


def test_radical_sl3(capsys):
    code, out, _ = run(capsys, "radical", "--family", "sl", "--n", "3", "--p", "3")
    data = json.loads(out)
    assert code == 0 and data["radical_dim"] == 1 and data["checks"]["scalar_line"]
    assert data["radical_basis"][0] == [[1, 0, 0], [0, 1, 0], [0, 0, 1]]


def test_radical_nondegenerate(capsys):
    code, out, _ = run(capsys, "radical", "--family", "sp", "--n", "2", "--p", "3")
    assert code == 0 and json.loads(out)["radical_dim"] == 0


def test_irr_o2_ramified(capsys, tmp_path):
    path = tmp_path / "irr.json"
    code, out, _ = run(capsys, "irr", "--family", "o", "--n", "2", "--p", "3", "--ring", "ramified",
                       "--class-count", "--out", str(path))
    assert code == 0 and out == ""
    data = json.loads(path.read_text())
    assert data["group_order"] == 24
    assert sum(e["dim"] ** 2 * e["count"] for e in data["irr"]) == 24
    assert data["checks"]["sum_squares"] and data["checks"]["class_count"]
    assert data["class_count"] == data["irrep_count"] == 9
    for key in ("config", "budgets", "orbits", "checks", "family", "n", "p", "m", "ring"):
        assert key in data
    assert set(data["orbits"][0]) >= {"rep", "size", "stab_order", "degrees"}


def test_deterministic_output(capsys):
    argv = ("irr", "--family", "u", "--n", "2", "--p", "3")
    _, a, _ = run(capsys, *argv)
    _, b, _ = run(capsys, *argv, "--threads", "3")
    assert a == b


def test_tsv(capsys):
    code, out, _ = run(capsys, "orbits", "--family", "sl", "--n", "2", "--p", "3", "--format", "tsv")
    lines = out.splitlines()
    assert code == 0
    assert lines[0].startswith("# schema_version=")
    assert lines[1].split("\t") == ["rep", "size", "stab_order", "centralizer_order", "index"]
    assert sum(int(l.split("\t")[1]) for l in lines[2:]) == 27


def test_oracle_builtins(capsys):
    code, out, _ = run(capsys, "oracle", "--builtin", "s3")
    data = json.loads(out)
    assert code == 0 and data["class_count"] == 3 and data["sum_squares"] == 6
    code, out, _ = run(capsys, "oracle", "--builtin", "c3", "--format", "tsv")
    assert out.splitlines()[1:] == ["degree\tcount", "1\t3"]


def test_oracle_full_group(capsys):
    code, out, _ = run(capsys, "oracle", "--family", "sl", "--n", "2", "--p", "3", "--ring", "ramified")
    data = json.loads(out)
    assert code == 0 and data["order"] == 648 and data["sum_squares"] == 648


def test_oracle_table(capsys, tmp_path):
    # SL_2(F_3) given as an explicit element table
    from o2reps.groups import enumerate_residue_group
    from conftest import spec

    G = enumerate_residue_group(spec("sl", 2, 3))
    path = tmp_path / "t.json"
    path.write_text(json.dumps({"kind": "unramified", "p": 3, "level": "residue",
                                "elements": G.elements.tolist()}))
    code, out, _ = run(capsys, "oracle", "--table", str(path))
    assert code == 0 and json.loads(out)["class_count"] == 7
    path.write_text(json.dumps({"kind": "unramified", "p": 3, "level": "residue",
                                "elements": G.elements[:5].tolist()}))
    code, _, _ = run(capsys, "oracle", "--table", str(path))
    assert code == 4


def test_groups(capsys):
    code, out, _ = run(capsys, "groups", "--family", "o", "--n", "3", "--p", "3")
    data = json.loads(out)
    assert code == 0
    assert (data["order"], data["kernel_size"], data["class_count"]) == (1296, 27, 28)


def test_verify_ext(capsys):
    code, out, _ = run(capsys, "verify-ext", "--family", "o", "--n", "2", "--p", "3")
    data = json.loads(out)
    assert code == 0 and data["checks"]["all_orbits"]
    assert all(o["restriction"] and o["multiplicative"] for o in data["orbits"])


def test_exit_codes(capsys, monkeypatch):
    assert run(capsys, "irr", "--family", "sl", "--n", "2", "--p", "11")[0] == 3
    assert run(capsys, "irr", "--family", "sl", "--n", "2", "--p", "3", "--max-q", "2")[0] == 3
    assert run(capsys, "groups", "--family", "sl", "--n", "3", "--p", "3")[0] == 3
    assert run(capsys, "irr", "--family", "sl", "--n", "2", "--p", "9")[0] == 4
    assert run(capsys, "irr", "--family", "sl", "--n", "0", "--p", "3")[0] == 4
    assert run(capsys, "irr", "--n", "2", "--p", "3")[0] == 4
    with pytest.raises(SystemExit) as e:
        cli.main(["irr", "--family", "gl", "--n", "2", "--p", "3"])
    assert e.value.code == 4
    with pytest.raises(SystemExit) as e:
        cli.main(["nonsense"])
    assert e.value.code == 4
    # a failing check yields exit 2 with the failing checks on stderr
    from o2reps.clifford import CliffordEngine

    monkeypatch.setattr(CliffordEngine, "parameter_map_ok", lambda self: False)
    code, _, err = run(capsys, "irr", "--family", "sl", "--n", "2", "--p", "3")
    assert code == 2 and "parameter_map" in err


def test_env_budget_override(capsys, monkeypatch):
    from o2reps import config

    monkeypatch.setattr(cli, "BUDGETS", config.Budgets(enumerate=100))
    assert run(capsys, "groups", "--family", "o", "--n", "3", "--p", "3")[0] == 3
