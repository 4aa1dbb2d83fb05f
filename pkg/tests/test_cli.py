import csv
import io
import json

import pytest

from perclab import cli, pathcount


def run(capsys, *argv):
    status = cli.main(list(argv))
    out = capsys.readouterr()
    return status, out.out, out.err


def run_exit(capsys, *argv):
    with pytest.raises(SystemExit) as exc:
        cli.main(list(argv))
    return exc.value.code, capsys.readouterr()


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_arcs(capsys):
    status, out, err = run(capsys, "arcs", "--k", "1", "--variant", "z2")
    assert status == 0 and out == "1,0\n0,1\n"
    manifest = json.loads(err)
    assert manifest["subcommand"] == "arcs" and manifest["output_sha256"]
    _, out, _ = run(capsys, "arcs", "--k", "1", "--variant", "tri-up", "--format", "csv")
    assert rows(out) == [{"a1": "1", "a2": "1"}, {"a1": "1", "a2": "0"}, {"a1": "0", "a2": "1"}]
    _, out, _ = run(capsys, "arcs", "--k", "2", "--sign", "-", "--format", "json")
    assert json.loads(out)["vertices"] == ["-2,0", "-1,-1", "0,-2"]


@pytest.mark.parametrize("argv", [["arcs", "--k", "0"], ["arcs", "--k", "1", "--variant", "hex"],
                                  ["arcs", "--k", "1", "--sign", "x"]])
def test_arcs_usage_errors(capsys, argv):
    code, _ = run_exit(capsys, *argv)
    assert code == 2


def test_count(capsys):
    _, out, _ = run(capsys, "count", "--k", "2", "--format", "csv")
    assert [r["count"] for r in rows(out)] == ["4", "4", "1"]
    _, out, _ = run(capsys, "count", "--k", "2", "--format", "json")
    assert json.loads(out)["total"] == "9"
    status, out, _ = run(capsys, "count", "--k", "3", "--bruteforce")
    assert status == 0 and "MATCH" in out and "MISMATCH" not in out


def test_count_budget(capsys):
    status, _, err = run(capsys, "count", "--k", "20", "--bruteforce")
    assert status == 2 and "BRUTEFORCE_MAX_K" in err


def test_count_mismatch_exits_nonzero(capsys, monkeypatch):
    real = pathcount.path_count
    monkeypatch.setattr(pathcount, "path_count", lambda k, i: real(k, min(i + 1, k)))
    status, out, _ = run(capsys, "count", "--k", "3", "--bruteforce")
    assert status == 1 and "MISMATCH" in out


def test_bound(capsys):
    _, out, _ = run(capsys, "bound", "--k-list", "1,3", "--format", "csv")
    got = rows(out)
    assert list(got[0]) == cli.BOUND_COLUMNS
    assert float(got[0]["b_k"]) == pytest.approx(0.70711, abs=1e-5)
    assert float(got[1]["b_k"]) == pytest.approx(0.49029, abs=1e-5)
    assert len(got[0]["b_k"].replace(".", "").lstrip("0")) == 17
    _, out, _ = run(capsys, "bound", "--k-list", "100001", "--format", "json")
    assert json.loads(out)["rows"][0]["abs_err_vs_limit"] <= 1e-3
    _, out, _ = run(capsys, "bound", "--k-max", "1001", "--geometric", "--format", "csv")
    assert rows(out)[-1]["k"] == "1001"


def test_bound_empty_list(capsys):
    code, _ = run_exit(capsys, "bound", "--k-list", "")
    assert code == 2


def test_simulate(capsys):
    _, out, _ = run(capsys, "simulate", "--p", "1", "--k", "8", "--trials", "10", "--format", "csv")
    (row,) = rows(out)
    assert list(row) == cli.SIM_COLUMNS
    assert float(row["phat"]) == 1.0 and row["hits"] == "10"


def test_simulate_deterministic_across_threads(capsys):
    base = ["simulate", "--variant", "tri-up", "--k", "24", "--p", "0.5", "--trials", "300",
            "--seed", "1", "--format", "csv"]
    outs = {run(capsys, *base, "--threads", t)[1] for t in ("1", "1", "3")}
    assert len(outs) == 1


@pytest.mark.parametrize("argv", [["--p", "1.5"], ["--p", "0.5", "--trials", "0"], ["--p", "x"]])
def test_simulate_usage_errors(capsys, argv):
    code, _ = run_exit(capsys, "simulate", "--k", "3", *argv)
    assert code == 2


def test_sweep(capsys):
    _, out, _ = run(capsys, "sweep", "--variant", "z2", "--k-list", "6", "--p-grid", "0.6",
                    "--trials", "200", "--seed", "4", "--format", "csv")
    _, single, _ = run(capsys, "simulate", "--variant", "z2", "--k", "6", "--p", "0.6",
                       "--trials", "200", "--seed", "4", "--format", "csv")
    assert out == single
    code, _ = run_exit(capsys, "sweep", "--k-list", "6", "--p-grid", "0.6,0.5", "--trials", "5")
    assert code == 2


def test_pc(capsys):
    status, out, _ = run(capsys, "pc", "--variant", "tri-up", "--k", "12", "--trials", "200",
                         "--tol", "0.05", "--format", "json")
    payload = json.loads(out)
    assert status == 0 and payload["lo"] <= payload["p_estimate"] <= payload["hi"]
    status, _, err = run(capsys, "pc", "--k", "6", "--trials", "20", "--lo", "0.95")
    assert status == 2 and "bracket" in err


def test_validate(capsys):
    status, out, _ = run(capsys, "validate")
    assert status == 0
    assert out.count("PASS") >= 5 and "FAIL" not in out


def test_validate_names_injected_fault(capsys, monkeypatch):
    real = pathcount.path_count
    monkeypatch.setattr(pathcount, "path_count", lambda k, i: real(k, min(i + 1, k)))
    status, out, _ = run(capsys, "validate")
    assert status == 1
    assert "FAIL  oracle-equivalence" in out and "FAIL  pascal-recurrence" in out


def test_out_dir_and_replay(capsys, tmp_path, monkeypatch):
    monkeypatch.setenv(cli.OUT_DIR_ENV, str(tmp_path))
    _, out, _ = run(capsys, "simulate", "--k", "6", "--p", "0.55", "--trials", "50",
                    "--seed", "9", "--format", "csv")
    files = sorted(p.name for p in tmp_path.iterdir())
    assert "manifest.json" in files
    data = [f for f in files if f.startswith("simulate-") and f.endswith("-9.csv")]
    assert len(data) == 1 and (tmp_path / data[0]).read_text() == out
    monkeypatch.delenv(cli.OUT_DIR_ENV)
    status, replayed, _ = run(capsys, "replay", str(tmp_path / "manifest.json"))
    assert status == 0 and replayed == out


def test_entropy_seed_is_recorded_and_replayable(capsys, tmp_path):
    _, out, err = run(capsys, "simulate", "--k", "5", "--p", "0.6", "--trials", "20",
                      "--entropy", "--format", "csv")
    manifest = json.loads(err)
    assert str(manifest["seed"]) == rows(out)[0]["seed"]
    path = tmp_path / "m.json"
    path.write_text(json.dumps(manifest))
    status, replayed, _ = run(capsys, "replay", str(path))
    assert status == 0 and replayed == out


def test_json_round_trip(capsys):
    _, out, _ = run(capsys, "simulate", "--k", "5", "--p", "0.6", "--trials", "20", "--format", "json")
    payload = json.loads(out)
    assert set(payload["rows"][0]) == set(cli.SIM_COLUMNS)
    assert json.loads(json.dumps(payload)) == payload
