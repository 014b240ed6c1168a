import csv
import io
import json

import numpy as np
import pytest

from loninv.cli import EXIT_INPUT, EXIT_MISMATCH, EXIT_OK, main
from loninv.experiment.hom import DipModel, hom_dip
from loninv.serialization import complex_matrix_to_json


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def parse_csv(text):
    lines = [ln for ln in text.splitlines() if not ln.startswith("#")]
    return list(csv.DictReader(io.StringIO("\n".join(lines))))


def test_table_s1_reports_each_row(capsys):
    code, out, _ = run(capsys, "table-s1")
    assert out.startswith("# loninv ")
    rows = parse_csv(out)
    assert len(rows) == 9
    by_theta = {float(r["theta_deg"]): r for r in rows}
    assert by_theta[22.5]["I_t_prime"] == "0.444"
    assert by_theta[22.5]["alpha_deg"] == "35.264"
    # exit status reflects the per-cell comparison at 5e-4
    failing = [r for r in rows if r["pass"] != "pass"]
    assert code == (EXIT_MISMATCH if failing else EXIT_OK)
    assert all(r["mismatched"] == "I_t_prime" for r in failing)


def test_table_s1_json_and_precision(capsys):
    _, out, _ = run(capsys, "table-s1", "--format", "json")
    data = json.loads(out)
    assert len(data["data"]["rows"]) == 9
    assert data["manifest"]["config"]["tolerance"] == 5e-4
    _, out, _ = run(capsys, "table-s1", "--precision", "5")
    assert parse_csv(out)[4]["I_t_prime"] == "0.44444"


def test_output_is_deterministic(capsys, tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    main(["fig3-theory", "--points", "5", "--out", str(a)])
    main(["fig3-theory", "--points", "5", "--out", str(b)])
    assert a.read_bytes() == b.read_bytes()
    rows = parse_csv(a.read_text())
    assert [float(r["alpha_deg"]) for r in rows] == [0.0, 22.5, 45.0, 67.5, 90.0]
    assert float(rows[0]["I_t_prime"]) == pytest.approx(0.5)
    assert float(rows[-1]["I_t_prime"]) == pytest.approx(0.0, abs=1e-12)


def test_conserve_exact(capsys):
    code, out, _ = run(capsys, "conserve", "--format", "json", "--thetas", "0", "22.5")
    assert code == EXIT_OK
    data = json.loads(out)["data"]
    assert data["exact_pass"]
    summary = {s["method"]: s for s in data["summary"]}
    assert summary["exact"]["max_deviation"] < 1e-10
    assert summary["tomography"]["max_deviation"] < 1e-5
    assert len(data["cells"]) == 2 * 8 * 3


def test_conserve_shot_levels_seeded(capsys):
    argv = ["conserve", "--format", "json", "--thetas", "22.5", "--unitaries", "haar", "--count", "2",
            "--shots", "1000", "100000", "--seed", "3"]
    _, out1, _ = run(capsys, *argv)
    _, out2, _ = run(capsys, *argv)
    assert out1 == out2
    summary = json.loads(out1)["data"]["summary"]
    spread = {(s["method"], s["shots"]): s["spread_I_t_prime"] for s in summary}
    assert spread[("tomography", 100000)] < spread[("tomography", 1000)]


def test_invariants_from_state_file(capsys, tmp_path):
    path = tmp_path / "state.json"
    amps = np.array([np.sqrt(2 / 3), np.sqrt(1 / 3), 0])
    path.write_text(json.dumps({"n": 2, "m": 2, "amplitudes": complex_matrix_to_json(amps)}))
    code, out, _ = run(capsys, "invariants", str(path))
    assert code == EXIT_OK
    inv = json.loads(out)["data"]["invariants"]
    assert inv["I_t_prime"] == pytest.approx(4 / 9)
    assert inv["I_o"] == pytest.approx(34 / 9)


def test_invariants_parse_error_location(capsys, tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{"n": 2,\n  "m": }')
    code, _, err = run(capsys, "invariants", str(path))
    assert code == EXIT_INPUT
    assert "line 2" in err and "column" in err


@pytest.mark.parametrize("payload", [
    {"n": 2, "m": 2},
    {"n": 2, "m": 2, "rho": [[[1, 0], [0, 0]], [[0, 0], [0, 0]]]},
    {"n": 2, "m": 2, "rho": complex_matrix_to_json(np.diag([0.6, 0.6, -0.2]))},
])
def test_invariants_schema_errors(capsys, tmp_path, payload):
    path = tmp_path / "s.json"
    path.write_text(json.dumps(payload))
    code, _, err = run(capsys, "invariants", str(path))
    assert code == EXIT_INPUT
    assert err.startswith("loninv: error:")


def test_missing_file_is_input_error(capsys, tmp_path):
    code, _, _ = run(capsys, "invariants", str(tmp_path / "nope.json"))
    assert code == EXIT_INPUT


def test_tomography_roundtrip(capsys, tmp_path):
    rec = tmp_path / "rec.json"
    code, _, _ = run(capsys, "tomo-simulate", "--theta", "22.5", "--unitary", "U1", "--shots", "200000",
                     "--seed", "5", "--out", str(rec))
    assert code == EXIT_OK
    code, out, _ = run(capsys, "tomo-reconstruct", str(rec))
    assert code == EXIT_OK
    data = json.loads(out)["data"]
    assert data["fidelity_vs"] > 0.99
    assert data["invariants"]["I_t_prime"] == pytest.approx(4 / 9, abs=0.02)


def test_tomography_splitting_and_unknown_unitary(capsys, tmp_path):
    rec = tmp_path / "rec.json"
    run(capsys, "tomo-simulate", "--detector-model", "splitting", "--shots", "1000", "--out", str(rec))
    assert json.loads(rec.read_text())["data"]["model"] == "splitting"
    code, _, _ = run(capsys, "tomo-simulate", "--unitary", "U9")
    assert code == EXIT_INPUT


def test_sample_u2(capsys):
    _, out, _ = run(capsys, "sample-u2", "--count", "3", "--seed", "1")
    items = json.loads(out)["data"]
    assert len(items) == 3
    _, out, _ = run(capsys, "sample-u2", "--unitaries", "table-s2")
    assert [u["name"] for u in json.loads(out)["data"]] == [f"U{k}" for k in range(1, 9)]


def test_prepare(capsys):
    _, out, _ = run(capsys, "prepare", "--theta", "0", "45")
    data = json.loads(out)["data"]
    assert [d["alpha_deg"] for d in data] == [0.0, 90.0]


def test_dip_fit(capsys, tmp_path):
    truth = DipModel(a=1000.0, b=850.0, sigma=0.1, x0=0.5, k=0.05)
    x = np.linspace(-40, 40, 81)
    path = tmp_path / "dip.csv"
    np.savetxt(path, np.column_stack([x, hom_dip(x, truth)]), delimiter=",", header="delay,coincidence")
    code, out, _ = run(capsys, "dip-fit", str(path))
    assert code == EXIT_OK
    assert json.loads(out)["data"]["visibility"] == pytest.approx(0.85, abs=1e-6)
    bad = tmp_path / "bad.csv"
    bad.write_text("1\n2\n3\n")
    assert main(["dip-fit", str(bad)]) == EXIT_INPUT
