"""End-to-end tests of the command-line surface: formats, determinism, exits."""

import hashlib
import json
import math
import subprocess
import sys
from pathlib import Path

import pytest

from mobiusdisc.cli import main

MODELS = Path(__file__).resolve().parent.parent / "models"
ANDERSON = str(MODELS / "anderson.json")
MIXTURE = str(MODELS / "binary_mixture.json")
DIMER = str(MODELS / "dimer.json")


def run_cli(capsys, *args):
    code = main(list(args))
    out = capsys.readouterr().out
    return code, out


def parse_csv(text):
    lines = [ln for ln in text.splitlines() if not ln.startswith("#")]
    header = lines[0].split(",")
    rows = [ln.split(",") for ln in lines[1:]]
    return header, rows


# ---------------------------------------------------------------------------
# orbit
# ---------------------------------------------------------------------------


def test_orbit_header_and_rows(capsys):
    code, out = run_cli(capsys, "orbit", ANDERSON, "--steps", "50")
    assert code == 0
    header, rows = parse_csv(out)
    assert header == ["n", "re_z", "im_z", "abs_z2"]
    assert len(rows) == 50
    assert [int(r[0]) for r in rows] == list(range(1, 51))
    for r in rows:
        re, im, s = float(r[1]), float(r[2]), float(r[3])
        assert s == pytest.approx(re * re + im * im, abs=1e-15)
        assert s <= 1.0


def test_orbit_single_step_at_origin_is_fixed(capsys):
    code, out = run_cli(
        capsys, "orbit", ANDERSON, "--steps", "1",
        "--epsilon", "0", "--delta", "0", "--z0", "0j",
    )
    assert code == 0
    header, rows = parse_csv(out)
    assert len(rows) == 1
    assert rows[0] == ["1", "0", "0", "0"]


def test_orbit_burnin_shifts_numbering(capsys):
    code, out = run_cli(capsys, "orbit", ANDERSON, "--steps", "20", "--burnin", "5")
    assert code == 0
    _, rows = parse_csv(out)
    assert len(rows) == 15
    assert int(rows[0][0]) == 6
    assert int(rows[-1][0]) == 20


def test_orbit_seed_changes_output(capsys):
    _, out0 = run_cli(capsys, "orbit", ANDERSON, "--steps", "10")
    _, out0b = run_cli(capsys, "orbit", ANDERSON, "--steps", "10")
    _, out1 = run_cli(capsys, "orbit", ANDERSON, "--steps", "10", "--seed", "1")
    assert out0 == out0b
    assert out0 != out1


# ---------------------------------------------------------------------------
# hist
# ---------------------------------------------------------------------------


def test_hist_rows_sidecar_and_normalization(capsys):
    code, out = run_cli(
        capsys, "hist", ANDERSON, "--steps", "20000", "--burnin", "1000",
        "--bins", "50",
    )
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "s_lo,s_hi,count,empirical_density,rho_lambda"
    assert len(lines) == 52  # header + 50 bins + sidecar
    assert lines[-1].startswith("# ")
    side = json.loads(lines[-1][2:])
    assert set(side) == {"lambda", "ks"}
    assert side["lambda"] == pytest.approx(1.0475106357031854, rel=1e-12)
    assert 0.0 < side["ks"] < 1.0
    _, rows = parse_csv(out)
    assert sum(int(r[2]) for r in rows) == 19000
    width = 1.0 / 50
    assert sum(float(r[3]) * width for r in rows) == pytest.approx(1.0, abs=1e-12)
    # overlay column integrates to ~1 as well (midpoint rule)
    assert sum(float(r[4]) * width for r in rows) == pytest.approx(1.0, abs=0.01)


def test_hist_without_law_reports_null(capsys):
    code, out = run_cli(
        capsys, "hist", ANDERSON, "--steps", "2000", "--burnin", "0", "--delta", "0",
    )
    assert code == 0
    lines = out.splitlines()
    side = json.loads(lines[-1][2:])
    assert side["lambda"] is None
    assert side["ks"] is None
    _, rows = parse_csv(out)
    assert all(r[4] == "nan" for r in rows)


def test_hist_delta_override_scales_lambda(capsys):
    _, out1 = run_cli(capsys, "hist", ANDERSON, "--steps", "2000", "--burnin", "0")
    _, out2 = run_cli(
        capsys, "hist", ANDERSON, "--steps", "2000", "--burnin", "0",
        "--delta", "0.00024",
    )
    lam1 = json.loads(out1.splitlines()[-1][2:])["lambda"]
    lam2 = json.loads(out2.splitlines()[-1][2:])["lambda"]
    assert lam2 == pytest.approx(2.0 * lam1, rel=1e-12)


def test_hist_replicas_merge_counts(capsys):
    code, out = run_cli(
        capsys, "hist", ANDERSON, "--steps", "3000", "--burnin", "1000",
        "--replicas", "3",
    )
    assert code == 0
    _, rows = parse_csv(out)
    assert sum(int(r[2]) for r in rows) == 3 * 2000


# ---------------------------------------------------------------------------
# lyap / scan
# ---------------------------------------------------------------------------


def test_lyap_json_fields(capsys):
    code, out = run_cli(capsys, "lyap", ANDERSON, "--steps", "20000")
    assert code == 0
    doc = json.loads(out)
    assert set(doc) == {
        "gamma_hat", "stderr", "gamma_furstenberg", "prediction", "residual",
        "C", "D", "lambda",
    }
    assert doc["residual"] == pytest.approx(
        doc["gamma_hat"] - doc["prediction"], abs=1e-18
    )
    assert doc["prediction"] == pytest.approx(
        doc["C"] * 1.2e-4 + doc["D"] * 0.05**2, rel=1e-12
    )
    assert doc["stderr"] > 0.0
    assert abs(doc["gamma_hat"] - doc["prediction"]) < 10 * doc["stderr"] + 0.5 * doc["prediction"]


def test_lyap_single_replica_is_usage_error(capsys):
    code, _ = run_cli(capsys, "lyap", ANDERSON, "--replicas", "1")
    assert code == 2


def test_scan_grid_rows(capsys):
    code, out = run_cli(
        capsys, "scan", ANDERSON, "--epsilon-grid", "0.02,0.05",
        "--delta-grid", "0,0.00012", "--steps", "5000", "--replicas", "2",
    )
    assert code == 0
    header, rows = parse_csv(out)
    assert header == ["epsilon", "delta", "gamma_hat", "stderr", "prediction", "residual"]
    assert len(rows) == 4
    assert [(float(r[0]), float(r[1])) for r in rows] == [
        (0.02, 0.0), (0.02, 1.2e-4), (0.05, 0.0), (0.05, 1.2e-4),
    ]
    for r in rows:
        assert float(r[5]) == pytest.approx(float(r[2]) - float(r[4]), abs=1e-18)


def test_scan_empty_grid_is_usage_error(capsys):
    code, _ = run_cli(
        capsys, "scan", ANDERSON, "--epsilon-grid", ",", "--delta-grid", "0.1",
    )
    assert code == 2


# ---------------------------------------------------------------------------
# constants
# ---------------------------------------------------------------------------


def test_constants_anderson_values(capsys):
    code, out = run_cli(capsys, "constants", ANDERSON)
    assert code == 0
    doc = json.loads(out)
    assert doc["C"] == pytest.approx(1.0 / (2.0 * math.sin(2.0)), rel=1e-12)
    assert doc["D"] == pytest.approx(1.0 / (24.0 * math.sin(2.0) ** 2), rel=1e-12)
    assert doc["lambda_per_unit_ratio"] == pytest.approx(2 * doc["C"] / doc["D"], rel=1e-12)
    assert doc["d_classification"] == "positive"
    assert doc["beta_mean_re"] == 0.0 and doc["beta_mean_im"] == 0.0
    assert doc["xi_q3_bound"] == pytest.approx(1.0, rel=1e-12)
    assert len(doc["phase2_mean"]) == 2 and len(doc["phase4_mean"]) == 2


def test_constants_all_shipped_models(capsys):
    for model in (ANDERSON, MIXTURE, DIMER):
        code, out = run_cli(capsys, "constants", model)
        assert code == 0
        doc = json.loads(out)
        assert doc["D"] > 0.0
        assert doc["C"] > 0.0


def test_constants_anomaly_reports_structured_error(capsys, tmp_path):
    model = tmp_path / "anomalous.json"
    model.write_text(json.dumps({
        "type": "generic", "epsilon": 0.1, "delta": 0.0,
        "atoms": [{"weight": 1.0, "eta": 0.0, "P": [0.3, 0, 0], "Q": [0, 0, 1.0]}],
    }))
    code, out = run_cli(capsys, "constants", str(model))
    assert code == 3
    doc = json.loads(out)
    assert doc["error"]["kind"] == "anomaly"
    assert "e^{2i eta}" in doc["error"]["message"]


def test_constants_subprocess_is_light():
    # the constants path must not pull in the jit compiler
    script = (
        "import sys; from mobiusdisc.cli import main; "
        f"rc = main(['constants', {ANDERSON!r}]); "
        "assert rc == 0, rc; assert 'numba' not in sys.modules"
    )
    subprocess.run([sys.executable, "-c", script], check=True, capture_output=True)


# ---------------------------------------------------------------------------
# determinism
# ---------------------------------------------------------------------------


def test_hist_bytes_independent_of_threads(tmp_path, monkeypatch):
    digests = set()
    for threads in ("1", "4"):
        monkeypatch.setenv("THREADS", threads)
        out = tmp_path / f"hist_{threads}.csv"
        code = main([
            "hist", ANDERSON, "--steps", "50000", "--burnin", "1000",
            "--replicas", "4", "--out", str(out),
        ])
        assert code == 0
        digests.add(hashlib.sha256(out.read_bytes()).hexdigest())
    assert len(digests) == 1


def test_lyap_bytes_independent_of_threads(tmp_path, monkeypatch):
    digests = set()
    for threads in ("1", "3"):
        monkeypatch.setenv("THREADS", threads)
        out = tmp_path / f"lyap_{threads}.json"
        code = main([
            "lyap", ANDERSON, "--steps", "20000", "--replicas", "3",
            "--out", str(out),
        ])
        assert code == 0
        digests.add(hashlib.sha256(out.read_bytes()).hexdigest())
    assert len(digests) == 1


def test_out_file_matches_stdout(tmp_path, capsys):
    path = tmp_path / "orbit.csv"
    code = main(["orbit", ANDERSON, "--steps", "25", "--out", str(path)])
    assert code == 0
    capsys.readouterr()
    _, out = run_cli(capsys, "orbit", ANDERSON, "--steps", "25")
    assert path.read_text() == out
    assert out.endswith("\n")


# ---------------------------------------------------------------------------
# check
# ---------------------------------------------------------------------------


def test_check_selected_suites_pass(capsys):
    code, out = run_cli(
        capsys, "check", "--suite", "density", "--suite", "expansions",
    )
    assert code == 0
    doc = json.loads(out)
    assert doc["passed"] is True
    assert set(doc["suites"]) == {"density", "expansions"}
    for suite in doc["suites"].values():
        assert suite["passed"] is True
        for a in suite["assertions"]:
            assert set(a) == {"name", "measured", "tolerance", "comparison", "passed"}
            assert a["passed"] is True


def test_check_lambda_fault_fails_density(capsys, monkeypatch):
    monkeypatch.setenv("MOBIUSDISC_LAMBDA_SCALE", "1.1")
    code, out = run_cli(capsys, "check", "--suite", "density")
    assert code == 1
    doc = json.loads(out)
    assert doc["passed"] is False
    failed = [
        a["name"]
        for a in doc["suites"]["density"]["assertions"]
        if not a["passed"]
    ]
    assert failed == ["weak_identity_residual"]


def test_check_unknown_suite_is_usage_error(capsys):
    code, _ = run_cli(capsys, "check", "--suite", "nonsense")
    assert code == 2


# ---------------------------------------------------------------------------
# errors and usage
# ---------------------------------------------------------------------------


def test_missing_model_file_exit_2(capsys):
    code, _ = run_cli(capsys, "orbit", "/no/such/model.json")
    assert code == 2


def test_malformed_json_exit_2(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("not json {")
    code, _ = run_cli(capsys, "constants", str(bad))
    assert code == 2


def test_invalid_model_document_exit_2(capsys, tmp_path):
    doc = tmp_path / "doc.json"
    doc.write_text(json.dumps({"type": "generic", "epsilon": 0.1, "delta": 0.0}))
    code, _ = run_cli(capsys, "constants", str(doc))
    assert code == 2


def test_unknown_verb_exit_2(capsys):
    assert main(["bogus"]) == 2


def test_missing_verb_exit_2(capsys):
    assert main([]) == 2


def test_help_exit_0(capsys):
    assert main(["--help"]) == 0
    out = capsys.readouterr().out
    for verb in ("orbit", "hist", "lyap", "scan", "constants", "check"):
        assert verb in out


def test_invalid_run_config_exit_2(capsys):
    code, _ = run_cli(capsys, "orbit", ANDERSON, "--steps", "10", "--burnin", "10")
    assert code == 2
    code, _ = run_cli(capsys, "orbit", ANDERSON, "--z0", "2+0j")
    assert code == 2


def test_escape_maps_to_exit_3(capsys, monkeypatch):
    import mobiusdisc.dynamics as dynamics

    def boom(spec, cfg):
        raise dynamics.EscapeError("orbit escaped the closed disc around step 7")

    monkeypatch.setattr(dynamics, "orbit_trajectory", boom)
    code, _ = run_cli(capsys, "orbit", ANDERSON, "--steps", "10")
    assert code == 3
