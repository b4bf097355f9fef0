"""Command line front end: presets, config handling, exit codes, record
shape, and the selftest canary."""

import json
import subprocess
import sys

import pytest

from shintani_kit import cli


def run_cli(capsys, argv):
    code = cli.main(argv)
    out = capsys.readouterr().out
    return code, (json.loads(out) if out.strip() else None)


def test_riemann_preset(capsys):
    code, rec = run_cli(capsys, ["zeta", "--preset", "riemann", "-k", "0,1"])
    assert code == 0
    assert rec["schema"] == "shintani-kit/1"
    assert rec["values"]["values"] == ["-1/2", "-1/12"]
    assert rec["certificates"]["oracle_ok"] is True


def test_riemann_deeper_values(capsys):
    code, rec = run_cli(capsys, ["zeta", "--preset", "riemann", "-k", "2,3"])
    assert code == 0
    assert rec["values"]["values"] == ["0/1", "1/120"]


def test_hurwitz_preset(capsys):
    code, rec = run_cli(
        capsys, ["zeta", "--preset", "hurwitz", "--a", "1", "--f", "3", "-k", "1"]
    )
    assert code == 0
    assert rec["values"]["values"] == ["1/12"]
    assert rec["certificates"]["hurwitz_oracle"] == ["1/12"]


def test_rq_field_preset(capsys):
    code, rec = run_cli(capsys, ["zeta", "--preset", "rq-field", "--D", "5", "-k", "0,1"])
    assert code == 0
    assert rec["values"]["values"] == ["0/1", "1/30"]


def test_custom_zeta_config(tmp_path, capsys):
    cfg = {
        "n": 1,
        "terms": [{"weight": 1, "offset": [2], "basis": [[5]]}],
        "cones": [{"weight": 1, "generators": [[1]]}],
        "k": [0, 1],
    }
    path = tmp_path / "zeta.json"
    path.write_text(json.dumps(cfg))
    code, rec = run_cli(capsys, ["zeta", "--config", str(path)])
    assert code == 0
    # 2 + 5Z: matches the closed Bernoulli form
    assert rec["values"]["values"] == ["1/10", "11/60"]


def test_zeta_rejects_unknown_preset(capsys):
    # argparse enforces the preset choices itself
    with pytest.raises(SystemExit) as exc:
        cli.main(["zeta", "--preset", "euler"])
    assert exc.value.code == 2


def test_config_errors(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert cli.main(["zeta", "--config", str(bad)]) == 2
    err = capsys.readouterr().err
    assert "line 1" in err

    missing = tmp_path / "missing.json"
    missing.write_text(json.dumps({"preset": "hurwitz", "f": 3}))
    assert cli.main(["zeta", "--config", str(missing)]) == 2
    assert "'a'" in capsys.readouterr().err

    assert cli.main(["zeta", "--preset", "rq-field", "--D", "12", "-k", "1"]) == 2
    assert cli.main(["zeta", "--preset", "riemann", "-k", "1,x"]) == 2


def test_hill_terms_and_points(tmp_path, capsys):
    cfg = {
        "matrices": [[[1, 0], [0, 1]], [[1, 1], [1, 2]]],
        "points": [[3, 1], [1, 1], [-2, 5]],
    }
    path = tmp_path / "hill.json"
    path.write_text(json.dumps(cfg))
    code, rec = run_cli(capsys, ["hill", "--config", str(path)])
    assert code == 0
    assert rec["values"]["evaluations"] == [1, 1, 0]
    assert rec["certificates"]["pointwise_match"] is True
    gens = [t["generators"] for t in rec["values"]["terms"]]
    assert [["1/1", "1/1"]] in gens  # the shared edge appears as a ray


def test_hill_degenerate_tuple_is_config_error(tmp_path, capsys):
    cfg = {"matrices": [[[1, 0], [0, 1]], [[1, 0], [0, 1]]]}
    path = tmp_path / "hill.json"
    path.write_text(json.dumps(cfg))
    assert cli.main(["hill", "--config", str(path)]) == 2
    assert "degenerate" in capsys.readouterr().err


def test_measure_smoothed_and_unsmoothed(tmp_path, capsys):
    smoothed = {
        "n": 1,
        "p": 3,
        "terms": [
            {"weight": 1, "offset": [0], "basis": [[1]]},
            {"weight": -2, "offset": [0], "basis": [[2]]},
        ],
        "cones": [{"weight": 1, "generators": [[1]]}],
        "k": [0, 1],
        "caps": [6],
    }
    path = tmp_path / "meas.json"
    path.write_text(json.dumps(smoothed))
    code, rec = run_cli(capsys, ["measure", "--config", str(path)])
    assert code == 0
    assert rec["values"]["is_measure"] is True
    assert rec["values"]["moments"] == {"0": "1/2", "1": "1/4"}
    assert rec["certificates"] == {"routes_agree": True, "integral_coefficients": True}

    unsmoothed = dict(smoothed, terms=[{"weight": 1, "offset": [0], "basis": [[1]]}])
    path.write_text(json.dumps(unsmoothed))
    code, rec = run_cli(capsys, ["measure", "--config", str(path)])
    assert code == 0
    assert rec["values"]["is_measure"] is False
    assert "moments" not in rec["values"]


def test_padic_zeta_interpolation(capsys):
    code, rec = run_cli(
        capsys,
        ["padic-zeta", "--D", "5", "--p", "3", "--ell", "11", "--m", "1", "-k", "0,1,2"],
    )
    assert code == 0
    assert rec["certificates"]["interpolation_ok"] is True
    assert rec["certificates"]["integral_coefficients"] is True
    rows = rec["values"]["table"]
    assert [r["exact"] for r in rows] == ["4/1", "16/1", "2368/1"]
    assert all(r["interpolation_ok"] for r in rows)
    v = rows[2]["padic"]
    assert v["p"] == 3 and v["M"] == 6 and v["residue"] == 2368 % 3**6


def test_padic_zeta_rejects_ell_equal_p(capsys):
    code = cli.main(["padic-zeta", "--D", "5", "--p", "11", "--ell", "11", "-k", "1"])
    assert code == 2
    assert "smoothing prime must differ from p" in capsys.readouterr().err


def test_padic_zeta_rejects_inert_ell(capsys):
    code = cli.main(["padic-zeta", "--D", "5", "--p", "11", "--ell", "3", "-k", "1"])
    assert code == 2
    assert "degree-one" in capsys.readouterr().err


def test_kubota_leopoldt_command(capsys):
    code, rec = run_cli(capsys, ["kubota-leopoldt", "--p", "3", "--ell", "2", "-k", "0,1"])
    assert code == 0
    assert rec["values"]["mass"] == "1/2"
    assert [r["moment"] for r in rec["values"]["table"]] == ["1/2", "1/4"]
    assert rec["certificates"]["oracle_ok"] is True
    for row in rec["values"]["table"]:
        assert set(row["value"]) == {"residue", "p", "M", "guard"}


def test_out_flag_writes_file(tmp_path, capsys):
    out = tmp_path / "r.json"
    code = cli.main(["zeta", "--preset", "riemann", "-k", "0", "--out", str(out)])
    assert code == 0
    assert capsys.readouterr().out == ""
    rec = json.loads(out.read_text())
    assert rec["values"]["values"] == ["-1/2"]


def test_selftest_quick(capsys):
    code, rec = run_cli(capsys, ["selftest", "--quick"])
    assert code == 0
    assert rec["certificates"]["all_ok"] is True
    names = [c["name"] for c in rec["values"]["checks"]]
    assert "bernoulli-constants" in names and "interpolation-quick" in names
    assert rec["values"]["failed"] == 0


def test_selftest_tamper_canary_fails_in_subprocess():
    # run in a subprocess so the corrupted cache cannot leak into this one
    proc = subprocess.run(
        [sys.executable, "-m", "shintani_kit.cli", "selftest", "--quick", "--tamper-bernoulli"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 3
    rec = json.loads(proc.stdout)
    assert rec["certificates"]["tampered"] is True
    failed = [c["name"] for c in rec["values"]["checks"] if not c["ok"]]
    assert "bernoulli-constants" in failed


def test_determinism_byte_identical():
    argv = [
        sys.executable, "-m", "shintani_kit.cli",
        "zeta", "--preset", "rq-field", "--D", "5", "-k", "0,1",
    ]
    outs = []
    for _ in range(2):
        proc = subprocess.run(argv, capture_output=True, text=True)
        assert proc.returncode == 0
        rec = json.loads(proc.stdout)
        del rec["timing"]
        outs.append(json.dumps(rec, sort_keys=True))
    assert outs[0] == outs[1]
