"""Command-line behavior: report schemas, exit codes, determinism."""

import json

import pytest

from pir_lab.cli import main, parse_fraction, parse_grid
from pir_lab.errors import ParameterError


def run(argv, capsys):
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_parse_fraction_accepts_exact_rationals_only():
    from fractions import Fraction

    assert parse_fraction("3/4") == Fraction(3, 4)
    assert parse_fraction("0") == 0
    assert parse_grid("0,1/8,1/4") == [Fraction(0), Fraction(1, 8), Fraction(1, 4)]
    assert parse_grid("") == []
    with pytest.raises(ParameterError):
        parse_fraction("0.5")
    with pytest.raises(ParameterError):
        parse_fraction("1e-3")


def test_audit_report_file(tmp_path, capsys):
    out = tmp_path / "report.json"
    code, _, _ = run(
        ["audit", "--scheme", "tsc", "--n", "3", "--k", "3", "--q", "2", "--out", str(out)],
        capsys,
    )
    assert code == 0
    payload = json.loads(out.read_text())
    assert payload["params"]["scheme"] == "tsc"
    assert payload["leakage"]["total_normalized"] == "0.444444444444"
    assert payload["leakage"]["individual_per_message"] == [
        "0.111111111111",
        "0.111111111111",
    ]
    assert payload["download_cost"] == {"achieved": "26/9", "theoretical": "26/9"}
    assert payload["rho"] == {"achieved": "0/1", "theoretical": "0/1", "entropy": "0/1"}
    assert payload["privacy_exact"] is True and payload["correctness"] is True


def test_audit_report_round_trips(tmp_path, capsys):
    out = tmp_path / "report.json"
    code, _, _ = run(
        ["audit", "--scheme", "spir", "--n", "2", "--k", "2", "--q", "2", "--out", str(out)],
        capsys,
    )
    assert code == 0
    raw = out.read_bytes()
    reserialized = (json.dumps(json.loads(raw), indent=2) + "\n").encode("ascii")
    assert reserialized == raw


def test_audit_selects_two_track_corner(tmp_path, capsys):
    out = tmp_path / "report.json"
    code, _, _ = run(
        ["audit", "--scheme", "wspir", "--n", "2", "--k", "3", "--q", "2", "--out", str(out)],
        capsys,
    )
    assert code == 0
    payload = json.loads(out.read_text())
    assert payload["params"]["length"] == 2
    assert all(
        float(v) <= 1e-12 for v in payload["leakage"]["individual_per_message"]
    )


def test_audit_rejects_budget_past_threshold(capsys):
    code, _, err = run(
        [
            "audit",
            "--scheme",
            "mixed-total",
            "--n",
            "2",
            "--k",
            "2",
            "--q",
            "2",
            "--budget",
            "3/4",
        ],
        capsys,
    )
    assert code == 2
    assert "threshold" in err and "1/2" in err


def test_audit_rejects_float_budget(capsys):
    code, _, err = run(
        [
            "audit",
            "--scheme",
            "mixed-total",
            "--n",
            "2",
            "--k",
            "2",
            "--q",
            "2",
            "--budget",
            "0.25",
        ],
        capsys,
    )
    assert code == 2
    assert "rational" in err


def test_state_cap_flag_and_env(monkeypatch, capsys):
    args = ["audit", "--scheme", "tsc", "--n", "3", "--k", "3", "--q", "2"]
    code, _, err = run(args + ["--cap", "10"], capsys)
    assert code == 3
    assert "576" in err

    monkeypatch.setenv("PIR_LAB_CAP", "10")
    code, _, err = run(args, capsys)
    assert code == 3

    code, _, _ = run(args + ["--cap", "1000"], capsys)  # flag beats the env var
    assert code == 0


def test_verify_respects_state_cap(capsys):
    code, _, err = run(["verify", "--cap", "10"], capsys)
    assert code == 3
    assert "cap" in err


def test_sweep_matches_hand_evaluated_curve(tmp_path, capsys):
    out = tmp_path / "curve.csv"
    code, _, _ = run(
        [
            "sweep",
            "--scheme",
            "mixed-total",
            "--n",
            "2",
            "--k",
            "2",
            "--q",
            "2",
            "--grid",
            "0,1/8,1/4,3/8,1/2",
            "--out",
            str(out),
        ],
        capsys,
    )
    assert code == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "budget,D_achieved,D_theory,leak_achieved,leak_budget,rho_achieved,rho_theory"
    d_theory = [line.split(",")[2] for line in lines[1:]]
    assert d_theory == ["2", "1.875", "1.75", "1.625", "1.5"]
    rho = [line.split(",")[5] for line in lines[1:]]
    assert rho == ["1", "0.75", "0.5", "0.25", "0"]


def test_sweep_individual_scheme_needs_no_randomness(tmp_path, capsys):
    out = tmp_path / "curve.csv"
    code, _, _ = run(
        [
            "sweep",
            "--scheme",
            "mixed-individual",
            "--n",
            "2",
            "--k",
            "3",
            "--q",
            "3",
            "--grid",
            "0,1/8,1/4",
            "--out",
            str(out),
        ],
        capsys,
    )
    assert code == 0
    rows = out.read_text().splitlines()[1:]
    assert [row.split(",")[6] for row in rows] == ["0", "0", "0"]


def test_sweep_empty_grid(tmp_path, capsys):
    out = tmp_path / "curve.csv"
    code, _, _ = run(
        [
            "sweep",
            "--scheme",
            "mixed-total",
            "--n",
            "2",
            "--k",
            "2",
            "--q",
            "2",
            "--grid",
            "",
            "--out",
            str(out),
        ],
        capsys,
    )
    assert code == 0
    assert out.read_text() == (
        "budget,D_achieved,D_theory,leak_achieved,leak_budget,rho_achieved,rho_theory\n"
    )


def test_sweep_outputs_are_byte_identical(tmp_path, capsys):
    args = [
        "sweep",
        "--scheme",
        "mixed-individual",
        "--n",
        "3",
        "--k",
        "3",
        "--q",
        "2",
        "--grid",
        "0,1/36,1/18,1/9",
    ]
    first, second = tmp_path / "a.csv", tmp_path / "b.csv"
    assert run(args + ["--out", str(first)], capsys)[0] == 0
    assert run(args + ["--out", str(second)], capsys)[0] == 0
    assert first.read_bytes() == second.read_bytes()


def test_threads_do_not_change_output(tmp_path, capsys):
    base = ["audit", "--scheme", "wspir", "--n", "2", "--k", "3", "--q", "3"]
    single, multi = tmp_path / "one.json", tmp_path / "two.json"
    assert run(base + ["--threads", "1", "--out", str(single)], capsys)[0] == 0
    assert run(base + ["--threads", "4", "--out", str(multi)], capsys)[0] == 0
    assert single.read_bytes() == multi.read_bytes()


def test_sweep_rejects_pure_schemes(capsys):
    code, _, err = run(
        ["sweep", "--scheme", "tsc", "--n", "2", "--k", "2", "--q", "2", "--grid", "0"],
        capsys,
    )
    assert code == 2
    assert "mixed" in err


def test_format_mismatches_rejected(capsys):
    code, _, _ = run(
        ["audit", "--scheme", "tsc", "--n", "2", "--k", "2", "--q", "2", "--format", "csv"],
        capsys,
    )
    assert code == 2
    code, _, _ = run(
        [
            "sweep",
            "--scheme",
            "mixed-total",
            "--n",
            "2",
            "--k",
            "2",
            "--q",
            "2",
            "--grid",
            "0",
            "--format",
            "json",
        ],
        capsys,
    )
    assert code == 2
