"""Subcommand behavior, output formats, and the exit-code contract."""

import csv
import json
from fractions import Fraction

import pytest

from qhofer import model_blowup_cp2
from qhofer.cli import main, worker_count


def run(capsys, *argv):
    """Invoke the CLI in-process; returns (exit code, stdout, stderr)."""
    try:
        code = main(list(argv))
    except SystemExit as exc:  # argparse-level usage errors
        code = exc.code
    out, err = capsys.readouterr()
    return code, out, err


class TestProduct:
    def test_blowup_golden(self, capsys):
        code, out, _ = run(
            capsys, "product", "--model", "blowup", "--a2", "1/4", "E", "F"
        )
        assert code == 0
        assert out.strip() == "1 * p + -1 * E * e^{-1*E}"

    def test_projective_line(self, capsys):
        code, out, _ = run(capsys, "product", "--model", "cpn", "--n", "1", "x", "x")
        assert code == 0
        assert out.strip() == "1 * 1 * e^{-1*L}"

    def test_unit_factor(self, capsys):
        code, out, _ = run(
            capsys, "product", "--model", "blowup", "--a2", "1/4", "1", "E"
        )
        assert code == 0
        assert out.strip() == "1 * E"

    def test_json_format(self, capsys):
        code, out, _ = run(
            capsys,
            "product", "--model", "blowup", "--a2", "1/4",
            "--format", "json", "F", "F",
        )
        assert code == 0
        assert json.loads(out)["product"] == "1 * E * e^{-1*E}"

    def test_parse_error_is_usage(self, capsys):
        code, _, err = run(
            capsys, "product", "--model", "blowup", "--a2", "1/4", "E +", "F"
        )
        assert code == 1
        assert "parse error" in err

    def test_missing_area_is_usage(self, capsys):
        code, _, err = run(capsys, "product", "E", "F")
        assert code == 1
        assert "--a2" in err


class TestPowerAndInvert:
    def test_negative_power(self, capsys):
        code, out, _ = run(
            capsys,
            "power", "--model", "blowup", "--a2", "1/4", "--k", "-4",
            "F * e^{1/2*E + 1/4*F}",
        )
        assert code == 0
        assert out.strip() == "1 * p * e^{1*F} + 1 * 1"

    def test_exact_inverse_reported(self, capsys):
        code, out, _ = run(
            capsys,
            "invert", "--model", "blowup", "--a2", "1/4",
            "F * e^{1/2*E + 1/4*F}",
        )
        assert code == 0
        assert "1 * p * e^{1/2*E + 3/4*F}" in out
        assert "exact inverse" in out

    def test_truncated_inverse_notes_floor(self, capsys):
        code, out, _ = run(
            capsys,
            "invert", "--model", "blowup", "--a2", "1/4", "--floor", "-3",
            "--format", "json", "1 + p",
        )
        assert code == 0
        payload = json.loads(out)
        assert payload["exact"] is False
        assert payload["floor"] == "-3"

    def test_non_invertible_is_check_failure(self, capsys):
        code, _, err = run(
            capsys,
            "invert", "--model", "cpn", "--n", "1", "x + -1 * 1 * e^{-1/2*L}",
        )
        assert code == 2
        assert "singular" in err


class TestPsi:
    def test_zero_multiple_prints_unit(self, capsys):
        code, out, _ = run(capsys, "psi", "--k", "0", "--a2", "1/4")
        assert code == 0
        m = model_blowup_cp2(Fraction(1, 4))
        assert m.element(out.splitlines()[0]) == m.unit()

    def test_json_payload(self, capsys):
        code, out, _ = run(
            capsys, "psi", "--k", "2", "--a2", "1/4", "--format", "json"
        )
        assert code == 0
        payload = json.loads(out)
        assert payload["delta"] == "3/20"
        assert payload["valuation"] == "9/20"
        assert payload["value"] == "1 * E * e^{-3/5*E + 4/5*F}"

    def test_monotone_value_fails_check(self, capsys):
        code, _, err = run(capsys, "psi", "--k", "1", "--a2", "1/3")
        assert code == 2
        assert "3a^2" in err


class TestBoundsAndGrowth:
    def test_bounds_hold(self, capsys):
        code, out, _ = run(
            capsys, "bounds", "--a2", "1/10", "--kmax", "30", "--format", "json"
        )
        assert code == 0
        payload = json.loads(out)
        assert payload["all_hold"] is True
        assert len(payload["rows"]) == 30

    def test_bounds_csv_to_file(self, capsys, tmp_path):
        target = tmp_path / "bounds.csv"
        code, out, _ = run(
            capsys,
            "bounds", "--a2", "1/2", "--kmax", "8",
            "--format", "csv", "--out", str(target),
        )
        assert code == 0
        rows = list(csv.reader(target.open()))
        assert rows[0][:2] == ["k", "bound"]
        assert len(rows) == 9

    def test_bounds_threaded_matches_serial(self, capsys, monkeypatch):
        code, serial, _ = run(
            capsys, "bounds", "--a2", "2/5", "--kmax", "40", "--format", "csv"
        )
        monkeypatch.setenv("QH_HOFER_THREADS", "4")
        code2, threaded, _ = run(
            capsys, "bounds", "--a2", "2/5", "--kmax", "40", "--format", "csv"
        )
        assert code == code2 == 0
        assert serial == threaded

    def test_growth_csv_columns(self, capsys):
        code, out, _ = run(
            capsys, "growth", "--kmax", "6", "--a2", "1/5", "--format", "csv"
        )
        assert code == 0
        header = out.splitlines()[0].split(",")
        assert header == [
            "k", "vQk", "vQk_dec", "vQnegk", "vQnegk_dec",
            "bound", "bound_dec", "omegaF", "omegaF_dec",
        ]

    def test_growth_text_summary(self, capsys):
        code, out, _ = run(capsys, "growth", "--kmax", "12", "--a2", "1/2")
        assert code == 0
        assert "bounded: True" in out

    def test_rtilde_certificate(self, capsys):
        code, out, _ = run(capsys, "rtilde", "--a2", "1/2", "--kmax", "50")
        assert code == 0
        assert "attained at k = 2" in out
        assert "1/2 (x pi)" in out

    def test_rtilde_json(self, capsys):
        code, out, _ = run(
            capsys, "rtilde", "--a2", "3/4", "--format", "json"
        )
        assert code == 0
        payload = json.loads(out)
        assert payload["min_bound"] == "1/4"
        assert payload["matches_omegaF"] is True


class TestLengthsAndGeocheck:
    def test_lengths_double_loop(self, capsys):
        code, out, _ = run(capsys, "lengths", "--a2", "1/2", "--k", "2")
        assert code == 0
        assert "0.500000000000 x pi" in out

    def test_lengths_single_loop(self, capsys):
        code, out, _ = run(capsys, "lengths", "--a2", "1/2", "--k", "1")
        assert code == 0
        assert "1.000000000000 x pi" in out

    def test_geocheck_passes_on_constant(self, capsys, tmp_path):
        grid = tmp_path / "const.csv"
        grid.write_text("1,2,3\n1,2,3\n1,2,3\n")
        code, out, _ = run(capsys, "geocheck", str(grid))
        assert code == 0
        payload = json.loads(out)
        assert payload["has_fixed_max_each_moment"] is True

    def test_geocheck_fails_on_crossing(self, capsys, tmp_path):
        grid = tmp_path / "cross.csv"
        grid.write_text("0,1\n1,0\n")
        code, _, err = run(capsys, "geocheck", str(grid))
        assert code == 2
        assert "no fixed" in err

    def test_geocheck_weights_row(self, capsys, tmp_path):
        grid = tmp_path / "weighted.csv"
        grid.write_text("weights,1,2\n0,1\n0,1\n")
        code, out, _ = run(capsys, "geocheck", str(grid), "--format", "text")
        assert code == 0
        assert "fixed max at each moment: True" in out

    def test_geocheck_missing_file_is_usage(self, capsys, tmp_path):
        code, _, err = run(capsys, "geocheck", str(tmp_path / "nope.csv"))
        assert code == 1

    def test_geocheck_malformed_is_usage(self, capsys, tmp_path):
        grid = tmp_path / "bad.csv"
        grid.write_text("a,b\nc,d\n")
        code, _, err = run(capsys, "geocheck", str(grid))
        assert code == 1
        assert "non-numeric" in err


class TestModelFiles:
    def test_export_then_validate(self, capsys, tmp_path):
        target = tmp_path / "blowup.json"
        code, _, _ = run(
            capsys,
            "model-export", "--model", "blowup", "--a2", "1/4",
            "--out", str(target),
        )
        assert code == 0
        code, out, _ = run(capsys, "model-validate", str(target))
        assert code == 0
        assert "valid" in out

    def test_validate_rejects_broken_file(self, capsys, tmp_path):
        target = tmp_path / "blowup.json"
        run(capsys, "model-export", "--model", "blowup", "--a2", "1/4",
            "--out", str(target))
        data = json.loads(target.read_text())
        data["pairing"][0][3] = "0"
        target.write_text(json.dumps(data))
        code, _, err = run(capsys, "model-validate", str(target))
        assert code == 2
        assert "invalid model" in err

    def test_validate_missing_file_is_usage(self, capsys, tmp_path):
        code, _, _ = run(capsys, "model-validate", str(tmp_path / "gone.json"))
        assert code == 1

    def test_exported_model_usable_by_product(self, capsys, tmp_path):
        target = tmp_path / "cp2.json"
        code, _, _ = run(
            capsys, "model-export", "--model", "cpn", "--n", "2",
            "--out", str(target),
        )
        assert code == 0
        code, out, _ = run(capsys, "product", "--model", str(target), "x", "x^2")
        assert code == 0
        assert out.strip() == "1 * 1 * e^{-1*L}"


class TestUsage:
    def test_no_arguments(self, capsys):
        code, _, _ = run(capsys)
        assert code == 1

    def test_unknown_subcommand(self, capsys):
        code, _, _ = run(capsys, "frobnicate")
        assert code == 1

    def test_bad_rational_flag(self, capsys):
        code, _, _ = run(capsys, "rtilde", "--a2", "zebra")
        assert code == 1

    def test_worker_count_parsing(self, monkeypatch):
        monkeypatch.delenv("QH_HOFER_THREADS", raising=False)
        assert worker_count() == 1
        monkeypatch.setenv("QH_HOFER_THREADS", "6")
        assert worker_count() == 6
        monkeypatch.setenv("QH_HOFER_THREADS", "0")
        assert worker_count() == 1
        monkeypatch.setenv("QH_HOFER_THREADS", "soup")
        assert worker_count() == 1
