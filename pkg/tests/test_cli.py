"""
End-to-end tests of the command line: eval, phase, gfunc, figure and
validate, plus exit codes.
"""

import csv
import math
import sys
from pathlib import Path

import pytest

# Add parent directory to path
sys.path.insert(0, str(Path(__file__).parent.parent))

from eplab.core.config import Config
from eplab.cli.cli import EXIT_FAILURE, EXIT_OK, EXIT_USAGE, main
from eplab.cli.figures import FIGURES


def _read(path: Path):
    """Metadata dict and data rows of a written CSV"""
    lines = path.read_text().splitlines()
    meta = dict(line[2:].split("=", 1) for line in lines if line.startswith("# "))
    rows = list(csv.DictReader(line for line in lines if not line.startswith("#")))
    return meta, rows


CHIELLINI_EVAL = [
    "eval", "--family", "chiellini", "--branch", "pos", "--lambda2", "0.25",
    "--c", "1", "--c1", "1", "--sign", "plus", "--zeta-min", "0", "--zeta-max", "6", "--samples", "601",
]


@pytest.fixture(autouse=True)
def clean_config(monkeypatch, tmp_path):
    monkeypatch.setattr(Config, "VALIDATION_TOLERANCE_RAW", "")
    monkeypatch.setattr(Config, "VALIDATION_WORKERS", 1)
    monkeypatch.setattr(Config, "LOG_LEVEL", "WARNING")
    monkeypatch.setattr(Config, "OUTPUT_DIR", str(tmp_path / "figures"))


class TestEval:
    """eval writes one CSV per family"""

    def test_chiellini_positive_branch(self, tmp_path):
        out = tmp_path / "v.csv"
        assert main(CHIELLINI_EVAL + ["--out", str(out)]) == EXIT_OK
        meta, rows = _read(out)
        assert len(rows) == 601
        assert rows[0] == {"zeta": "0", "re": "1", "im": "0"}
        assert rows[-1]["zeta"] == "6"
        assert meta["family"] == "chiellini"
        assert meta["zeta_window"] == "0,6"

    def test_output_is_deterministic(self, tmp_path):
        first, second = tmp_path / "a.csv", tmp_path / "b.csv"
        assert main(CHIELLINI_EVAL + ["--out", str(first)]) == EXIT_OK
        assert main(CHIELLINI_EVAL + ["--out", str(second)]) == EXIT_OK
        assert first.read_bytes() == second.read_bytes()

    def test_default_output_location(self, tmp_path):
        assert main(CHIELLINI_EVAL) == EXIT_OK
        assert (tmp_path / "figures" / "eval_chiellini.csv").exists()

    def test_sep_zero_strength_is_abs_cos(self, tmp_path):
        out = tmp_path / "sep.csv"
        args = ["eval", "--family", "sep", "--branch", "pos", "--lambda2", "1", "--c", "0",
                "--zeta-max", "3", "--samples", "31", "--out", str(out)]
        assert main(args) == EXIT_OK
        _, rows = _read(out)
        for row in rows:
            assert float(row["re"]) == pytest.approx(abs(math.cos(float(row["zeta"]))), abs=1e-12)

    def test_reid_pair_with_reference_constants(self, tmp_path):
        out = tmp_path / "reid.csv"
        args = ["eval", "--family", "reid", "--branch", "zero", "--m", "2", "--lambda2", "0",
                "--reference-constants", "--zeta-min", "-1", "--zeta-max", "1", "--samples", "21", "--out", str(out)]
        assert main(args) == EXIT_OK
        meta, rows = _read(out)
        assert list(rows[0]) == ["zeta", "re_u", "im_u", "re_v", "im_v"]
        assert meta["I_bc"] == "1"
        middle = rows[10]
        assert middle["zeta"] == "0"
        assert float(middle["im_u"]) == pytest.approx(1.0)

    def test_svg_alongside_csv(self, tmp_path):
        out = tmp_path / "v.csv"
        assert main(CHIELLINI_EVAL + ["--out", str(out), "--format", "svg"]) == EXIT_OK
        assert out.with_suffix(".svg").read_text().startswith("<svg")

    def test_leaving_real_domain_exits_one(self, tmp_path):
        """The Milne phase integrand turns imaginary once v_gamma^2 < 0"""
        args = ["eval", "--family", "theorem", "--lambda2", "0.25", "--c", "1", "--c1", "1",
                "--zeta-max", "3", "--samples", "61", "--out", str(tmp_path / "u.csv")]
        assert main(args) == EXIT_FAILURE


class TestPhaseAndGain:
    """phase and gfunc"""

    def test_reid_phase_m2_zero_branch(self, tmp_path):
        out = tmp_path / "phase.csv"
        args = ["phase", "--family", "reid", "--branch", "zero", "--lambda2", "0",
                "--zeta-min", "-2", "--zeta-max", "2", "--samples", "9", "--out", str(out)]
        assert main(args) == EXIT_OK
        _, rows = _read(out)
        for row in rows:
            assert float(row["re"]) == pytest.approx(math.atan(float(row["zeta"])), abs=1e-10)

    def test_chiellini_phase_starts_at_zero(self, tmp_path):
        out = tmp_path / "phase.csv"
        args = ["phase", "--family", "chiellini", "--lambda2", "0.25", "--zeta-max", "1",
                "--samples", "11", "--out", str(out)]
        assert main(args) == EXIT_OK
        _, rows = _read(out)
        assert rows[0]["re"] == "0"
        assert float(rows[-1]["re"]) > 0.0

    def test_gfunc_writes_nan_outside_domain(self, tmp_path):
        out = tmp_path / "g.csv"
        args = ["gfunc", "--lambda2", "0.25", "--zeta-max", "6", "--samples", "121", "--out", str(out)]
        assert main(args) == EXIT_OK
        _, rows = _read(out)
        assert len(rows) == 121


class TestFigure:
    """figure presets"""

    def test_gain_figure_changes_sign(self, tmp_path):
        assert main(["figure", "--id", "7", "--out", str(tmp_path)]) == EXIT_OK
        _, rows = _read(tmp_path / "figure_7_fig-e6.csv")
        values = [float(r["re"]) for r in rows if r["re"] != "nan"]
        assert len(rows) == 601
        assert min(values) < 0.0 < max(values)

    def test_pair_figure_columns_and_svg(self, tmp_path):
        assert main(["figure", "--id", "1", "--samples", "61", "--out", str(tmp_path), "--format", "svg"]) == EXIT_OK
        meta, rows = _read(tmp_path / "figure_1_fig-e1.csv")
        assert list(rows[0]) == ["zeta", "re_u", "im_u", "re_v", "im_v"]
        assert meta["sign"] == "minus"
        assert (tmp_path / "figure_1_fig-e1.svg").exists()
        assert meta["caption"].startswith("Figure 1 (fig-e1): ")
        assert "m = 2, lambda = 1/2" in meta["caption"]
        assert "Figure 1 (fig-e1)" in (tmp_path / "figure_1_fig-e1.svg").read_text()

    @pytest.mark.parametrize("figure_id", sorted(FIGURES))
    def test_titles_name_number_and_parameters(self, figure_id):
        preset = FIGURES[figure_id]
        assert preset.title.startswith(f"Figure {figure_id} ({preset.label}): {preset.caption}; ")
        if preset.kind == "gfunc":
            assert f"lambda^2 = {preset.lambda2:g}, c = c1 = 1" in preset.title
        else:
            assert f"m = {preset.m}," in preset.title
            assert "I_bc = " in preset.title

    def test_unknown_figure(self, tmp_path):
        assert main(["figure", "--id", "42", "--out", str(tmp_path)]) == EXIT_USAGE


class TestUsageErrors:
    """Exit code 2 for malformed requests"""

    def test_no_command(self):
        assert main([]) == EXIT_USAGE

    def test_unparsable_number(self):
        with pytest.raises(SystemExit) as info:
            main(["eval", "--samples", "many"])
        assert info.value.code == 2

    def test_missing_family(self):
        assert main(["eval"]) == EXIT_USAGE

    def test_branch_contradicts_lambda2(self):
        assert main(["eval", "--family", "chiellini", "--branch", "neg", "--lambda2", "0.25"]) == EXIT_USAGE

    @pytest.mark.parametrize("family,branch,lambda2", [("sep", "pos", "-1"), ("reid", "neg", "0.25"), ("reid", "zero", "1")])
    def test_branch_contradicts_lambda2_linear_families(self, family, branch, lambda2):
        assert main(["eval", "--family", family, "--branch", branch, "--lambda2", lambda2]) == EXIT_USAGE

    def test_empty_window(self):
        assert main(["gfunc", "--zeta-min", "2", "--zeta-max", "1"]) == EXIT_USAGE

    def test_bad_tolerance_environment(self, monkeypatch, tmp_path):
        monkeypatch.setattr(Config, "VALIDATION_TOLERANCE_RAW", "tiny")
        assert main(["validate", "--suite", "abel", "--out", str(tmp_path / "r.txt")]) == EXIT_USAGE

    def test_config_status(self):
        assert main(["--config-status"]) == EXIT_OK


class TestValidateCommand:
    """validate writes the report and sets the exit code"""

    def test_factorization_suite(self, tmp_path):
        report = tmp_path / "report.txt"
        assert main(["validate", "--suite", "factorization", "--out", str(report)]) == EXIT_OK
        lines = report.read_text().splitlines()
        assert len(lines) == 22
        assert all(line.startswith("factorization factor-") for line in lines)
        assert all(line.endswith("PASS") for line in lines)

    def test_all_suites(self, tmp_path):
        report = tmp_path / "report.txt"
        assert main(["validate", "--suite", "all", "--out", str(report)]) == EXIT_OK
        lines = report.read_text().splitlines()
        assert lines
        assert not [line for line in lines if line.endswith("FAIL")]
