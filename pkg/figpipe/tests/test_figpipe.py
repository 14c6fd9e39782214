import math
from pathlib import Path

import pytest

from figpipe.plots import _sweep_panels, plot_beta_sweep, plot_regret_over_time, plot_v_sweep
from figpipe.schema import SchemaError, load_curves, load_sweep, regret_column

DATA = Path(__file__).parent / "data"


class TestLoading:
    def test_sweep_loads(self):
        table = load_sweep(DATA / "sweep_v.csv", "V")
        assert len(table.rows) == 9
        assert {r["policy"] for r in table.rows} == {"lasac", "gs", "jsq"}

    def test_missing_column_rejected(self):
        with pytest.raises(SchemaError, match="missing columns"):
            load_sweep(DATA / "missing_column.csv", "V")

    def test_header_only_rejected(self):
        with pytest.raises(SchemaError, match="no data rows"):
            load_sweep(DATA / "header_only.csv", "V")

    def test_wrong_axis_rejected(self):
        with pytest.raises(SchemaError, match="axis_name"):
            load_sweep(DATA / "sweep_v.csv", "beta")

    def test_nonmonotone_time_rejected(self):
        with pytest.raises(SchemaError, match="non-monotone"):
            load_curves(DATA / "nonmonotone_curves.csv")

    def test_regret_column_fallback(self):
        rows = [{"regret_eq9": math.nan, "regret_vs_gs": 0.5}]
        assert regret_column(rows) == "regret_vs_gs"
        rows = [{"regret_eq9": 1.0, "regret_vs_gs": 0.5}]
        assert regret_column(rows) == "regret_eq9"


class TestSweepFigures:
    def test_one_line_per_policy_per_panel(self, tmp_path):
        table = load_sweep(DATA / "sweep_v.csv", "V")
        fig = _sweep_panels(table, "V", "log")
        for ax in fig.axes:
            assert len(ax.lines) == 3
        legend_texts = [t.get_text() for t in fig.axes[0].get_legend().get_texts()]
        assert legend_texts == ["gs", "jsq", "lasac"]

    def test_single_policy_csv(self, tmp_path):
        one = tmp_path / "one.csv"
        lines = (DATA / "sweep_v.csv").read_text().strip().splitlines()
        one.write_text("\n".join([lines[0]] + [l for l in lines[1:] if ",lasac," in l]) + "\n")
        table = load_sweep(one, "V")
        fig = _sweep_panels(table, "V", "log")
        for ax in fig.axes:
            assert len(ax.lines) == 1

    def test_v_sweep_renders(self, tmp_path):
        out = plot_v_sweep(DATA / "sweep_v.csv", tmp_path / "v.svg")
        assert out.exists() and out.stat().st_size > 1000

    def test_beta_sweep_renders_including_zero(self, tmp_path):
        out = plot_beta_sweep(DATA / "sweep_beta.csv", tmp_path / "b.svg")
        assert out.exists() and out.stat().st_size > 1000

    def test_empty_rows_error_not_empty_image(self, tmp_path):
        with pytest.raises(SchemaError):
            plot_v_sweep(DATA / "header_only.csv", tmp_path / "x.svg")
        assert not (tmp_path / "x.svg").exists()

    def test_png_format(self, tmp_path):
        out = plot_v_sweep(DATA / "sweep_v.csv", tmp_path / "v.png", fmt="png")
        assert out.exists() and out.stat().st_size > 1000


class TestRegretOverTime:
    def test_grid_layout(self, tmp_path):
        out = plot_regret_over_time(DATA / "curves.csv", tmp_path / "rt.svg")
        assert out.exists() and out.stat().st_size > 1000

    def test_single_cell(self, tmp_path):
        one = tmp_path / "one.csv"
        lines = (DATA / "curves.csv").read_text().strip().splitlines()
        keep = [l for l in lines[1:] if l.startswith("paper_like,lasac,1.0,2.0")]
        one.write_text("\n".join([lines[0]] + keep) + "\n")
        out = plot_regret_over_time(one, tmp_path / "rt1.svg")
        assert out.exists()


class TestCli:
    def test_cli_renders_and_fails_fast(self, tmp_path, capsys):
        from figpipe.cli import main

        assert main(["v-sweep", str(DATA / "sweep_v.csv"), "-o", str(tmp_path)]) == 0
        assert (tmp_path / "v_sweep.svg").exists()
        assert main(["v-sweep", str(DATA / "missing_column.csv"), "-o", str(tmp_path)]) == 2
        err = capsys.readouterr().err
        assert "schema" in err

    def test_cli_missing_file(self, tmp_path, capsys):
        from figpipe.cli import main

        assert main(["v-sweep", str(tmp_path / "nope.csv"), "-o", str(tmp_path)]) == 2
