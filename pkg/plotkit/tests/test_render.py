import os
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from plotkit import PlotInputError, PlotSpec, compute_series, render
from plotkit.cli import main as cli_main

HEADER = "axis_value,scheme,seed,min_sinr_linear,min_sinr_db,iterations,wall_ms"


def write_csv(path, rows):
    lines = [HEADER] + [",".join(str(v) for v in row) for row in rows]
    Path(path).write_text("\n".join(lines) + "\n")
    return str(path)


@pytest.fixture
def sweep_csv(tmp_path):
    rows = [
        (0, "fixed", 0, 2.0, 3.0103, 5, 1.0),
        (0, "fixed", 1, 4.0, 6.0206, 5, 1.0),
        (5, "fixed", 0, 8.0, 9.0309, 5, 1.0),
        (5, "fixed", 1, 16.0, 12.0412, 5, 1.0),
        (0, "ra", 0, 10.0, 10.0, 7, 1.0),
        (5, "ra", 0, 100.0, 20.0, 7, 1.0),
    ]
    return write_csv(tmp_path / "sweep.csv", rows)


class TestComputeSeries:
    def test_mean_over_seeds_linear(self, sweep_csv):
        series = compute_series(sweep_csv)
        xs, ys = series["fixed"]
        np.testing.assert_array_equal(xs, [0.0, 5.0])
        np.testing.assert_allclose(ys, [3.0, 12.0])   # linear means

    def test_db_conversion_after_mean(self, sweep_csv):
        series = compute_series(sweep_csv, db=True)
        _, ys = series["fixed"]
        np.testing.assert_allclose(ys, 10 * np.log10([3.0, 12.0]))

    def test_single_seed_equals_raw(self, sweep_csv):
        series = compute_series(sweep_csv)
        _, ys = series["ra"]
        np.testing.assert_allclose(ys, [10.0, 100.0])

    def test_byte_identical_across_reruns(self, sweep_csv):
        a = compute_series(sweep_csv, db=True)
        b = compute_series(sweep_csv, db=True)
        assert list(a) == list(b)
        for scheme in a:
            assert a[scheme][0].tobytes() == b[scheme][0].tobytes()
            assert a[scheme][1].tobytes() == b[scheme][1].tobytes()

    def test_missing_column_rejected(self, tmp_path):
        p = tmp_path / "bad.csv"
        p.write_text("axis_value,scheme\n1,fixed\n")
        with pytest.raises(PlotInputError, match="missing column"):
            compute_series(str(p))

    def test_header_only_rejected(self, tmp_path):
        p = tmp_path / "empty.csv"
        p.write_text(HEADER + "\n")
        with pytest.raises(PlotInputError, match="no data rows"):
            compute_series(str(p))


class TestRender:
    def test_writes_figure_with_one_line_per_scheme(self, sweep_csv, tmp_path):
        out = tmp_path / "fig.png"
        render(PlotSpec(csv_path=sweep_csv, kind="sweep", out_path=str(out), db=True))
        assert out.exists() and out.stat().st_size > 0

    def test_svg_output(self, sweep_csv, tmp_path):
        out = tmp_path / "fig.svg"
        render(PlotSpec(csv_path=sweep_csv, kind="sweep", out_path=str(out)))
        text = out.read_text()
        assert "<svg" in text

    def test_bad_kind_rejected(self, sweep_csv, tmp_path):
        with pytest.raises(PlotInputError):
            PlotSpec(csv_path=sweep_csv, kind="histogram", out_path=str(tmp_path / "x.png"))


class TestCli:
    def test_render_exit_codes(self, sweep_csv, tmp_path, capsys):
        out = tmp_path / "cli.png"
        assert cli_main(["render", "--csv", sweep_csv, "--kind", "sweep",
                         "--out", str(out), "--db"]) == 0
        assert out.exists()
        assert cli_main(["render", "--csv", str(tmp_path / "nope.csv"),
                         "--kind", "sweep", "--out", str(out)]) == 2
        bad = tmp_path / "bad.csv"
        bad.write_text(HEADER + "\n")
        assert cli_main(["render", "--csv", str(bad), "--kind", "sweep",
                         "--out", str(out)]) == 2


needs_ramcast = pytest.importorskip("ramcast", reason="primary package not installed")


def _run_harness(args):
    proc = subprocess.run([sys.executable, "-m", "ramcast.cli", *args],
                          capture_output=True, text=True,
                          env={**os.environ, "RA_OPT_THREADS": "2"})
    assert proc.returncode == 0, proc.stderr
    return proc


@pytest.fixture(scope="module")
def harness_csvs(tmp_path_factory):
    import json
    base = tmp_path_factory.mktemp("harness")
    cfg = {
        "num_antennas": 2, "num_groups": 2, "group_sizes": [1, 1],
        "arc_radius_m": 30.0, "sca_inner_iterations": 40,
        "sca_inner_threshold": 1e-4, "random_orientation_draws": 4,
    }
    cfg_path = base / "tiny.json"
    cfg_path.write_text(json.dumps(cfg))
    power = base / "fig_power.csv"
    angle = base / "fig_angle.csv"
    antennas = base / "fig_antennas.csv"
    _run_harness(["sweep-power", "--config", str(cfg_path), "--grid", "10,15",
                  "--seeds", "1", "--out", str(power)])
    _run_harness(["sweep-angle", "--config", str(cfg_path), "--grid",
                  "1.0472,2.0944", "--seeds", "1", "--out", str(angle)])
    _run_harness(["sweep-antennas", "--config", str(cfg_path), "--grid", "2,3",
                  "--seeds", "1", "--out", str(antennas)])
    return power, angle, antennas


class TestAgainstHarness:
    """Secondary acceptance: render figure analogues from real harness CSVs."""

    def test_renders_all_three_sweep_figures(self, harness_csvs, tmp_path):
        for idx, csv_path in enumerate(harness_csvs):
            out = tmp_path / f"fig{idx}.png"
            spec = PlotSpec(csv_path=str(csv_path), kind="sweep",
                            out_path=str(out), db=True)
            render(spec)
            assert out.exists() and out.stat().st_size > 0
            series = compute_series(str(csv_path), db=True)
            assert len(series) >= 2   # one line per scheme
            again = compute_series(str(csv_path), db=True)
            for scheme in series:
                assert series[scheme][1].tobytes() == again[scheme][1].tobytes()

    def test_convergence_figure_from_solve_history(self, tmp_path):
        import json
        cfg = {"num_antennas": 2, "num_groups": 2, "group_sizes": [1, 1],
               "arc_radius_m": 30.0, "sca_inner_iterations": 40,
               "sca_inner_threshold": 1e-4}
        cfg_path = tmp_path / "tiny.json"
        cfg_path.write_text(json.dumps(cfg))
        hist = tmp_path / "hist.csv"
        _run_harness(["solve", "--config", str(cfg_path), "--seed", "1",
                      "--out", str(hist)])
        out = tmp_path / "conv.png"
        render(PlotSpec(csv_path=str(hist), kind="convergence",
                        out_path=str(out), db=True))
        assert out.exists()
