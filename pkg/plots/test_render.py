"""Tests for the figure renderer.  Input CSVs come from running the solver
CLI on the shipped configs, so these tests exercise exactly the file
interface the renderer consumes in production."""

import os
import shutil
import subprocess
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(__file__))

from render import FigureSpec, SchemaError, main as render_main, read_snapshot, render

REPO = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
CONFIGS = os.path.join(REPO, "configs")


def run_cli(config, out_dir):
    cmd = [sys.executable, "-m", "relaxrd.cli", "run",
           "--config", os.path.join(CONFIGS, config), "--out", out_dir]
    subprocess.run(cmd, check=True, cwd=REPO)


@pytest.fixture(scope="session")
def fig1_data(tmp_path_factory):
    out = str(tmp_path_factory.mktemp("fig1"))
    run_cli("fig1_wave_alpha2.cfg", out)
    return out


@pytest.fixture(scope="session")
def fig2_data(tmp_path_factory):
    out = str(tmp_path_factory.mktemp("fig2"))
    run_cli("fig2_extinction.cfg", out)
    return out


@pytest.fixture(scope="session")
def fig3_data(tmp_path_factory):
    out = str(tmp_path_factory.mktemp("fig3"))
    run_cli("fig3_frogs.cfg", out)
    return out


def snaps_in(d, prefix="snap"):
    return sorted(os.path.join(d, f) for f in os.listdir(d)
                  if f.startswith(prefix) and f.endswith(".csv"))


def test_wave_overlay_from_shipped_config(fig1_data, tmp_path):
    out = str(tmp_path / "fig1.png")
    spec = FigureSpec("wave_overlay", tuple(snaps_in(fig1_data)), out,
                      tuple(snaps_in(fig1_data, "exact")))
    result = render(spec)
    assert os.path.exists(out) and os.path.getsize(out) > 0
    # markers sit on the exact curve: away from the single front-bracketing
    # cell (unbounded exact slope) the deviation stays below the travelling
    # wave acceptance error
    assert result.metrics["off_front_deviation"] < 1.3e-2
    assert result.metrics["max_marker_deviation"] < 5e-2


def test_wave_overlay_deviation_against_independent_recount(fig1_data, tmp_path):
    spec = FigureSpec("wave_overlay", tuple(snaps_in(fig1_data)),
                      str(tmp_path / "f.png"), tuple(snaps_in(fig1_data, "exact")))
    result = render(spec)
    worst = 0.0
    for sp, ep in zip(snaps_in(fig1_data), snaps_in(fig1_data, "exact")):
        s, e = read_snapshot(sp), read_snapshot(ep)
        worst = max(worst, float(np.max(np.abs(s.columns[1] - e.columns[1]))))
    assert result.metrics["max_marker_deviation"] == pytest.approx(worst, rel=1e-12)


def test_support_map_from_shipped_config(fig2_data, tmp_path):
    out = str(tmp_path / "fig2.png")
    result = render(FigureSpec("support_map", tuple(snaps_in(fig2_data)), out))
    assert os.path.exists(out)
    cells = result.metrics["support_cells"]
    assert cells[0] > 0
    assert cells[-1] == 0              # extinct by the final snapshot
    # the support first spreads under the degenerate diffusion, then the
    # absorption wins: the tail of the sequence collapses monotonically
    peak = cells.index(max(cells))
    assert all(b <= a for a, b in zip(cells[peak:], cells[peak + 1:]))


def test_frog_panels_from_shipped_config(fig3_data, tmp_path):
    out = str(tmp_path / "fig3.png")
    result = render(FigureSpec("frog_panels", tuple(snaps_in(fig3_data)), out))
    assert os.path.exists(out)
    assert result.metrics["panels"] == 6


def test_rate_table_renders(tmp_path):
    report = tmp_path / "report.csv"
    report.write_text(
        "m,error_l1,error_l2,rate_l1,rate_l2,wall_time\n"
        "12,0.001,0.002,,,0.10\n"
        "36,0.0001,0.0002,2.1,2.1,0.20\n")
    out = str(tmp_path / "table.png")
    result = render(FigureSpec("rate_table", (str(report),), out))
    assert os.path.exists(out) and result.metrics["rows"] == 2


def test_render_is_deterministic(fig2_data, tmp_path):
    a, b = str(tmp_path / "a.png"), str(tmp_path / "b.png")
    render(FigureSpec("support_map", tuple(snaps_in(fig2_data)), a))
    render(FigureSpec("support_map", tuple(snaps_in(fig2_data)), b))
    assert open(a, "rb").read() == open(b, "rb").read()


def test_render_does_not_mutate_inputs(fig2_data, tmp_path):
    src = snaps_in(fig2_data)[0]
    before = open(src, "rb").read()
    render(FigureSpec("support_map", (src,), str(tmp_path / "x.png")))
    assert open(src, "rb").read() == before


def test_empty_input_list_is_rejected_without_output(tmp_path):
    out = str(tmp_path / "never.png")
    with pytest.raises(SchemaError):
        FigureSpec("wave_overlay", (), out)
    assert not os.path.exists(out)


def test_schema_errors_name_file_and_line(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("# t=0.5\nx,u\n1.0,2.0,3.0\n")
    with pytest.raises(SchemaError, match=r"bad\.csv:3"):
        read_snapshot(str(bad))
    noheader = tmp_path / "noheader.csv"
    noheader.write_text("x,u\n1.0,2.0\n")
    with pytest.raises(SchemaError, match=r"noheader\.csv:1"):
        read_snapshot(str(noheader))


def test_support_map_rejects_1d_snapshots(fig1_data, tmp_path):
    with pytest.raises(SchemaError, match="2D"):
        render(FigureSpec("support_map", (snaps_in(fig1_data)[0],),
                          str(tmp_path / "x.png")))


def test_cli_entry_point(fig2_data, tmp_path):
    out = str(tmp_path / "cli.png")
    code = render_main(["--kind", "support_map", "--in", *snaps_in(fig2_data),
                        "--out", out])
    assert code == 0 and os.path.exists(out)
    assert render_main(["--kind", "support_map", "--in",
                        str(tmp_path / "missing.csv"), "--out", out]) == 1


def test_single_snapshot_one_curve_plot(fig1_data, tmp_path):
    out = str(tmp_path / "one.png")
    result = render(FigureSpec("wave_overlay", (snaps_in(fig1_data)[0],), out))
    assert os.path.exists(out)
    assert result.metrics["max_marker_deviation"] is None
