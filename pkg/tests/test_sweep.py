"""Scan determinism, CSV/JSON emission, cross-checks, time series, CLI."""

import json
import math
import os
import time

import numpy as np
import pytest

from quenchmetric import cli, sweep
from quenchmetric.config import load_config
from quenchmetric.params import ModelParams

SMALL_ANALYTIC = """
engine = analytic
N = 32
workers = 1
[window]
lambda_x = -1:1:9
lambda_y = -1:1:9
h = 0
[quench]
dh = 0.2
[times]
values = 0, 0.8
"""

GOLDEN_ED = """
engine = ed
N = 8
workers = 1
[window]
lambda_x = 0.2:0.8:3
lambda_y = 0.1:0.5:3
h = 0
[quench]
dh = 0.2
[times]
values = 0, 1
"""


def test_zero_offset_scan_is_time_independent():
    cfg = load_config(SMALL_ANALYTIC.replace("dh = 0.2", "dh = 0"))
    rows = sweep.run_phase_scan(cfg)
    by_time = {}
    for row in rows:
        by_time.setdefault(row.t, []).append(row)
    base = [(r.lambda_x, r.lambda_y, r.g_xx, r.g_xy, r.g_yy, r.norm) for r in by_time[0.0]]
    later = [(r.lambda_x, r.lambda_y, r.g_xx, r.g_xy, r.g_yy, r.norm) for r in by_time[0.8]]
    assert base == later


def test_scan_deterministic_across_worker_counts(tmp_path):
    cfg = load_config(SMALL_ANALYTIC)
    outputs = []
    for workers in (1, 2):
        rows = sweep.run_phase_scan(cfg.with_overrides(workers=workers))
        path = tmp_path / f"scan_w{workers}.csv"
        sweep.emit_csv(rows, path, sweep.scan_metadata(cfg))
        outputs.append(path.read_bytes())
    assert outputs[0] == outputs[1]


def test_golden_ed_scan_bytes(tmp_path):
    cfg = load_config(GOLDEN_ED)
    rows = sweep.run_phase_scan(cfg)
    path = tmp_path / "golden.csv"
    sweep.emit_csv(rows, path, sweep.scan_metadata(cfg))
    golden = os.path.join(os.path.dirname(__file__), "data", "golden_scan.csv")
    assert path.read_bytes() == open(golden, "rb").read()


def test_emit_csv_header_only_for_empty_stream(tmp_path):
    cfg = load_config(SMALL_ANALYTIC)
    path = tmp_path / "empty.csv"
    sweep.emit_csv([], path, sweep.scan_metadata(cfg))
    lines = path.read_text().splitlines()
    assert lines[0] == "#engine=analytic"
    assert lines[1] == "#norm=frobenius"
    assert lines[2] == "#N=32"
    assert lines[3].startswith("#quench=")
    assert lines[4] == ",".join(sweep.SCAN_FIELDS)
    assert len(lines) == 5


def test_csv_floats_reparse_bit_identical(tmp_path):
    cfg = load_config(SMALL_ANALYTIC)
    rows = sweep.run_phase_scan(cfg)
    path = tmp_path / "scan.csv"
    sweep.emit_csv(rows, path, sweep.scan_metadata(cfg))
    lines = [l for l in path.read_text().splitlines() if not l.startswith("#")]
    header = lines[0].split(",")
    for line, row in zip(lines[1:], rows):
        parsed = dict(zip(header, line.split(",")))
        for field in ("lambda_x", "g_xx", "g_xy", "norm", "log10_norm", "gap_min"):
            assert float(parsed[field]) == getattr(row, field)


def test_json_mirror_matches_rows(tmp_path):
    cfg = load_config(SMALL_ANALYTIC)
    rows = sweep.run_phase_scan(cfg)
    path = tmp_path / "scan.json"
    sweep.emit_json(rows, path, sweep.scan_metadata(cfg))
    payload = json.loads(path.read_text())
    assert payload["engine"] == "analytic"
    assert len(payload["rows"]) == len(rows)
    first = payload["rows"][0]
    assert list(first) == list(sweep.SCAN_FIELDS)
    assert first["g_xx"] == rows[0].g_xx


def test_failed_points_become_flagged_rows():
    # (100, 0, 0) has a symmetry-broken doublet: the dense ground state is
    # degenerate beyond the oracle tolerance, so the ED engine flags the rows
    cfg = load_config(
        GOLDEN_ED.replace("lambda_x = 0.2:0.8:3", "lambda_x = 100:101:2").replace(
            "lambda_y = 0.1:0.5:3", "lambda_y = 0:0.0001:2"
        )
    )
    rows = sweep.run_phase_scan(cfg)
    assert len(rows) == 8
    assert all(row.near_critical for row in rows)
    assert all(math.isnan(row.g_xx) for row in rows)


def test_crosscheck_engines_agree_on_even_sector():
    cfg = load_config(GOLDEN_ED.replace("values = 0, 1", "values = 0, 0.7"))
    result = sweep.run_crosscheck(cfg)
    assert result.compared > 0
    assert result.max_rel_dev < 1e-6


def test_crosscheck_rejects_large_chains():
    cfg = load_config(GOLDEN_ED.replace("N = 8", "N = 12"))
    with pytest.raises(ValueError):
        sweep.run_crosscheck(cfg)


def test_timeseries_trivial_quench_static():
    cfg = load_config(GOLDEN_ED.replace("dh = 0.2", "dh = 0"))
    cfg = cfg.with_overrides(times=(0.0, 0.9, 2.4))
    rows = sweep.run_time_series(cfg, ModelParams(0.5, 0.3, 0.0, 8))
    assert rows[0].q1 == pytest.approx(0.0, abs=1e-15)
    for row in rows:
        assert row.asymptote == pytest.approx(0.0, abs=1e-10)
        assert row.q == pytest.approx(rows[0].q, rel=1e-10)  # metric frozen
        assert abs(row.X) <= row.X_bound + 1e-12


def test_timeseries_triangle_corridor_and_otoc():
    cfg = load_config(GOLDEN_ED)
    cfg = cfg.with_overrides(times=(0.0, 0.5, 1.0, 2.0, 3.5))
    rows = sweep.run_time_series(cfg, ModelParams(0.5, 0.3, 0.0, 8))
    for row in rows:
        assert row.triangle_lo - 1e-9 <= row.q <= row.triangle_hi + 1e-9
        assert row.q1 <= row.otoc_rhs + 1e-9


def test_timeseries_symmetry_broken_fluctuation_bound():
    cfg = load_config(GOLDEN_ED)
    cfg = cfg.with_overrides(times=tuple(np.linspace(0.0, 20.0, 21)))
    rows = sweep.run_time_series(cfg, ModelParams(0.5, 0.3, 0.0, 8), symmetry_broken=True)
    for row in rows:
        assert abs(row.X) <= row.X_bound + 1e-12


def test_timeseries_analytic_proxy():
    cfg = load_config(SMALL_ANALYTIC)
    rows = sweep.run_time_series(cfg, ModelParams(0.5, 0.3, 0.0, 32))
    assert rows[0].q1 == pytest.approx(0.0, abs=1e-12)
    assert all(math.isfinite(row.q1) for row in rows)
    assert all(math.isnan(row.q) and math.isnan(row.otoc_rhs) for row in rows)


def test_delta_scan_bounded_and_ridges_on_initial_critical_lines():
    # time-dependent part alone, tiny field quench: maxima sit on the
    # equilibrium critical structure and stay bounded as N doubles
    def run(n, tensor, times):
        cfg = load_config(
            f"engine = analytic\nN = {n}\nworkers = 1\n[window]\n"
            "lambda_x = -2:2:81\nlambda_y = -2:2:81\nh = 0\n"
            f"[quench]\ndh = 0.001\n[times]\nvalues = {times}\n"
            f"[output]\ntensor = {tensor}\n"
        )
        return sweep.run_phase_scan(cfg)

    delta250 = run(250, "delta", "1")
    delta500 = run(500, "delta", "1")
    full500 = run(500, "full", "0")
    max250 = max(r.log10_norm for r in delta250 if math.isfinite(r.log10_norm))
    max500 = max(r.log10_norm for r in delta500 if math.isfinite(r.log10_norm))
    assert max500 <= max250 + 0.5  # no divergence with chain length

    xs = sorted({r.lambda_x for r in delta500})
    ys = sorted({r.lambda_y for r in delta500})

    def grid(rows):
        g = np.full((len(xs), len(ys)), -np.inf)
        for r in rows:
            g[xs.index(r.lambda_x), ys.index(r.lambda_y)] = r.log10_norm
        return g

    g_delta, g_full = grid(delta500), grid(full500)
    hits = 0
    for i in range(len(xs)):
        profile = g_full[i]
        ridge = [
            j
            for j in range(len(ys))
            if (j == 0 or profile[j] >= profile[j - 1])
            and (j == len(ys) - 1 or profile[j] >= profile[j + 1])
            and profile[j] >= profile.max() - 1.5
        ]
        if min(abs(int(np.argmax(g_delta[i])) - j) for j in ridge) <= 2:
            hits += 1
    assert hits / len(xs) >= 0.9


def test_delta_scan_zero_at_t0():
    cfg = load_config(
        "engine = analytic\nN = 64\n[window]\nlambda_x = -1:1:5\nlambda_y = -1:1:5\n"
        "[quench]\ndh = 0.001\n[times]\nvalues = 0\n[output]\ntensor = delta\n"
    )
    rows = sweep.run_phase_scan(cfg)
    assert all(row.norm == 0.0 for row in rows)
    assert all(row.log10_norm == -math.inf for row in rows)


def test_scan_cost_scales_linearly_with_grid():
    def timed(count):
        cfg = load_config(
            f"engine = analytic\nN = 100\nworkers = 1\n[window]\n"
            f"lambda_x = -1:1:{count}\nlambda_y = -1:1:28\n[quench]\ndh = 0.2\n"
            "[times]\nvalues = 0, 1\n"
        )
        best = math.inf
        for _ in range(3):
            start = time.perf_counter()
            sweep.run_phase_scan(cfg)
            best = min(best, time.perf_counter() - start)
        return best

    single = timed(28)
    double = timed(56)
    assert double <= 2.4 * single


def test_cli_scan_and_crosscheck(tmp_path, capsys):
    cfg_path = tmp_path / "scan.cfg"
    out_path = tmp_path / "out.csv"
    cfg_path.write_text(SMALL_ANALYTIC + f"[output]\npath = {out_path}\njson = true\n")
    assert cli.main(["scan", "--config", str(cfg_path)]) == 0
    assert out_path.exists()
    assert (tmp_path / "out.csv.json").exists()
    text = out_path.read_text()
    assert text.startswith("#engine=analytic\n")

    cfg2 = tmp_path / "cross.cfg"
    cfg2.write_text(GOLDEN_ED)
    assert cli.main(["crosscheck", "--config", str(cfg2)]) == 0
    assert "max relative deviation" in capsys.readouterr().out


def test_cli_timeseries(tmp_path):
    cfg_path = tmp_path / "series.cfg"
    out_path = tmp_path / "series.csv"
    cfg_path.write_text(
        GOLDEN_ED + f"[output]\npath = {out_path}\n[point]\nlambda_x = 0.5\nlambda_y = 0.3\n"
    )
    assert cli.main(["timeseries", "--config", str(cfg_path)]) == 0
    lines = out_path.read_text().splitlines()
    assert ",".join(sweep.TIMESERIES_FIELDS) in lines


def test_cli_reports_config_errors(tmp_path, capsys):
    bad = tmp_path / "bad.cfg"
    bad.write_text(SMALL_ANALYTIC.replace("N = 32", "N = 31"))
    assert cli.main(["scan", "--config", str(bad)]) == 2
    assert "N must be even" in capsys.readouterr().err


def test_cli_flag_overrides(tmp_path):
    cfg_path = tmp_path / "scan.cfg"
    out_path = tmp_path / "override.csv"
    cfg_path.write_text(SMALL_ANALYTIC)
    assert cli.main(["scan", "--config", str(cfg_path), "--out", str(out_path), "--norm", "trace"]) == 0
    assert "#norm=trace" in out_path.read_text()
