"""Phase-diagram scans, time-series runs and engine cross-checks.

Grid points are independent work items executed either inline or by a
process pool; rows are sorted by (t, lambda_x, lambda_y) before emission so
the output is byte-identical for any worker count.  Failures at single grid
points become flagged rows with NaN components instead of aborting a scan.

CSV layout: four metadata comment lines (#engine, #norm, #N, #quench), then
the header, then one row per (grid point, time) with floats printed to 17
significant digits (round-trippable).  ``log10_norm`` is clipped at +12 and
is ``-inf`` for an exactly zero norm.  The optional JSON mirror carries the
same fields, one object per row, with non-finite numbers as null.
"""

from __future__ import annotations

import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import analysis, ed, engine
from .config import SweepConfig
from .params import ModelParams, QuenchSpec

SCAN_FIELDS = (
    "lambda_x",
    "lambda_y",
    "h",
    "t",
    "g_xx",
    "g_xy",
    "g_yy",
    "g_xh",
    "g_yh",
    "g_hh",
    "norm",
    "log10_norm",
    "near_critical",
    "gap_min",
    "gap_min_quench",
)

TIMESERIES_FIELDS = (
    "t",
    "q1",
    "q",
    "asymptote",
    "X",
    "X_bound",
    "triangle_lo",
    "triangle_hi",
    "otoc_rhs",
)

LOG10_CLIP = 12.0


@dataclass(frozen=True)
class ScanRow:
    lambda_x: float
    lambda_y: float
    h: float
    t: float
    g_xx: float
    g_xy: float
    g_yy: float
    g_xh: float
    g_yh: float
    g_hh: float
    norm: float
    log10_norm: float
    near_critical: bool
    gap_min: float
    gap_min_quench: float

    def astuple(self) -> tuple:
        return tuple(getattr(self, name) for name in SCAN_FIELDS)


def _log10_clipped(norm: float) -> float:
    if math.isnan(norm):
        return math.nan
    if norm <= 0.0:
        return -math.inf
    return min(math.log10(norm), LOG10_CLIP)


def _tensor_norm(comp: np.ndarray, kind: str) -> float:
    block = comp[:2, :2]
    if kind == "frobenius":
        return float(np.linalg.norm(block))
    if kind == "max-eig":
        return float(np.max(np.abs(np.linalg.eigvalsh(block))))
    if kind == "trace":
        return float(np.trace(block))
    raise ValueError(f"unknown norm kind {kind!r}")


def _rows_for_point(cfg: SweepConfig, lx: float, ly: float) -> list[ScanRow]:
    """All time rows of one grid point; exceptions become flagged NaN rows."""
    try:
        if cfg.engine == "analytic":
            return _rows_analytic(cfg, lx, ly)
        return _rows_ed(cfg, lx, ly)
    except Exception:
        nan = math.nan
        return [
            ScanRow(lx, ly, cfg.h, t, nan, nan, nan, nan, nan, nan, nan, nan, True, nan, nan)
            for t in cfg.times
        ]


def _rows_analytic(cfg: SweepConfig, lx: float, ly: float) -> list[ScanRow]:
    point = ModelParams(lx, ly, cfg.h, cfg.n_sites)
    quench = QuenchSpec(point, cfg.quench)
    base, quenched = engine.quench_tables(quench)
    gap_min = float(np.min(base.gap))
    gap_min_q = float(np.min(quenched.gap))
    flagged = base.near_critical or quenched.near_critical
    g0 = engine.t0_components(base)
    rows = []
    for t in cfg.times:
        comp = engine.delta_components(base, quenched, t)
        if cfg.tensor == "full":
            comp = comp + g0
        comp = comp / cfg.n_sites
        rows.append(_make_row(cfg, lx, ly, t, comp, flagged, gap_min, gap_min_q))
    return rows


def _rows_ed(cfg: SweepConfig, lx: float, ly: float) -> list[ScanRow]:
    point = ModelParams(lx, ly, cfg.h, cfg.n_sites)
    quench = QuenchSpec(point, cfg.quench)
    gap_min = ed.decomposition(point).gap
    gap_min_q = ed.decomposition(quench.quenched).gap
    g0 = ed.qgt_spectral(point).components
    rows = []
    for t in cfg.times:
        comp = ed.qgt_tensor_evolved(quench, t).components
        if cfg.tensor == "delta":
            comp = comp - g0
        comp = comp / cfg.n_sites
        rows.append(_make_row(cfg, lx, ly, t, comp, False, gap_min, gap_min_q))
    return rows


def _make_row(cfg, lx, ly, t, comp, flagged, gap_min, gap_min_q) -> ScanRow:
    norm = _tensor_norm(comp, cfg.norm)
    return ScanRow(
        lambda_x=lx,
        lambda_y=ly,
        h=cfg.h,
        t=float(t),
        g_xx=float(comp[0, 0]),
        g_xy=float(comp[0, 1]),
        g_yy=float(comp[1, 1]),
        g_xh=float(comp[0, 2]),
        g_yh=float(comp[1, 2]),
        g_hh=float(comp[2, 2]),
        norm=norm,
        log10_norm=_log10_clipped(norm),
        near_critical=bool(flagged),
        gap_min=float(gap_min),
        gap_min_quench=float(gap_min_q),
    )


_WORKER_CFG: SweepConfig | None = None


def _init_worker(cfg: SweepConfig) -> None:
    global _WORKER_CFG
    _WORKER_CFG = cfg


def _worker_point(args: tuple[float, float]) -> list[ScanRow]:
    return _rows_for_point(_WORKER_CFG, *args)


def resolve_workers(requested: int) -> int:
    if requested > 0:
        return requested
    return min(os.cpu_count() or 1, 8)


def run_phase_scan(cfg: SweepConfig) -> list[ScanRow]:
    """One row per (grid point, time); deterministic for any worker count."""
    points = [(lx, ly) for lx in cfg.lambda_x.values() for ly in cfg.lambda_y.values()]
    workers = resolve_workers(cfg.workers)
    if workers == 1 or len(points) < 4 * workers:
        chunks = [_rows_for_point(cfg, *pt) for pt in points]
    else:
        chunksize = max(1, len(points) // (workers * 8))
        with ProcessPoolExecutor(workers, initializer=_init_worker, initargs=(cfg,)) as pool:
            chunks = list(pool.map(_worker_point, points, chunksize=chunksize))
    rows = [row for chunk in chunks for row in chunk]
    rows.sort(key=lambda r: (r.t, r.lambda_x, r.lambda_y))
    return rows


@dataclass(frozen=True)
class TimeseriesRow:
    t: float
    q1: float
    q: float
    asymptote: float
    X: float
    X_bound: float
    triangle_lo: float
    triangle_hi: float
    otoc_rhs: float

    def astuple(self) -> tuple:
        return tuple(getattr(self, name) for name in TIMESERIES_FIELDS)


def run_time_series(
    cfg: SweepConfig,
    point: ModelParams | None = None,
    *,
    symmetry_broken: bool = False,
) -> list[TimeseriesRow]:
    """Equilibration trace at one base point.

    With the ED engine every column is populated (q1, the evolved component
    q, the long-time asymptote and fluctuation with its purity bound, the
    triangle corridor and the operator-spreading cap).  The analytic engine
    emits only a q1 proxy, N * dg_{mu mu}(t), with NaN elsewhere.
    ``symmetry_broken`` adds the seeded diagonal field so the fluctuation
    bound is checked where the non-resonance hypothesis actually holds.
    """
    if point is None:
        if cfg.point is not None:
            lx, ly = cfg.point
        else:
            lx = 0.5 * (cfg.lambda_x.lo + cfg.lambda_x.hi)
            ly = 0.5 * (cfg.lambda_y.lo + cfg.lambda_y.hi)
        point = ModelParams(lx, ly, cfg.h, cfg.n_sites)
    quench = QuenchSpec(point, cfg.quench)
    times = np.asarray(cfg.times, dtype=float)

    if cfg.engine == "analytic":
        mu = ("lambda_x", "lambda_y", "h").index(cfg.direction)
        base, quenched = engine.quench_tables(quench)
        rows = []
        nan = math.nan
        for t in times:
            proxy = float(engine.delta_components(base, quenched, t)[mu, mu])
            rows.append(TimeseriesRow(float(t), proxy, nan, nan, nan, nan, nan, nan, nan))
        return rows

    disorder = analysis.symmetry_breaking_diagonal(cfg.n_sites) if symmetry_broken else None
    report = analysis.equilibration_report(quench, cfg.direction, times, disorder=disorder)
    rows = []
    for i, t in enumerate(times):
        q_val = ed.q_general(quench, cfg.direction, float(t), disorder)
        lo, hi = analysis.triangle_bounds(report.q0, report.q1[i])
        otoc = analysis.otoc_bound_check(quench, cfg.direction, float(t), disorder)
        rows.append(
            TimeseriesRow(
                t=float(t),
                q1=float(report.q1[i]),
                q=q_val,
                asymptote=float(report.asymptote[i]),
                X=float(report.fluctuation[i]),
                X_bound=float(report.fluctuation_bound[i]),
                triangle_lo=lo,
                triangle_hi=hi,
                otoc_rhs=otoc.rhs,
            )
        )
    return rows


@dataclass(frozen=True)
class CrosscheckResult:
    max_rel_dev: float
    compared: int
    skipped: int


def run_crosscheck(cfg: SweepConfig, *, min_gap: float = 1e-6) -> CrosscheckResult:
    """Run both engines on the grid; max Frobenius-relative metric deviation.

    Points are compared only when the dense ground state sits in the even
    fermion-parity sector (where the momentum-space solution applies) and
    both spectral gaps clear ``min_gap``; everything else counts as skipped.
    """
    if cfg.n_sites > 10:
        raise ValueError("crosscheck supports N <= 10")
    worst = 0.0
    compared = skipped = 0
    for lx in cfg.lambda_x.values():
        for ly in cfg.lambda_y.values():
            point = ModelParams(lx, ly, cfg.h, cfg.n_sites)
            quench = QuenchSpec(point, cfg.quench)
            try:
                dec0 = ed.decomposition(point)
                dec_q = ed.decomposition(quench.quenched)
            except Exception:
                skipped += 1
                continue
            if dec0.gap < min_gap or dec_q.gap < min_gap or ed.ground_parity(point) < 0.99:
                skipped += 1
                continue
            base, quenched = engine.quench_tables(quench)
            g0 = engine.t0_components(base)
            for t in cfg.times:
                g_eng = (g0 + engine.delta_components(base, quenched, t)) / cfg.n_sites
                g_ed = ed.qgt_tensor_evolved(quench, t).components / cfg.n_sites
                scale = max(np.linalg.norm(g_eng), np.linalg.norm(g_ed), 1e-300)
                worst = max(worst, float(np.linalg.norm(g_eng - g_ed) / scale))
                compared += 1
    return CrosscheckResult(worst, compared, skipped)


def _format_value(value) -> str:
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, float):
        return f"{value:.17g}"
    return str(value)


def scan_metadata(cfg: SweepConfig) -> dict[str, str]:
    quench = ",".join(f"{q:.17g}" for q in cfg.quench)
    return {
        "engine": cfg.engine,
        "norm": cfg.norm,
        "N": str(cfg.n_sites),
        "quench": quench,
    }


def emit_csv(rows, path, meta: dict[str, str], fields=SCAN_FIELDS) -> None:
    """Write rows with metadata comments; UTF-8, LF, 17-significant-digit floats."""
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            for key, value in meta.items():
                fh.write(f"#{key}={value}\n")
            fh.write(",".join(fields) + "\n")
            for row in rows:
                fh.write(",".join(_format_value(v) for v in row.astuple()) + "\n")
    except OSError as exc:
        raise OSError(f"cannot write CSV to {path!r}: {exc}") from exc


def emit_json(rows, path, meta: dict[str, str], fields=SCAN_FIELDS) -> None:
    """JSON mirror: same fields, one object per row; non-finite numbers -> null."""

    def jsonable(value):
        if isinstance(value, bool):
            return value
        if isinstance(value, float) and not math.isfinite(value):
            return None
        return value

    payload = dict(meta)
    payload["rows"] = [
        {name: jsonable(v) for name, v in zip(fields, row.astuple())} for row in rows
    ]
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            json.dump(payload, fh, indent=None, separators=(",", ":"), allow_nan=False)
            fh.write("\n")
    except OSError as exc:
        raise OSError(f"cannot write JSON to {path!r}: {exc}") from exc


def ridge_positions(rows: list[ScanRow]) -> dict[float, np.ndarray]:
    """Per time slice, the argmax index of log10_norm along each lambda_x column."""
    times = sorted({row.t for row in rows})
    xs = np.array(sorted({row.lambda_x for row in rows}))
    ys = np.array(sorted({row.lambda_y for row in rows}))
    index = {(round(x, 12)): i for i, x in enumerate(xs)}
    jndex = {(round(y, 12)): j for j, y in enumerate(ys)}
    out = {}
    for t in times:
        grid = np.full((xs.size, ys.size), -np.inf)
        for row in rows:
            if row.t == t and math.isfinite(row.log10_norm):
                grid[index[round(row.lambda_x, 12)], jndex[round(row.lambda_y, 12)]] = (
                    row.log10_norm
                )
        out[t] = np.argmax(grid, axis=1)
    return out
