/**
 * Heatmap and time-series rendering for quenchmetric CSVs.
 *
 * Heatmaps: one raster per selected time slice, colored by log10_norm with
 * 1st-99th-percentile scaling (overridable), with critical-line overlays
 * built from the gap-minimum columns: red dashes where the base gap dips
 * (the t=0 critical lines), white dashes where the quenched gap dips.
 * Everything is a pure function of the parsed CSV, so re-renders are
 * pixel-identical.
 */

import { ParsedCsv, SchemaError, columnIndex } from "./csv.js";
import { MISSING_COLOR, colorAt, defaultScale, percentile } from "./colormap.js";
import { GLYPH_HEIGHT, GLYPH_WIDTH, drawText, drawTextVertical } from "./font.js";
import { Raster } from "./png.js";

export interface FigureSpec {
  /** time slices to render; undefined renders every slice in the file */
  slices?: number[];
  /** color-scale limits; undefined uses the percentile default per slice */
  scale?: [number, number];
  /** draw the base-point critical lines (red dashes) */
  overlayCritical: boolean;
  /** draw the quenched-point critical lines (white dashes) */
  overlayQuench: boolean;
}

export const DEFAULT_SPEC: FigureSpec = { overlayCritical: true, overlayQuench: true };

const MARGIN_LEFT = 58;
const MARGIN_BOTTOM = 34;
const MARGIN_TOP = 16;
const MARGIN_RIGHT = 12;
const RED: [number, number, number] = [220, 30, 30];
const WHITE: [number, number, number] = [255, 255, 255];

export interface SliceGrid {
  t: number;
  xs: number[];
  ys: number[];
  /** value[ix][iy] = log10_norm */
  value: number[][];
  gapMin: number[][];
  gapMinQuench: number[][];
}

function uniqueSorted(values: number[]): number[] {
  return [...new Set(values)].sort((a, b) => a - b);
}

/** Group scan rows into per-slice grids, keyed by the time column. */
export function sliceGrids(csv: ParsedCsv): SliceGrid[] {
  const ix = columnIndex(csv, "lambda_x");
  const iy = columnIndex(csv, "lambda_y");
  const it = columnIndex(csv, "t");
  const iv = columnIndex(csv, "log10_norm");
  const ig = columnIndex(csv, "gap_min");
  const igq = columnIndex(csv, "gap_min_quench");
  if (csv.rows.length === 0) {
    throw new SchemaError("empty plot: CSV has a header but no data rows");
  }
  const xs = uniqueSorted(csv.rows.map((r) => r[ix]));
  const ys = uniqueSorted(csv.rows.map((r) => r[iy]));
  const xIndex = new Map(xs.map((v, i) => [v, i]));
  const yIndex = new Map(ys.map((v, i) => [v, i]));
  const grids = new Map<number, SliceGrid>();
  for (const row of csv.rows) {
    const t = row[it];
    let grid = grids.get(t);
    if (!grid) {
      const make = () => xs.map(() => ys.map(() => NaN));
      grid = { t, xs, ys, value: make(), gapMin: make(), gapMinQuench: make() };
      grids.set(t, grid);
    }
    const gx = xIndex.get(row[ix])!;
    const gy = yIndex.get(row[iy])!;
    grid.value[gx][gy] = row[iv];
    grid.gapMin[gx][gy] = row[ig];
    grid.gapMinQuench[gx][gy] = row[igq];
  }
  return [...grids.values()].sort((a, b) => a.t - b.t);
}

/**
 * Cells on a critical line: local minima of the gap field along each
 * column, below the 5th percentile of the whole slice.
 */
export function criticalMask(gap: number[][]): boolean[][] {
  const flat = gap.flat().filter((v) => Number.isFinite(v)).sort((a, b) => a - b);
  const cut = percentile(flat, 0.05);
  return gap.map((column) =>
    column.map((v, j) => {
      if (!Number.isFinite(v) || v > cut) return false;
      const below = j > 0 ? column[j - 1] : Infinity;
      const above = j < column.length - 1 ? column[j + 1] : Infinity;
      return v <= below && v <= above;
    }),
  );
}

function formatTick(value: number): string {
  const text = value.toPrecision(3);
  return text.includes(".") ? text.replace(/\.?0+$/, "") : text;
}

export function renderHeatmap(grid: SliceGrid, spec: FigureSpec, normName: string): Raster {
  const cell = Math.max(2, Math.floor(480 / Math.max(grid.xs.length, grid.ys.length)));
  const plotW = cell * grid.xs.length;
  const plotH = cell * grid.ys.length;
  const raster = new Raster(
    MARGIN_LEFT + plotW + MARGIN_RIGHT,
    MARGIN_TOP + plotH + MARGIN_BOTTOM,
  );
  const [lo, hi] = spec.scale ?? defaultScale(grid.value.flat());
  const span = hi - lo;

  for (let i = 0; i < grid.xs.length; i++) {
    for (let j = 0; j < grid.ys.length; j++) {
      const value = grid.value[i][j];
      const rgb = Number.isNaN(value)
        ? MISSING_COLOR
        : colorAt(((Number.isFinite(value) ? value : lo) - lo) / span);
      // image y grows downward; lambda_y grows upward
      const px = MARGIN_LEFT + i * cell;
      const py = MARGIN_TOP + (grid.ys.length - 1 - j) * cell;
      raster.fillRect(px, py, cell, cell, rgb);
    }
  }

  const overlays: Array<[boolean, number[][], [number, number, number]]> = [
    [spec.overlayCritical, grid.gapMin, RED],
    [spec.overlayQuench, grid.gapMinQuench, WHITE],
  ];
  for (const [enabled, gap, color] of overlays) {
    if (!enabled) continue;
    const mask = criticalMask(gap);
    for (let i = 0; i < grid.xs.length; i++) {
      for (let j = 0; j < grid.ys.length; j++) {
        if (!mask[i][j] || (i + j) % 6 >= 3) continue; // dashed
        const px = MARGIN_LEFT + i * cell;
        const py = MARGIN_TOP + (grid.ys.length - 1 - j) * cell;
        raster.fillRect(px, py + Math.floor(cell / 2), cell, Math.max(1, Math.floor(cell / 3)), color);
      }
    }
  }

  // frame, title, axis labels, corner ticks
  const title = `t=${formatTick(grid.t)}  log10 ${normName} norm`;
  drawText(raster, MARGIN_LEFT, 4, title);
  drawText(raster, MARGIN_LEFT + Math.floor(plotW / 2) - 4 * GLYPH_WIDTH, MARGIN_TOP + plotH + 20, "lambda_x");
  drawTextVertical(raster, 4, MARGIN_TOP + Math.floor(plotH / 2) - 4 * GLYPH_HEIGHT, "lambda_y");
  drawText(raster, MARGIN_LEFT, MARGIN_TOP + plotH + 6, formatTick(grid.xs[0]));
  const xmaxText = formatTick(grid.xs[grid.xs.length - 1]);
  drawText(raster, MARGIN_LEFT + plotW - xmaxText.length * GLYPH_WIDTH, MARGIN_TOP + plotH + 6, xmaxText);
  drawText(raster, MARGIN_LEFT - 6 * GLYPH_WIDTH, MARGIN_TOP + plotH - GLYPH_HEIGHT, formatTick(grid.ys[0]));
  drawText(raster, MARGIN_LEFT - 6 * GLYPH_WIDTH, MARGIN_TOP, formatTick(grid.ys[grid.ys.length - 1]));
  return raster;
}

const SERIES_COLORS: Record<string, [number, number, number]> = {
  q1: [31, 119, 180],
  q: [44, 160, 44],
  asymptote: [148, 103, 189],
  X_bound: [214, 39, 40],
  triangle_lo: [150, 150, 150],
  triangle_hi: [150, 150, 150],
};

/** Line plot of the equilibration columns against time. */
export function renderTimeseries(csv: ParsedCsv): Raster {
  const it = columnIndex(csv, "t");
  if (csv.rows.length === 0) {
    throw new SchemaError("empty plot: CSV has a header but no data rows");
  }
  const names = Object.keys(SERIES_COLORS).filter((n) => csv.header.includes(n));
  const series = names.map((name) => ({
    name,
    color: SERIES_COLORS[name],
    points: csv.rows
      .map((r) => [r[it], r[columnIndex(csv, name)]] as [number, number])
      .filter(([, v]) => Number.isFinite(v)),
  }));
  const finite = series.flatMap((s) => s.points.map(([, v]) => v));
  if (finite.length === 0) {
    throw new SchemaError("empty plot: no finite values in any series");
  }
  const ts = csv.rows.map((r) => r[it]);
  const tMin = Math.min(...ts);
  const tMax = Math.max(...ts);
  let vMin = Math.min(...finite, 0);
  let vMax = Math.max(...finite);
  if (!(vMax > vMin)) vMax = vMin + 1;

  const plotW = 520;
  const plotH = 300;
  const raster = new Raster(
    MARGIN_LEFT + plotW + MARGIN_RIGHT,
    MARGIN_TOP + plotH + MARGIN_BOTTOM + names.length * GLYPH_HEIGHT,
  );
  const px = (t: number) => MARGIN_LEFT + Math.round(((t - tMin) / (tMax - tMin || 1)) * (plotW - 1));
  const py = (v: number) => MARGIN_TOP + Math.round((1 - (v - vMin) / (vMax - vMin)) * (plotH - 1));

  raster.fillRect(MARGIN_LEFT, MARGIN_TOP + plotH, plotW, 1, [0, 0, 0]);
  raster.fillRect(MARGIN_LEFT, MARGIN_TOP, 1, plotH, [0, 0, 0]);
  for (const s of series) {
    for (let i = 1; i < s.points.length; i++) {
      const [t0, v0] = s.points[i - 1];
      const [t1, v1] = s.points[i];
      const steps = Math.max(Math.abs(px(t1) - px(t0)), Math.abs(py(v1) - py(v0)), 1);
      for (let k = 0; k <= steps; k++) {
        const t = t0 + ((t1 - t0) * k) / steps;
        const v = v0 + ((v1 - v0) * k) / steps;
        raster.set(px(t), py(v), s.color);
        raster.set(px(t), py(v) + 1, s.color);
      }
    }
  }
  drawText(raster, MARGIN_LEFT, 4, "equilibration trace");
  drawText(raster, MARGIN_LEFT + Math.floor(plotW / 2) - GLYPH_WIDTH, MARGIN_TOP + plotH + 20, "t");
  drawText(raster, MARGIN_LEFT, MARGIN_TOP + plotH + 6, formatTick(tMin));
  const tmaxText = formatTick(tMax);
  drawText(raster, MARGIN_LEFT + plotW - tmaxText.length * GLYPH_WIDTH, MARGIN_TOP + plotH + 6, tmaxText);
  drawText(raster, MARGIN_LEFT - 6 * GLYPH_WIDTH, MARGIN_TOP, formatTick(vMax));
  drawText(raster, MARGIN_LEFT - 6 * GLYPH_WIDTH, MARGIN_TOP + plotH - GLYPH_HEIGHT, formatTick(vMin));
  series.forEach((s, i) => {
    const y = MARGIN_TOP + plotH + MARGIN_BOTTOM + i * GLYPH_HEIGHT - 8;
    raster.fillRect(MARGIN_LEFT, y + 3, 12, 2, s.color);
    drawText(raster, MARGIN_LEFT + 16, y, s.name);
  });
  return raster;
}
