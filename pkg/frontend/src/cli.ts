/**
 * quenchmetric-render: turn scan CSVs into per-slice heatmap PNGs and
 * timeseries CSVs into line-plot PNGs.
 *
 *   render --csv PATH --out DIR [--slices t1,t2,...] [--scale lo:hi]
 *          [--no-critical-lines] [--no-quench-lines]
 *
 * The CSV kind is detected from its header.  Exits nonzero on schema
 * errors, unknown slices or an empty plot.
 */

import { mkdirSync, writeFileSync } from "node:fs";
import { join } from "node:path";
import { parseArgs } from "node:util";

import { SchemaError, isScanCsv, isTimeseriesCsv, parseCsvFile } from "./csv.js";
import { DEFAULT_SPEC, FigureSpec, renderHeatmap, renderTimeseries, sliceGrids } from "./render.js";

export function slug(value: number): string {
  return String(value).replace(/[^0-9a-zA-Z.+-]/g, "_").replace(/\./g, "p");
}

export function run(argv: string[]): number {
  let args;
  try {
    args = parseArgs({
      args: argv,
      options: {
        csv: { type: "string" },
        out: { type: "string" },
        slices: { type: "string" },
        scale: { type: "string" },
        "no-critical-lines": { type: "boolean", default: false },
        "no-quench-lines": { type: "boolean", default: false },
      },
      allowPositionals: true,
    });
  } catch (error) {
    console.error(`error: ${(error as Error).message}`);
    return 2;
  }
  const positionals = args.positionals;
  if (positionals.length > 0 && positionals[0] !== "render") {
    console.error(`error: unknown command ${JSON.stringify(positionals[0])}; expected 'render'`);
    return 2;
  }
  const csvPath = args.values.csv;
  const outDir = args.values.out;
  if (!csvPath || !outDir) {
    console.error("usage: render --csv PATH --out DIR [--slices t1,t2,...] [--scale lo:hi]");
    return 2;
  }

  const spec: FigureSpec = {
    ...DEFAULT_SPEC,
    overlayCritical: !args.values["no-critical-lines"],
    overlayQuench: !args.values["no-quench-lines"],
  };
  if (args.values.slices) {
    spec.slices = args.values.slices.split(",").map((s) => {
      const v = Number(s.trim());
      if (Number.isNaN(v)) throw new SchemaError(`bad slice value ${JSON.stringify(s)}`);
      return v;
    });
  }
  if (args.values.scale) {
    const parts = args.values.scale.split(":").map(Number);
    if (parts.length !== 2 || parts.some(Number.isNaN) || !(parts[1] > parts[0])) {
      console.error(`error: --scale expects lo:hi with hi > lo, got ${args.values.scale}`);
      return 2;
    }
    spec.scale = [parts[0], parts[1]];
  }

  try {
    const csv = parseCsvFile(csvPath);
    mkdirSync(outDir, { recursive: true });
    if (isTimeseriesCsv(csv)) {
      const raster = renderTimeseries(csv);
      const path = join(outDir, "timeseries.png");
      writeFileSync(path, raster.encode());
      console.log(`wrote ${path}`);
      return 0;
    }
    if (!isScanCsv(csv)) {
      throw new SchemaError("CSV is neither a scan nor a timeseries (unrecognized header)");
    }
    const grids = sliceGrids(csv);
    const available = grids.map((g) => g.t);
    const wanted = spec.slices ?? available;
    const normName = csv.meta["norm"] ?? "unknown";
    let written = 0;
    for (const t of wanted) {
      const grid = grids.find((g) => Math.abs(g.t - t) <= 1e-12);
      if (!grid) {
        console.error(`error: no slice at t=${t}; available: ${available.join(", ")}`);
        return 1;
      }
      const raster = renderHeatmap(grid, spec, normName);
      const path = join(outDir, `heatmap_t${slug(grid.t)}.png`);
      writeFileSync(path, raster.encode());
      console.log(`wrote ${path}`);
      written += 1;
    }
    return written > 0 ? 0 : 1;
  } catch (error) {
    if (error instanceof SchemaError) {
      console.error(`error: ${error.message}`);
      return 1;
    }
    throw error;
  }
}

const entry = process.argv[1] ?? "";
if (entry.endsWith("cli.js") || entry.endsWith("quenchmetric-render")) {
  process.exit(run(process.argv.slice(2)));
}
