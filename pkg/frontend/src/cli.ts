#!/usr/bin/env node
/**
 * plot --in <results dir> --fig {expansions|ratio|runtime|all} --out <dir>
 *
 * Reads aggregates.csv from the results directory and writes one SVG per
 * requested figure.  Exit code 0 on success, 1 on any error.
 */

import { mkdirSync, readFileSync, writeFileSync } from "node:fs";
import { join } from "node:path";
import { parseArgs } from "node:util";

import { parseAggregates } from "./aggregates.js";
import { buildFigure, FIGURE_IDS, FigureId } from "./series.js";
import { renderFigure } from "./svg.js";

export interface PlotOptions {
  inDir: string;
  fig: string;
  outDir: string;
}

/** Render the requested figures; returns the written file paths. */
export function runPlot(options: PlotOptions): string[] {
  const wanted: FigureId[] =
    options.fig === "all"
      ? FIGURE_IDS
      : FIGURE_IDS.includes(options.fig as FigureId)
        ? [options.fig as FigureId]
        : (() => {
            throw new Error(`unknown figure "${options.fig}" (use ${FIGURE_IDS.join("|")}|all)`);
          })();
  const csvPath = join(options.inDir, "aggregates.csv");
  const rows = parseAggregates(readFileSync(csvPath, "utf-8"));
  mkdirSync(options.outDir, { recursive: true });
  const written: string[] = [];
  for (const figureId of wanted) {
    const svg = renderFigure(buildFigure(rows, figureId));
    const path = join(options.outDir, `${figureId}.svg`);
    writeFileSync(path, svg, "utf-8");
    written.push(path);
  }
  return written;
}

export function main(argv: string[]): number {
  let parsed;
  try {
    parsed = parseArgs({
      args: argv,
      options: {
        in: { type: "string" },
        fig: { type: "string", default: "all" },
        out: { type: "string" },
      },
    });
  } catch (e) {
    console.error(`error: ${(e as Error).message}`);
    return 1;
  }
  const { in: inDir, fig, out: outDir } = parsed.values;
  if (!inDir || !outDir) {
    console.error("usage: plot --in <results dir> --fig {expansions|ratio|runtime|all} --out <dir>");
    return 1;
  }
  try {
    const written = runPlot({ inDir, fig: fig ?? "all", outDir });
    for (const path of written) {
      console.error(`wrote ${path}`);
    }
    return 0;
  } catch (e) {
    console.error(`error: ${(e as Error).message}`);
    return 1;
  }
}

if (import.meta.url === `file://${process.argv[1]}`) {
  process.exit(main(process.argv.slice(2)));
}
