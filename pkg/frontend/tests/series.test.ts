import { readFileSync } from "node:fs";
import { join } from "node:path";
import { describe, expect, it } from "vitest";

import { AggregateRow, parseAggregates } from "../src/aggregates.js";
import { buildFigure } from "../src/series.js";

const FIXTURE = join(__dirname, "fixtures", "aggregates_default.csv");

function fixtureRows(): AggregateRow[] {
  return parseAggregates(readFileSync(FIXTURE, "utf-8"));
}

describe("buildFigure", () => {
  it("groups one line per (algorithm, k) with points sorted by batch size", () => {
    const fig = buildFigure(fixtureRows(), "expansions");
    expect(fig.series.length).toBe(6); // 2 algorithms x 3 noise levels
    for (const s of fig.series) {
      expect(s.points.map((p) => p.batchSize)).toEqual([1, 5, 25, 125, 625]);
      expect(s.label).toBe(`${s.algorithm} k=${s.kFast}`);
    }
  });

  it("carries the exact values from the rows", () => {
    const rows = fixtureRows();
    const fig = buildFigure(rows, "expansions");
    for (const s of fig.series) {
      for (const p of s.points) {
        const row = rows.find(
          (r) => r.algorithm === s.algorithm && r.kFast === s.kFast && r.batchSize === p.batchSize,
        )!;
        expect(p.mean).toBe(row.meanExpansions);
        expect(p.std).toBe(row.stdExpansions);
      }
    }
  });

  it("puts the batch-free baseline only on the expansions figure", () => {
    const rows = fixtureRows();
    expect(buildFigure(rows, "expansions").baseline.map((b) => b.kFast)).toEqual([0.005, 0.05, 0.5]);
    expect(buildFigure(rows, "ratio").baseline).toEqual([]);
    expect(buildFigure(rows, "runtime").baseline).toEqual([]);
  });

  it("selects the right metric per figure", () => {
    const rows = fixtureRows();
    const row = rows.find((r) => r.algorithm === "nbba" && r.kFast === 0.05 && r.batchSize === 125)!;
    const pick = (figureId: "expansions" | "ratio" | "runtime") =>
      buildFigure(rows, figureId)
        .series.find((s) => s.algorithm === "nbba" && s.kFast === 0.05)!
        .points.find((p) => p.batchSize === 125)!;
    expect(pick("expansions").mean).toBe(row.meanExpansions);
    expect(pick("ratio").mean).toBe(row.meanInferenceRatio);
    expect(pick("runtime").mean).toBe(row.meanWallTime);
  });

  it("ratio values stay within [0, 1]", () => {
    const fig = buildFigure(fixtureRows(), "ratio");
    for (const s of fig.series) {
      for (const p of s.points) {
        expect(p.mean).toBeGreaterThanOrEqual(0);
        expect(p.mean).toBeLessThanOrEqual(1);
      }
    }
  });

  it("renders a single-group input without error", () => {
    const rows = fixtureRows().filter(
      (r) => r.algorithm === "nbba" && r.kFast === 0.05 && r.batchSize === 25,
    );
    const fig = buildFigure(rows, "runtime");
    expect(fig.series.length).toBe(1);
    expect(fig.series[0].points.length).toBe(1);
  });
});
