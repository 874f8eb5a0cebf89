import Papa from "papaparse";

export interface AggregateRow {
  algorithm: string;
  kFast: number;
  batchSize: number;
  meanExpansions: number;
  stdExpansions: number;
  meanWallTime: number;
  stdWallTime: number;
  meanInferenceRatio: number;
  stdInferenceRatio: number;
  solveRate: number;
}

export class SchemaError extends Error {}

const REQUIRED_COLUMNS = [
  "algorithm",
  "k_fast",
  "batch_size",
  "mean_expansions",
  "std_expansions",
  "mean_wall_time",
  "std_wall_time",
  "mean_inference_ratio",
  "std_inference_ratio",
  "solve_rate",
] as const;

/** Parse aggregates.csv text; a missing column is a schema error naming it. */
export function parseAggregates(text: string): AggregateRow[] {
  const parsed = Papa.parse<Record<string, string>>(text, {
    header: true,
    skipEmptyLines: true,
  });
  if (parsed.errors.length > 0) {
    const e = parsed.errors[0];
    throw new SchemaError(`aggregates.csv parse error at row ${e.row}: ${e.message}`);
  }
  const fields = parsed.meta.fields ?? [];
  for (const col of REQUIRED_COLUMNS) {
    if (!fields.includes(col)) {
      throw new SchemaError(`aggregates.csv is missing required column "${col}"`);
    }
  }
  return parsed.data.map((row, i) => {
    const num = (col: string): number => {
      const v = Number(row[col]);
      if (!Number.isFinite(v)) {
        throw new SchemaError(`aggregates.csv row ${i + 1}: column "${col}" is not a number (${row[col]})`);
      }
      return v;
    };
    return {
      algorithm: row["algorithm"],
      kFast: num("k_fast"),
      batchSize: num("batch_size"),
      meanExpansions: num("mean_expansions"),
      stdExpansions: num("std_expansions"),
      meanWallTime: num("mean_wall_time"),
      stdWallTime: num("std_wall_time"),
      meanInferenceRatio: num("mean_inference_ratio"),
      stdInferenceRatio: num("std_inference_ratio"),
      solveRate: num("solve_rate"),
    };
  });
}
