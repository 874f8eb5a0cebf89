import { readFileSync } from "node:fs";
import { join } from "node:path";
import { describe, expect, it } from "vitest";

import { SchemaError, parseAggregates } from "../src/aggregates.js";

const FIXTURE = join(__dirname, "fixtures", "aggregates_default.csv");

describe("parseAggregates", () => {
  it("parses the default-sweep fixture", () => {
    const rows = parseAggregates(readFileSync(FIXTURE, "utf-8"));
    expect(rows.length).toBe(33); // 2 algos x 3 k x 5 B + focal x 3 k
    const focal = rows.filter((r) => r.algorithm === "focal");
    expect(focal.length).toBe(3);
    expect(focal.every((r) => r.batchSize === 0)).toBe(true);
    const sample = rows.find((r) => r.algorithm === "blocking" && r.kFast === 0.005 && r.batchSize === 1);
    expect(sample).toBeDefined();
    expect(sample!.meanExpansions).toBeCloseTo(783.1666666666666, 10);
  });

  it("round-trips float columns exactly", () => {
    const text = [
      "algorithm,k_fast,batch_size,mean_expansions,std_expansions,mean_wall_time,std_wall_time,mean_inference_ratio,std_inference_ratio,solve_rate",
      "nbba,0.05,25,1234.5678901234567,0.1,0.30000000000000004,0.0,0.5,0.0,1.0",
    ].join("\r\n");
    const [row] = parseAggregates(text);
    expect(row.meanExpansions).toBe(1234.5678901234567);
    expect(row.meanWallTime).toBe(0.30000000000000004);
  });

  it("names the missing column in schema errors", () => {
    const text = "algorithm,k_fast,batch_size\nnbba,0.05,25";
    expect(() => parseAggregates(text)).toThrowError(SchemaError);
    expect(() => parseAggregates(text)).toThrowError(/mean_expansions/);
  });

  it("rejects non-numeric cells with the column name", () => {
    const header =
      "algorithm,k_fast,batch_size,mean_expansions,std_expansions,mean_wall_time,std_wall_time,mean_inference_ratio,std_inference_ratio,solve_rate";
    const text = `${header}\nnbba,0.05,25,oops,0,0,0,0,0,1`;
    expect(() => parseAggregates(text)).toThrowError(/mean_expansions/);
  });
});
