import { FigureData, Point, Series } from "./series.js";

const WIDTH = 760;
const HEIGHT = 460;
const MARGIN = { top: 42, right: 210, bottom: 52, left: 76 };
const BASELINE_GAP = 46; // x distance of the baseline column past the last batch tick

const PALETTE = [
  "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
  "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
];

function esc(text: string): string {
  return text.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

function fmtTick(v: number): string {
  if (v === 0) return "0";
  const abs = Math.abs(v);
  if (abs >= 10000 || abs < 0.01) return v.toExponential(0);
  return Number(v.toPrecision(3)).toString();
}

/** Nice linear ticks covering [lo, hi]. */
function linearTicks(lo: number, hi: number, count = 6): number[] {
  if (hi <= lo) return [lo];
  const span = hi - lo;
  const step = Math.pow(10, Math.floor(Math.log10(span / count)));
  const candidates = [step, 2 * step, 5 * step, 10 * step];
  const chosen = candidates.find((s) => span / s <= count) ?? 10 * step;
  const ticks: number[] = [];
  for (let v = Math.ceil(lo / chosen) * chosen; v <= hi + 1e-12; v += chosen) {
    ticks.push(Number(v.toPrecision(12)));
  }
  return ticks;
}

function decadeTicks(lo: number, hi: number): number[] {
  const ticks: number[] = [];
  for (let e = Math.floor(Math.log10(lo)); e <= Math.ceil(Math.log10(hi)); e++) {
    const v = Math.pow(10, e);
    if (v >= lo / 1.0001 && v <= hi * 1.0001) ticks.push(v);
  }
  return ticks.length >= 2 ? ticks : [lo, hi];
}

export function renderFigure(data: FigureData): string {
  const plotW = WIDTH - MARGIN.left - MARGIN.right;
  const plotH = HEIGHT - MARGIN.top - MARGIN.bottom;

  const batches = [...new Set(data.series.flatMap((s) => s.points.map((p) => p.batchSize)))].sort((a, b) => a - b);
  const hasBaseline = data.baseline.length > 0;
  const xDomainW = hasBaseline ? plotW - BASELINE_GAP : plotW;

  // log x over the batch sizes present (they span 1..625)
  const xLo = Math.log(batches[0] ?? 1);
  const xHi = Math.log(batches[batches.length - 1] ?? 1);
  const xPos = (b: number): number => {
    if (batches.length <= 1 || xHi === xLo) return MARGIN.left + xDomainW / 2;
    return MARGIN.left + ((Math.log(b) - xLo) / (xHi - xLo)) * xDomainW;
  };
  const baselineX = MARGIN.left + plotW;

  const values: number[] = [];
  for (const s of data.series) {
    for (const p of s.points) {
      values.push(p.mean, p.mean + p.std, data.logY ? p.mean : p.mean - p.std);
    }
  }
  for (const b of data.baseline) {
    values.push(b.mean, b.mean + b.std, data.logY ? b.mean : b.mean - b.std);
  }
  let yLo = Math.min(...values);
  let yHi = Math.max(...values);
  if (!Number.isFinite(yLo)) {
    yLo = 0;
    yHi = 1;
  }
  if (data.logY) {
    yLo = Math.max(Math.min(yLo, yHi / 10), 1e-6);
    yHi = yHi * 1.15;
  } else {
    const pad = (yHi - yLo || 1) * 0.08;
    yLo = Math.max(0, yLo - pad);
    yHi = yHi + pad;
  }
  const yPos = (v: number): number => {
    if (data.logY) {
      const clamped = Math.max(v, yLo);
      return MARGIN.top + plotH - ((Math.log(clamped) - Math.log(yLo)) / (Math.log(yHi) - Math.log(yLo))) * plotH;
    }
    return MARGIN.top + plotH - ((v - yLo) / (yHi - yLo)) * plotH;
  };

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}" viewBox="0 0 ${WIDTH} ${HEIGHT}" font-family="sans-serif">`,
  );
  // the exact plotted series ride along inside the file for tooling and tests
  parts.push(`<metadata id="figure-data"><![CDATA[${JSON.stringify(data)}]]></metadata>`);
  parts.push(`<rect width="${WIDTH}" height="${HEIGHT}" fill="white"/>`);
  parts.push(`<text x="${WIDTH / 2}" y="24" text-anchor="middle" font-size="16">${esc(data.title)}</text>`);

  // axes
  const axisY = MARGIN.top + plotH;
  parts.push(`<line x1="${MARGIN.left}" y1="${axisY}" x2="${MARGIN.left + plotW}" y2="${axisY}" stroke="#333"/>`);
  parts.push(`<line x1="${MARGIN.left}" y1="${MARGIN.top}" x2="${MARGIN.left}" y2="${axisY}" stroke="#333"/>`);
  for (const b of batches) {
    const x = xPos(b);
    parts.push(`<line x1="${x}" y1="${axisY}" x2="${x}" y2="${axisY + 5}" stroke="#333"/>`);
    parts.push(`<text x="${x}" y="${axisY + 20}" text-anchor="middle" font-size="12">${b}</text>`);
  }
  if (hasBaseline) {
    parts.push(`<line x1="${baselineX}" y1="${axisY}" x2="${baselineX}" y2="${axisY + 5}" stroke="#333"/>`);
    parts.push(`<text x="${baselineX}" y="${axisY + 20}" text-anchor="middle" font-size="12">fast only</text>`);
  }
  parts.push(
    `<text x="${MARGIN.left + plotW / 2}" y="${HEIGHT - 12}" text-anchor="middle" font-size="13">batch size (log scale)</text>`,
  );
  const yTicks = data.logY ? decadeTicks(yLo, yHi) : linearTicks(yLo, yHi);
  for (const v of yTicks) {
    const y = yPos(v);
    parts.push(`<line x1="${MARGIN.left - 5}" y1="${y}" x2="${MARGIN.left}" y2="${y}" stroke="#333"/>`);
    parts.push(`<line x1="${MARGIN.left}" y1="${y}" x2="${MARGIN.left + plotW}" y2="${y}" stroke="#eee"/>`);
    parts.push(`<text x="${MARGIN.left - 9}" y="${y + 4}" text-anchor="end" font-size="12">${fmtTick(v)}</text>`);
  }
  parts.push(
    `<text x="20" y="${MARGIN.top + plotH / 2}" text-anchor="middle" font-size="13" transform="rotate(-90 20 ${MARGIN.top + plotH / 2})">${esc(data.yLabel)}</text>`,
  );

  const errorBar = (x: number, p: { mean: number; std: number }, color: string): string => {
    const hiY = yPos(p.mean + p.std);
    const loV = data.logY ? Math.max(p.mean - p.std, yLo) : p.mean - p.std;
    const loY = yPos(loV);
    return (
      `<line x1="${x}" y1="${loY}" x2="${x}" y2="${hiY}" stroke="${color}" stroke-width="1"/>` +
      `<line x1="${x - 3}" y1="${hiY}" x2="${x + 3}" y2="${hiY}" stroke="${color}" stroke-width="1"/>` +
      `<line x1="${x - 3}" y1="${loY}" x2="${x + 3}" y2="${loY}" stroke="${color}" stroke-width="1"/>`
    );
  };

  data.series.forEach((s: Series, i: number) => {
    const color = PALETTE[i % PALETTE.length];
    const coords = s.points.map((p: Point) => `${xPos(p.batchSize)},${yPos(p.mean)}`).join(" ");
    parts.push(`<polyline points="${coords}" fill="none" stroke="${color}" stroke-width="1.8"/>`);
    for (const p of s.points) {
      parts.push(errorBar(xPos(p.batchSize), p, color));
      parts.push(`<circle cx="${xPos(p.batchSize)}" cy="${yPos(p.mean)}" r="3" fill="${color}"/>`);
    }
  });
  data.baseline.forEach((b, i) => {
    const color = PALETTE[(data.series.length + i) % PALETTE.length];
    parts.push(errorBar(baselineX, b, color));
    parts.push(`<rect x="${baselineX - 4}" y="${yPos(b.mean) - 4}" width="8" height="8" fill="${color}"/>`);
  });

  // legend
  let ly = MARGIN.top + 6;
  const lx = MARGIN.left + plotW + 18;
  data.series.forEach((s, i) => {
    const color = PALETTE[i % PALETTE.length];
    parts.push(`<line x1="${lx}" y1="${ly}" x2="${lx + 22}" y2="${ly}" stroke="${color}" stroke-width="2"/>`);
    parts.push(`<text x="${lx + 28}" y="${ly + 4}" font-size="12">${esc(s.label)}</text>`);
    ly += 18;
  });
  data.baseline.forEach((b, i) => {
    const color = PALETTE[(data.series.length + i) % PALETTE.length];
    parts.push(`<rect x="${lx + 7}" y="${ly - 4}" width="8" height="8" fill="${color}"/>`);
    parts.push(`<text x="${lx + 28}" y="${ly + 4}" font-size="12">${esc(b.label)} (fast only)</text>`);
    ly += 18;
  });

  parts.push("</svg>");
  return parts.join("\n");
}

/** Pull the embedded data series back out of a rendered SVG. */
export function extractFigureData(svgText: string): FigureData {
  const match = /<metadata id="figure-data"><!\[CDATA\[([\s\S]*?)\]\]><\/metadata>/.exec(svgText);
  if (!match) {
    throw new Error("no figure-data metadata block in SVG");
  }
  return JSON.parse(match[1]) as FigureData;
}
