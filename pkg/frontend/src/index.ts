export { AggregateRow, SchemaError, parseAggregates } from "./aggregates.js";
export { BaselinePoint, FIGURE_IDS, FigureData, FigureId, Point, Series, buildFigure } from "./series.js";
export { extractFigureData, renderFigure } from "./svg.js";
export { PlotOptions, main, runPlot } from "./cli.js";
