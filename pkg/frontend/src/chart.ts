import { basename } from "path";
import { loadTable, num, Row, SchemaError, Table } from "./csv.js";
import { BLACK, Color, colorFor, DrawOp, Figure, GREY, LIGHT } from "./ops.js";
import { formatTick, makeScale, Scale, ScaleKind } from "./scale.js";
import { DEFAULT_SCALES, FigureSpec } from "./types.js";

const TICK_SIZE = 11;
const LABEL_SIZE = 13;

interface Series {
  label: string;
  points: [number, number][];
  color: Color;
  dashed?: boolean;
}

interface PanelBox {
  left: number;
  top: number;
  width: number;
  height: number;
}

function extent(values: number[]): [number, number] {
  return [Math.min(...values), Math.max(...values)];
}

function panelAxes(
  ops: DrawOp[],
  box: PanelBox,
  xScale: Scale,
  yScale: Scale,
  xLabel: string,
  yLabel: string,
): void {
  ops.push({
    type: "rect",
    x: box.left,
    y: box.top,
    w: box.width,
    h: box.height,
    color: BLACK,
    fill: false,
  });
  for (const t of xScale.ticks()) {
    const px = xScale.map(t);
    if (px < box.left - 0.5 || px > box.left + box.width + 0.5) continue;
    ops.push({ type: "line", points: [[px, box.top], [px, box.top + box.height]], color: LIGHT, width: 1 });
    ops.push({
      type: "line",
      points: [[px, box.top + box.height], [px, box.top + box.height + 4]],
      color: BLACK,
      width: 1,
    });
    ops.push({
      type: "text",
      x: px,
      y: box.top + box.height + 16,
      text: formatTick(t, xScale.kind),
      color: BLACK,
      size: TICK_SIZE,
      anchor: "middle",
    });
  }
  for (const t of yScale.ticks()) {
    const py = yScale.map(t);
    if (py < box.top - 0.5 || py > box.top + box.height + 0.5) continue;
    ops.push({ type: "line", points: [[box.left, py], [box.left + box.width, py]], color: LIGHT, width: 1 });
    ops.push({ type: "line", points: [[box.left - 4, py], [box.left, py]], color: BLACK, width: 1 });
    ops.push({
      type: "text",
      x: box.left - 7,
      y: py + 4,
      text: formatTick(t, yScale.kind),
      color: BLACK,
      size: TICK_SIZE,
      anchor: "end",
    });
  }
  ops.push({
    type: "text",
    x: box.left + box.width / 2,
    y: box.top + box.height + 34,
    text: xLabel,
    color: BLACK,
    size: LABEL_SIZE,
    anchor: "middle",
  });
  ops.push({
    type: "text",
    x: box.left,
    y: box.top - 8,
    text: yLabel,
    color: BLACK,
    size: LABEL_SIZE,
    anchor: "start",
  });
}

function drawSeries(ops: DrawOp[], series: Series[], xScale: Scale, yScale: Scale): void {
  for (const s of series) {
    const pts = s.points.map(([x, y]) => [xScale.map(x), yScale.map(y)] as [number, number]);
    if (pts.length > 1) {
      ops.push({ type: "line", points: pts, color: s.color, width: 2, dashed: s.dashed });
    }
    for (const [px, py] of pts) {
      ops.push({ type: "circle", x: px, y: py, r: 3, color: s.color });
    }
  }
}

function drawLegend(ops: DrawOp[], series: Series[], box: PanelBox): void {
  let y = box.top + 16;
  for (const s of series) {
    const x0 = box.left + box.width - 150;
    ops.push({
      type: "line",
      points: [[x0, y - 4], [x0 + 22, y - 4]],
      color: s.color,
      width: 2,
      dashed: s.dashed,
    });
    ops.push({
      type: "text",
      x: x0 + 28,
      y,
      text: s.label,
      color: BLACK,
      size: TICK_SIZE,
      anchor: "start",
    });
    y += 16;
  }
}

function lineFigure(
  series: Series[],
  xKind: ScaleKind,
  yKind: ScaleKind,
  xLabel: string,
  yLabel: string,
  title: string,
): Figure {
  const width = 640;
  const height = 420;
  const box: PanelBox = { left: 70, top: 40, width: width - 100, height: height - 110 };
  const xs = series.flatMap((s) => s.points.map((p) => p[0]));
  const ys = series.flatMap((s) => s.points.map((p) => p[1]));
  const xScale = makeScale(xKind, extent(xs), [box.left, box.left + box.width]);
  const yScale = makeScale(yKind, extent(ys), [box.top + box.height, box.top]);
  const ops: DrawOp[] = [];
  panelAxes(ops, box, xScale, yScale, xLabel, yLabel);
  drawSeries(ops, series, xScale, yScale);
  drawLegend(ops, series, box);
  if (title) {
    ops.push({
      type: "text",
      x: width / 2,
      y: 20,
      text: title,
      color: BLACK,
      size: LABEL_SIZE,
      anchor: "middle",
    });
  }
  return { width, height, ops };
}

function groupBy(rows: Row[], col: string): Map<string, Row[]> {
  const groups = new Map<string, Row[]>();
  for (const row of rows) {
    const key = row[col];
    const bucket = groups.get(key);
    if (bucket) bucket.push(row);
    else groups.set(key, [row]);
  }
  return groups;
}

// ---------------------------------------------------------------------------
// Figure kinds
// ---------------------------------------------------------------------------

function errorVsDegree(spec: FigureSpec, tables: Table[]): Figure {
  const { rows, path } = tables[0];
  const series: Series[] = [];
  let idx = 0;
  for (const [beta, group] of groupBy(rows, "beta")) {
    series.push({
      label: `beta=${beta}`,
      color: colorFor(idx++),
      points: group
        .map((r) => [num(r, "degree", path), num(r, "max_err", path)] as [number, number])
        .sort((a, b) => a[0] - b[0]),
    });
  }
  const sc = { ...DEFAULT_SCALES[spec.kind], ...spec.scales };
  return lineFigure(series, sc.x, sc.y, "polynomial degree", "max error", spec.title ?? "");
}

function errorVsShadows(spec: FigureSpec, tables: Table[]): Figure {
  const { rows, path } = tables[0];
  const series: Series[] = [];
  let idx = 0;
  for (const [method, group] of groupBy(rows, "method")) {
    series.push({
      label: method,
      color: colorFor(idx++),
      points: group
        .map((r) => [num(r, "n_shadows", path), num(r, "max_err", path)] as [number, number])
        .sort((a, b) => a[0] - b[0]),
    });
  }
  const sc = { ...DEFAULT_SCALES[spec.kind], ...spec.scales };
  return lineFigure(series, sc.x, sc.y, "number of shadows", "max error", spec.title ?? "");
}

function purityScan(spec: FigureSpec, tables: Table[]): Figure {
  const { rows, path } = tables[0];
  const series: Series[] = [];
  let idx = 0;
  for (const [model, byModel] of groupBy(rows, "model")) {
    for (const [beta, group] of groupBy(byModel, "beta")) {
      series.push({
        label: `${model} b=${beta}`,
        color: colorFor(idx++),
        points: group
          .map((r) => [num(r, "n", path), num(r, "purity", path)] as [number, number])
          .sort((a, b) => a[0] - b[0]),
      });
    }
  }
  const sc = { ...DEFAULT_SCALES[spec.kind], ...spec.scales };
  return lineFigure(series, sc.x, sc.y, "qubits", "purity", spec.title ?? "");
}

function trainingCurves(spec: FigureSpec, tables: Table[]): Figure {
  // main panel: relative entropy per input log; companion panel: eps_max
  // (solid) and eps_mean (dashed), matching colors per input
  const width = 640;
  const height = 640;
  const top: PanelBox = { left: 70, top: 40, width: width - 100, height: 280 };
  const bottom: PanelBox = { left: 70, top: 390, width: width - 100, height: 180 };
  const ops: DrawOp[] = [];
  const sMain: Series[] = [];
  const sEps: Series[] = [];
  tables.forEach((table, idx) => {
    const label = basename(table.path).replace(/\.csv$/, "");
    const color = colorFor(idx);
    const steps = table.rows.map((r) => num(r, "step", table.path));
    sMain.push({
      label,
      color,
      points: steps.map((s, i) => [s, num(table.rows[i], "S", table.path)] as [number, number]),
    });
    sEps.push({
      label: `${label} eps_max`,
      color,
      points: steps.map(
        (s, i) => [s, num(table.rows[i], "eps_max", table.path)] as [number, number],
      ),
    });
    sEps.push({
      label: `${label} eps_mean`,
      color,
      dashed: true,
      points: steps.map(
        (s, i) => [s, num(table.rows[i], "eps_mean", table.path)] as [number, number],
      ),
    });
  });
  const xsAll = sMain.flatMap((s) => s.points.map((p) => p[0]));
  const xDomain = extent(xsAll);
  const xTop = makeScale("linear", xDomain, [top.left, top.left + top.width]);
  const yTop = makeScale(
    "linear",
    extent(sMain.flatMap((s) => s.points.map((p) => p[1]))),
    [top.top + top.height, top.top],
  );
  panelAxes(ops, top, xTop, yTop, "step", "relative entropy");
  drawSeries(ops, sMain, xTop, yTop);
  drawLegend(ops, sMain, top);
  const xBot = makeScale("linear", xDomain, [bottom.left, bottom.left + bottom.width]);
  const epsVals = sEps.flatMap((s) => s.points.map((p) => p[1])).filter((v) => v > 0);
  const yBot = makeScale(
    "log",
    epsVals.length ? extent(epsVals) : [1e-3, 1],
    [bottom.top + bottom.height, bottom.top],
  );
  panelAxes(ops, bottom, xBot, yBot, "step", "expectation error");
  drawSeries(
    ops,
    sEps.map((s) => ({
      ...s,
      points: s.points.filter((p) => p[1] > 0), // log panel drops exact zeros
    })),
    xBot,
    yBot,
  );
  drawLegend(ops, sEps, bottom);
  if (spec.title) {
    ops.push({
      type: "text",
      x: width / 2,
      y: 20,
      text: spec.title,
      color: BLACK,
      size: LABEL_SIZE,
      anchor: "middle",
    });
  }
  return { width, height, ops };
}

const BAR_LIMIT = 20;

function distribution(spec: FigureSpec, tables: Table[]): Figure {
  const { rows, path } = tables[0];
  const shown = rows.slice(0, BAR_LIMIT); // first strings only, like the source logs
  const width = 760;
  const height = 420;
  const box: PanelBox = { left: 70, top: 40, width: width - 110, height: height - 130 };
  const values = shown.flatMap((r) => [num(r, "q", path), num(r, "p_model", path)]);
  const yScale = makeScale("linear", [0, Math.max(...values, 1e-12)], [
    box.top + box.height,
    box.top,
  ]);
  const ops: DrawOp[] = [];
  const xScale = makeScale("linear", [0, shown.length], [box.left, box.left + box.width]);
  panelAxes(ops, box, { ...xScale, ticks: () => [] }, yScale, "bit string", "probability");
  const slot = box.width / shown.length;
  const barW = slot * 0.34;
  shown.forEach((row, i) => {
    const x0 = box.left + i * slot + slot * 0.12;
    const q = num(row, "q", path);
    const pm = num(row, "p_model", path);
    ops.push({
      type: "rect",
      x: x0,
      y: yScale.map(q),
      w: barW,
      h: yScale.map(0) - yScale.map(q),
      color: colorFor(2),
      fill: true,
    });
    ops.push({
      type: "rect",
      x: x0 + barW + slot * 0.06,
      y: yScale.map(pm),
      w: barW,
      h: yScale.map(0) - yScale.map(pm),
      color: colorFor(0),
      fill: true,
    });
    ops.push({
      type: "text",
      x: box.left + i * slot + slot / 2,
      y: box.top + box.height + 14,
      text: row.bitstring,
      color: GREY,
      size: 7,
      anchor: "middle",
    });
  });
  const legend: Series[] = [
    { label: "target q", color: colorFor(2), points: [] },
    { label: "model diag", color: colorFor(0), points: [] },
  ];
  drawLegend(ops, legend, box);
  if (spec.title) {
    ops.push({
      type: "text",
      x: width / 2,
      y: 20,
      text: spec.title,
      color: BLACK,
      size: LABEL_SIZE,
      anchor: "middle",
    });
  }
  return { width, height, ops };
}

export function buildFigure(spec: FigureSpec): Figure {
  const tables = spec.inputs.map((p) => loadTable(p, spec.kind));
  for (const table of tables) {
    if (table.rows.length === 0) {
      throw new SchemaError(`${table.path}: no data rows`);
    }
  }
  switch (spec.kind) {
    case "error-vs-degree":
      return errorVsDegree(spec, tables);
    case "error-vs-shadows":
      return errorVsShadows(spec, tables);
    case "training-curves":
      return trainingCurves(spec, tables);
    case "purity-scan":
      return purityScan(spec, tables);
    case "distribution":
      return distribution(spec, tables);
  }
}
