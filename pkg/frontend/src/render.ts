import { mkdirSync, readFileSync, writeFileSync } from "fs";
import { dirname } from "path";
import { buildFigure } from "./chart.js";
import { toPng } from "./png.js";
import { rasterize } from "./raster.js";
import { toSvg } from "./svg.js";
import { FigureSpec, figureSpecSchema } from "./types.js";

export function loadSpec(path: string): FigureSpec {
  const raw = JSON.parse(readFileSync(path, "utf8"));
  const parsed = figureSpecSchema.safeParse(raw);
  if (!parsed.success) {
    const issue = parsed.error.issues[0];
    throw new Error(`invalid figure spec ${path}: ${issue.path.join(".")}: ${issue.message}`);
  }
  return parsed.data;
}

export interface RenderResult {
  svgPath: string;
  pngPath: string;
}

/** Renders <output>.svg and <output>.png; same inputs give same bytes. */
export function render(spec: FigureSpec): RenderResult {
  const figure = buildFigure(spec);
  const base = spec.output.replace(/\.(svg|png)$/, "");
  mkdirSync(dirname(base) || ".", { recursive: true });
  const svgPath = `${base}.svg`;
  const pngPath = `${base}.png`;
  writeFileSync(svgPath, toSvg(figure));
  writeFileSync(pngPath, toPng(rasterize(figure)));
  return { svgPath, pngPath };
}
