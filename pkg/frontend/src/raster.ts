import { glyphRows, GLYPH_ADVANCE, GLYPH_H, GLYPH_W, textWidth } from "./font.js";
import { Color, Figure } from "./ops.js";

/** Software rasterizer: same draw ops as the SVG backend, RGB byte canvas. */
export class Canvas {
  readonly width: number;
  readonly height: number;
  readonly data: Uint8Array; // RGB, row-major

  constructor(width: number, height: number) {
    this.width = width;
    this.height = height;
    this.data = new Uint8Array(width * height * 3).fill(255);
  }

  set(x: number, y: number, [r, g, b]: Color): void {
    if (x < 0 || y < 0 || x >= this.width || y >= this.height) return;
    const i = (y * this.width + x) * 3;
    this.data[i] = r;
    this.data[i + 1] = g;
    this.data[i + 2] = b;
  }

  fillRect(x0: number, y0: number, w: number, h: number, color: Color): void {
    const xa = Math.round(x0);
    const ya = Math.round(y0);
    for (let y = ya; y < Math.round(y0 + h); y += 1) {
      for (let x = xa; x < Math.round(x0 + w); x += 1) {
        this.set(x, y, color);
      }
    }
  }

  strokeRect(x0: number, y0: number, w: number, h: number, color: Color): void {
    this.line(x0, y0, x0 + w, y0, color, 1);
    this.line(x0, y0 + h, x0 + w, y0 + h, color, 1);
    this.line(x0, y0, x0, y0 + h, color, 1);
    this.line(x0 + w, y0, x0 + w, y0 + h, color, 1);
  }

  line(x0: number, y0: number, x1: number, y1: number, color: Color, width: number): void {
    // Bresenham with a square pen for width > 1
    let xa = Math.round(x0);
    let ya = Math.round(y0);
    const xb = Math.round(x1);
    const yb = Math.round(y1);
    const dx = Math.abs(xb - xa);
    const dy = -Math.abs(yb - ya);
    const sx = xa < xb ? 1 : -1;
    const sy = ya < yb ? 1 : -1;
    let err = dx + dy;
    const pen = Math.max(0, Math.floor(width / 2));
    for (;;) {
      for (let oy = -pen; oy <= pen; oy += 1) {
        for (let ox = -pen; ox <= pen; ox += 1) {
          this.set(xa + ox, ya + oy, color);
        }
      }
      if (xa === xb && ya === yb) break;
      const e2 = 2 * err;
      if (e2 >= dy) {
        err += dy;
        xa += sx;
      }
      if (e2 <= dx) {
        err += dx;
        ya += sy;
      }
    }
  }

  dashedLine(x0: number, y0: number, x1: number, y1: number, color: Color, width: number): void {
    const length = Math.hypot(x1 - x0, y1 - y0);
    if (length < 1e-9) return;
    const on = 6;
    const off = 4;
    let t = 0;
    while (t < length) {
      const t2 = Math.min(t + on, length);
      this.line(
        x0 + ((x1 - x0) * t) / length,
        y0 + ((y1 - y0) * t) / length,
        x0 + ((x1 - x0) * t2) / length,
        y0 + ((y1 - y0) * t2) / length,
        color,
        width,
      );
      t = t2 + off;
    }
  }

  circle(cx: number, cy: number, r: number, color: Color): void {
    const xa = Math.round(cx);
    const ya = Math.round(cy);
    for (let y = -r; y <= r; y += 1) {
      for (let x = -r; x <= r; x += 1) {
        if (x * x + y * y <= r * r + 0.5) this.set(xa + x, ya + y, color);
      }
    }
  }

  text(x: number, baseline: number, content: string, color: Color, size: number, anchor: string): void {
    const scale = Math.max(1, Math.round(size / GLYPH_H));
    const total = textWidth(content, scale);
    let cx = Math.round(anchor === "middle" ? x - total / 2 : anchor === "end" ? x - total : x);
    const top = Math.round(baseline - GLYPH_H * scale);
    for (const ch of content) {
      const rows = glyphRows(ch);
      for (let gy = 0; gy < GLYPH_H; gy += 1) {
        for (let gx = 0; gx < GLYPH_W; gx += 1) {
          if (rows[gy][gx] === "#") {
            this.fillRect(cx + gx * scale, top + gy * scale, scale, scale, color);
          }
        }
      }
      cx += GLYPH_ADVANCE * scale;
    }
  }
}

export function rasterize(figure: Figure): Canvas {
  const canvas = new Canvas(figure.width, figure.height);
  for (const op of figure.ops) {
    switch (op.type) {
      case "line":
        for (let i = 0; i + 1 < op.points.length; i += 1) {
          const [x0, y0] = op.points[i];
          const [x1, y1] = op.points[i + 1];
          if (op.dashed) canvas.dashedLine(x0, y0, x1, y1, op.color, op.width);
          else canvas.line(x0, y0, x1, y1, op.color, op.width);
        }
        break;
      case "rect":
        if (op.fill) canvas.fillRect(op.x, op.y, op.w, op.h, op.color);
        else canvas.strokeRect(op.x, op.y, op.w, op.h, op.color);
        break;
      case "circle":
        canvas.circle(op.x, op.y, op.r, op.color);
        break;
      case "text":
        canvas.text(op.x, op.y, op.text, op.color, op.size, op.anchor);
        break;
    }
  }
  return canvas;
}
