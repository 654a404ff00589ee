import { Color, Figure } from "./ops.js";

function rgb([r, g, b]: Color): string {
  return `rgb(${r},${g},${b})`;
}

function fmt(v: number): string {
  return String(Math.round(v * 100) / 100);
}

function escape(text: string): string {
  return text.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

export function toSvg(figure: Figure): string {
  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${figure.width}" ` +
      `height="${figure.height}" viewBox="0 0 ${figure.width} ${figure.height}">`,
  );
  parts.push(`<rect width="${figure.width}" height="${figure.height}" fill="white"/>`);
  for (const op of figure.ops) {
    switch (op.type) {
      case "line": {
        const points = op.points.map(([x, y]) => `${fmt(x)},${fmt(y)}`).join(" ");
        const dash = op.dashed ? ' stroke-dasharray="6,4"' : "";
        parts.push(
          `<polyline points="${points}" fill="none" stroke="${rgb(op.color)}" ` +
            `stroke-width="${op.width}"${dash}/>`,
        );
        break;
      }
      case "rect": {
        const fill = op.fill ? rgb(op.color) : "none";
        const stroke = op.fill ? "" : ` stroke="${rgb(op.color)}" stroke-width="1"`;
        parts.push(
          `<rect x="${fmt(op.x)}" y="${fmt(op.y)}" width="${fmt(op.w)}" ` +
            `height="${fmt(op.h)}" fill="${fill}"${stroke}/>`,
        );
        break;
      }
      case "circle":
        parts.push(
          `<circle cx="${fmt(op.x)}" cy="${fmt(op.y)}" r="${op.r}" fill="${rgb(op.color)}"/>`,
        );
        break;
      case "text": {
        const anchor = op.anchor === "start" ? "start" : op.anchor === "end" ? "end" : "middle";
        parts.push(
          `<text x="${fmt(op.x)}" y="${fmt(op.y)}" font-family="Helvetica,Arial,sans-serif" ` +
            `font-size="${op.size}" fill="${rgb(op.color)}" text-anchor="${anchor}">` +
            `${escape(op.text)}</text>`,
        );
        break;
      }
    }
  }
  parts.push("</svg>");
  return parts.join("\n") + "\n";
}
