/** Backend-independent drawing primitives in pixel coordinates. */

export type Color = [number, number, number];

export interface LineOp {
  type: "line";
  points: [number, number][];
  color: Color;
  width: number;
  dashed?: boolean;
}

export interface RectOp {
  type: "rect";
  x: number;
  y: number;
  w: number;
  h: number;
  color: Color;
  fill: boolean;
}

export interface CircleOp {
  type: "circle";
  x: number;
  y: number;
  r: number;
  color: Color;
}

export interface TextOp {
  type: "text";
  x: number;
  y: number; // baseline
  text: string;
  color: Color;
  size: number; // pixel height
  anchor: "start" | "middle" | "end";
}

export type DrawOp = LineOp | RectOp | CircleOp | TextOp;

export interface Figure {
  width: number;
  height: number;
  ops: DrawOp[];
}

export const BLACK: Color = [20, 20, 20];
export const GREY: Color = [160, 160, 160];
export const LIGHT: Color = [220, 220, 220];

export const PALETTE: Color[] = [
  [31, 119, 180],
  [214, 39, 40],
  [44, 160, 44],
  [255, 127, 14],
  [148, 103, 189],
  [140, 86, 75],
  [227, 119, 194],
  [127, 127, 127],
];

export function colorFor(index: number): Color {
  return PALETTE[index % PALETTE.length];
}
