/** Box drawing on a canvas-like context.
 *
 * Boxes arrive in image coordinates (inclusive pixel bounds) and are scaled
 * to display space here; a box drawn at any zoom outlines the same pixels.
 * The context is typed structurally so tests can pass a recording fake.
 */

import type { Box } from "./types.js";

export interface DrawContext {
  strokeStyle: string | CanvasGradient | CanvasPattern;
  lineWidth: number;
  setLineDash(segments: number[]): void;
  strokeRect(x: number, y: number, w: number, h: number): void;
}

export const GT_STYLE = { color: "#2ecc40", dash: [] as number[] };
export const ESTIMATE_STYLE = { color: "#ff4136", dash: [6, 4] };
export const QUERY_BOX_STYLE = { color: "#0074d9", dash: [2, 3] };

export interface BoxStyle {
  color: string;
  dash: number[];
}

export function drawBox(ctx: DrawContext, box: Box, scale: number, style: BoxStyle): void {
  const [xs, ys, xe, ye] = box;
  ctx.strokeStyle = style.color;
  ctx.lineWidth = 2;
  ctx.setLineDash(style.dash);
  // inclusive bounds: the box spans (xe - xs + 1) pixels
  ctx.strokeRect(xs * scale, ys * scale, (xe - xs + 1) * scale, (ye - ys + 1) * scale);
  ctx.setLineDash([]);
}
