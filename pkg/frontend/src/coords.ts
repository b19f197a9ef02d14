/** Display <-> image coordinate mapping.
 *
 * The image is drawn scaled by a single factor with no offset, so a display
 * point maps to the image pixel whose scaled square contains it, and an image
 * pixel maps back to the centre of that square. The round trip
 * displayToImage(imageToDisplay(p)) === p holds exactly at any scale > 0.
 */

import type { ImagePoint } from "./types.js";

export interface ViewTransform {
  scale: number;
  imageWidth: number;
  imageHeight: number;
}

/** Largest scale at which the whole image fits the viewport. */
export function fitScale(
  imageWidth: number,
  imageHeight: number,
  viewWidth: number,
  viewHeight: number,
): number {
  if (imageWidth < 1 || imageHeight < 1 || viewWidth < 1 || viewHeight < 1) {
    throw new Error("dimensions must be positive");
  }
  return Math.min(viewWidth / imageWidth, viewHeight / imageHeight);
}

function clamp(v: number, lo: number, hi: number): number {
  return Math.min(hi, Math.max(lo, v));
}

export function displayToImage(displayX: number, displayY: number, view: ViewTransform): ImagePoint {
  const x = clamp(Math.floor(displayX / view.scale), 0, view.imageWidth - 1);
  const y = clamp(Math.floor(displayY / view.scale), 0, view.imageHeight - 1);
  return { x, y };
}

/** Display position of an image pixel's centre. */
export function imageToDisplay(point: ImagePoint, view: ViewTransform): { x: number; y: number } {
  return {
    x: (point.x + 0.5) * view.scale,
    y: (point.y + 0.5) * view.scale,
  };
}
