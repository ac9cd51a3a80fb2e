/** Low-level panel drawing on a canvas 2D context. */

import type { SKRSContext2D } from "@napi-rs/canvas";
import type { Scale } from "./scales.js";

export interface Frame {
  left: number;
  top: number;
  width: number;
  height: number;
}

export const FONT = "13px DejaVu Sans";
export const FONT_SMALL = "12px DejaVu Sans";

export interface AxesOptions {
  xLabel?: string;
  yLabel?: string;
  title?: string;
  xTicks?: boolean; // default true; suppressed on stacked upper panels
}

export function drawAxes(
  ctx: SKRSContext2D,
  frame: Frame,
  x: Scale,
  y: Scale,
  opts: AxesOptions = {},
): void {
  const { left, top, width, height } = frame;
  const bottom = top + height;
  const right = left + width;
  const showX = opts.xTicks !== false;

  ctx.save();
  // grid
  ctx.strokeStyle = "#dddddd";
  ctx.lineWidth = 1;
  for (const t of y.ticks()) {
    const py = y(t.value);
    if (py < top - 0.5 || py > bottom + 0.5) continue;
    ctx.beginPath();
    ctx.moveTo(left, py);
    ctx.lineTo(right, py);
    ctx.stroke();
  }
  // frame
  ctx.strokeStyle = "#333333";
  ctx.strokeRect(left, top, width, height);

  ctx.fillStyle = "#222222";
  ctx.font = FONT_SMALL;
  ctx.textAlign = "right";
  ctx.textBaseline = "middle";
  for (const t of y.ticks()) {
    const py = y(t.value);
    if (py < top - 0.5 || py > bottom + 0.5) continue;
    ctx.fillText(t.label, left - 6, py);
  }
  if (showX) {
    ctx.textAlign = "center";
    ctx.textBaseline = "top";
    for (const t of x.ticks()) {
      const px = x(t.value);
      if (px < left - 0.5 || px > right + 0.5) continue;
      ctx.beginPath();
      ctx.strokeStyle = "#333333";
      ctx.moveTo(px, bottom);
      ctx.lineTo(px, bottom + 4);
      ctx.stroke();
      ctx.fillText(t.label, px, bottom + 7);
    }
  }
  ctx.font = FONT;
  if (opts.xLabel && showX) {
    ctx.textAlign = "center";
    ctx.textBaseline = "top";
    ctx.fillText(opts.xLabel, left + width / 2, bottom + 24);
  }
  if (opts.yLabel) {
    ctx.save();
    ctx.translate(left - 52, top + height / 2);
    ctx.rotate(-Math.PI / 2);
    ctx.textAlign = "center";
    ctx.textBaseline = "bottom";
    ctx.fillText(opts.yLabel, 0, 0);
    ctx.restore();
  }
  if (opts.title) {
    ctx.textAlign = "left";
    ctx.textBaseline = "bottom";
    ctx.fillText(opts.title, left, top - 5);
  }
  ctx.restore();
}

export interface LineOptions {
  color: string;
  width?: number;
  dash?: number[];
}

export function drawPolyline(
  ctx: SKRSContext2D,
  xs: number[],
  ys: number[],
  opts: LineOptions,
): void {
  if (xs.length === 0) return;
  ctx.save();
  ctx.strokeStyle = opts.color;
  ctx.lineWidth = opts.width ?? 1.6;
  ctx.setLineDash(opts.dash ?? []);
  ctx.beginPath();
  ctx.moveTo(xs[0], ys[0]);
  for (let i = 1; i < xs.length; i++) ctx.lineTo(xs[i], ys[i]);
  ctx.stroke();
  ctx.restore();
}

export function drawMarkers(
  ctx: SKRSContext2D,
  xs: number[],
  ys: number[],
  color: string,
  radius = 3.5,
): void {
  ctx.save();
  ctx.fillStyle = color;
  for (let i = 0; i < xs.length; i++) {
    ctx.beginPath();
    ctx.arc(xs[i], ys[i], radius, 0, 2 * Math.PI);
    ctx.fill();
  }
  ctx.restore();
}

/** Filled region between (xs, lo) and (xs, hi), in pixel coordinates. */
export function drawBand(
  ctx: SKRSContext2D,
  xs: number[],
  lo: number[],
  hi: number[],
  color: string,
): void {
  if (xs.length === 0) return;
  ctx.save();
  ctx.fillStyle = color;
  ctx.beginPath();
  ctx.moveTo(xs[0], hi[0]);
  for (let i = 1; i < xs.length; i++) ctx.lineTo(xs[i], hi[i]);
  for (let i = xs.length - 1; i >= 0; i--) ctx.lineTo(xs[i], lo[i]);
  ctx.closePath();
  ctx.fill();
  ctx.restore();
}

export function drawLegend(
  ctx: SKRSContext2D,
  frame: Frame,
  entries: { label: string; color: string; dash?: number[] }[],
): void {
  ctx.save();
  ctx.font = FONT_SMALL;
  ctx.textAlign = "left";
  ctx.textBaseline = "middle";
  let px = frame.left + 10;
  const py = frame.top + 12;
  for (const e of entries) {
    ctx.strokeStyle = e.color;
    ctx.lineWidth = 2;
    ctx.setLineDash(e.dash ?? []);
    ctx.beginPath();
    ctx.moveTo(px, py);
    ctx.lineTo(px + 22, py);
    ctx.stroke();
    ctx.setLineDash([]);
    ctx.fillStyle = "#222222";
    ctx.fillText(e.label, px + 27, py);
    px += 27 + ctx.measureText(e.label).width + 18;
  }
  ctx.restore();
}
