/**
 * Figure builders over the harness outputs.
 *
 * plotSingleRun: stacked panels of a reactor run trace — concentration
 * with the piecewise reference overlay, applied coolant flow, and the
 * per-step loss on a log axis.  plotSweep: median line with an
 * inter-quartile band over a sweep summary.  Rendering is fully
 * deterministic (fixed pixel layout, fixed fonts and colors), so two
 * runs over the same CSV produce identical PNG bytes.
 */

import { writeFileSync } from "node:fs";
import zlib from "node:zlib";
import { createCanvas, type Canvas, type SKRSContext2D } from "@napi-rs/canvas";

import type { ReferenceParams, SweepRow, TraceRow } from "./csv.js";
import { drawAxes, drawBand, drawLegend, drawMarkers, drawPolyline, type Frame } from "./draw.js";
import { linearScale, logScale, padded, type Scale } from "./scales.js";

export const COLORS = {
  series: "#1f77b4",
  reference: "#d62728",
  control: "#2ca02c",
  loss: "#9467bd",
  band: "rgba(31,119,180,0.25)",
};

export type SweepKind = "n-sweep" | "kbar-sweep";

export interface FigureOptions {
  logLoss?: boolean; // default true
}

export interface PanelLayout {
  frame: Frame;
  x: Scale;
  y: Scale;
}

export interface SingleRunFigure {
  canvas: Canvas;
  cPanel: PanelLayout; // exposed so callers can locate data coordinates
}

function whiteCanvas(width: number, height: number): { canvas: Canvas; ctx: SKRSContext2D } {
  const canvas = createCanvas(width, height);
  const ctx = canvas.getContext("2d");
  ctx.fillStyle = "#ffffff";
  ctx.fillRect(0, 0, width, height);
  return { canvas, ctx };
}

/**
 * Piecewise-constant reference polyline over [t0, t1]: level cRef[0]
 * before the switch, cRef[1] from the switch on (the switch instant
 * belongs to the second regime).
 */
export function referencePolyline(
  ref: ReferenceParams,
  t0: number,
  t1: number,
): { t: number[]; y: number[] } {
  if (ref.tSwitch <= t0) return { t: [t0, t1], y: [ref.cRef[1], ref.cRef[1]] };
  if (ref.tSwitch > t1) return { t: [t0, t1], y: [ref.cRef[0], ref.cRef[0]] };
  return {
    t: [t0, ref.tSwitch, ref.tSwitch, t1],
    y: [ref.cRef[0], ref.cRef[0], ref.cRef[1], ref.cRef[1]],
  };
}

export function plotSingleRun(
  rows: TraceRow[],
  ref: ReferenceParams,
  opts: FigureOptions = {},
): SingleRunFigure {
  if (rows.length === 0) throw new Error("empty trace");
  const logLoss = opts.logLoss !== false;

  const W = 900;
  const H = 1020;
  const left = 86;
  const width = W - left - 24;
  const panelH = 272;
  const gap = 46;
  const top0 = 30;
  const { canvas, ctx } = whiteCanvas(W, H);

  const t = rows.map((r) => r.t_min);
  const x = linearScale([t[0], t[t.length - 1]], [left, left + width]);

  const frames: Frame[] = [0, 1, 2].map((i) => ({
    left,
    top: top0 + i * (panelH + gap),
    width,
    height: panelH,
  }));
  const yRange = (f: Frame): [number, number] => [f.top + f.height, f.top]; // px y grows down

  // panel 1: concentration and its reference
  const refLine = referencePolyline(ref, t[0], t[t.length - 1]);
  const c = rows.map((r) => r.C);
  const yC = linearScale(padded([...c, ...refLine.y]), yRange(frames[0]));
  drawAxes(ctx, frames[0], x, yC, { yLabel: "C [mol/l]", xTicks: false });
  drawPolyline(ctx, refLine.t.map(x), refLine.y.map(yC), {
    color: COLORS.reference,
    width: 2,
    dash: [7, 4],
  });
  drawPolyline(ctx, t.map(x), c.map(yC), { color: COLORS.series, width: 1.8 });
  drawLegend(ctx, frames[0], [
    { label: "C", color: COLORS.series },
    { label: "reference", color: COLORS.reference, dash: [7, 4] },
  ]);

  // panel 2: applied control
  const u = rows.map((r) => r.q_c_applied);
  const yU = linearScale(padded(u), yRange(frames[1]));
  drawAxes(ctx, frames[1], x, yU, { yLabel: "q_c [l/min]", xTicks: false });
  drawPolyline(ctx, t.map(x), u.map(yU), { color: COLORS.control, width: 1.8 });

  // panel 3: per-step loss
  const loss = rows.map((r) => r.loss_n);
  const minPos = Math.min(...loss.filter((v) => v > 0));
  const useLog = logLoss && Number.isFinite(minPos);
  const yL = useLog
    ? logScale([minPos, Math.max(...loss)], yRange(frames[2]))
    : linearScale(padded(loss), yRange(frames[2]));
  const lossClamped = useLog ? loss.map((v) => Math.max(v, minPos)) : loss;
  drawAxes(ctx, frames[2], x, yL, { xLabel: "t [min]", yLabel: "loss" });
  drawPolyline(ctx, t.map(x), lossClamped.map(yL), { color: COLORS.loss, width: 1.8 });

  return { canvas, cPanel: { frame: frames[0], x, y: yC } };
}

export function plotSweep(rows: SweepRow[], kind: SweepKind, opts: FigureOptions = {}): Canvas {
  if (rows.length === 0) throw new Error("empty sweep summary");
  const logLoss = opts.logLoss !== false;

  const W = 680;
  const H = 440;
  const frame: Frame = { left: 86, top: 28, width: W - 86 - 24, height: H - 28 - 64 };
  const { canvas, ctx } = whiteCanvas(W, H);

  const pts = rows.map((r) => r.point);
  const x =
    kind === "n-sweep"
      ? logScale([Math.min(...pts), Math.max(...pts)], [frame.left, frame.left + frame.width])
      : linearScale(padded(pts, 0.04), [frame.left, frame.left + frame.width]);

  const everything = rows.flatMap((r) => [r.median, r.p25, r.p75]);
  const minPos = Math.min(...everything.filter((v) => v > 0));
  const useLog = logLoss && Number.isFinite(minPos);
  const clamp = (v: number) => (useLog ? Math.max(v, minPos) : v);
  const y = useLog
    ? logScale([minPos, Math.max(...everything)], [frame.top + frame.height, frame.top])
    : linearScale(padded(everything), [frame.top + frame.height, frame.top]);

  const xLabel = kind === "n-sweep" ? "ensemble size N" : "inner iterations k";
  drawAxes(ctx, frame, x, y, { xLabel, yLabel: "total loss" });

  const xs = pts.map(x);
  drawBand(ctx, xs, rows.map((r) => y(clamp(r.p25))), rows.map((r) => y(clamp(r.p75))), COLORS.band);
  drawPolyline(ctx, xs, rows.map((r) => y(clamp(r.median))), { color: COLORS.series, width: 2 });
  drawMarkers(ctx, xs, rows.map((r) => y(clamp(r.median))), COLORS.series);
  drawLegend(ctx, frame, [{ label: "median (band: p25..p75)", color: COLORS.series }]);

  return canvas;
}

/** Insert a pHYs chunk so the PNG carries its physical resolution. */
export function pngWithDpi(png: Buffer, dpi: number): Buffer {
  const ppm = Math.round(dpi / 0.0254);
  const chunk = Buffer.alloc(21);
  chunk.writeUInt32BE(9, 0);
  chunk.write("pHYs", 4);
  chunk.writeUInt32BE(ppm, 8);
  chunk.writeUInt32BE(ppm, 12);
  chunk.writeUInt8(1, 16); // unit: meters
  const crc32 = (zlib as unknown as { crc32: (b: Uint8Array) => number }).crc32;
  chunk.writeUInt32BE(crc32(chunk.subarray(4, 17)) >>> 0, 17);
  // after the 8-byte signature and the 25-byte IHDR chunk
  return Buffer.concat([png.subarray(0, 33), chunk, png.subarray(33)]);
}

export function writePng(canvas: Canvas, outPath: string, dpi = 150): void {
  writeFileSync(outPath, pngWithDpi(canvas.toBuffer("image/png"), dpi));
}
