import { existsSync, mkdtempSync, readFileSync, statSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { fileURLToPath } from "node:url";
import type { Canvas } from "@napi-rs/canvas";
import { describe, expect, it, vi } from "vitest";

import { cliMain } from "../src/cli.js";
import { readSweepSummary, readTrace, referenceParams, type SweepRow, type TraceRow } from "../src/csv.js";
import {
  plotSingleRun,
  plotSweep,
  pngWithDpi,
  referencePolyline,
  writePng,
} from "../src/figures.js";

const FIXTURES = fileURLToPath(new URL("./fixtures", import.meta.url));
const REF = { tSwitch: 3.0, cRef: [0.1, 0.12] as [number, number] };

function syntheticTrace(n = 60, tEnd = 6.0): TraceRow[] {
  // C sits a visible offset above the reference so both lines rasterize
  const rows: TraceRow[] = [];
  for (let i = 0; i < n; i++) {
    const t = (i * tEnd) / (n - 1);
    const ref = t < 3.0 ? 0.1 : 0.12;
    rows.push({
      n: i,
      t_min: t,
      C: ref + 0.004,
      T: 438 + 0.5 * Math.sin(t),
      q_c_applied: 103 + t,
      loss_n: 10 ** (-1 - (3 * i) / n),
    });
  }
  return rows;
}

function redStripSpan(canvas: Canvas, yPx: number, xLeft: number, xRight: number): number[] {
  // x positions of reference-colored pixels in a thin horizontal strip
  const ctx = canvas.getContext("2d");
  const h = 5;
  const img = ctx.getImageData(xLeft, Math.round(yPx) - 2, xRight - xLeft, h).data;
  const xs: number[] = [];
  for (let i = 0; i < img.length; i += 4) {
    const r = img[i];
    const g = img[i + 1];
    const b = img[i + 2];
    if (r > 150 && g < 110 && b < 110) xs.push(xLeft + ((i / 4) % (xRight - xLeft)));
  }
  return xs;
}

describe("referencePolyline", () => {
  it("steps at the switch time", () => {
    const line = referencePolyline(REF, 0, 6.5);
    expect(line.t).toEqual([0, 3.0, 3.0, 6.5]);
    expect(line.y).toEqual([0.1, 0.1, 0.12, 0.12]);
  });

  it("collapses to one level when the window misses the switch", () => {
    expect(referencePolyline(REF, 3.5, 6).y).toEqual([0.12, 0.12]);
    expect(referencePolyline(REF, 0, 2).y).toEqual([0.1, 0.1]);
  });
});

describe("plotSingleRun", () => {
  it("renders three panels from a synthetic trace", () => {
    const { canvas } = plotSingleRun(syntheticTrace(), REF);
    expect(canvas.width).toBe(900);
    expect(canvas.height).toBe(1020);
  });

  it("draws the reference step at t = 3 in the concentration panel", () => {
    const { canvas, cPanel } = plotSingleRun(syntheticTrace(), REF);
    const { frame, x, y } = cPanel;
    const xSwitch = x(3.0);
    const left = Math.round(frame.left) + 2;
    const right = Math.round(frame.left + frame.width) - 2;

    const low = redStripSpan(canvas, y(0.1), left, right); // pre-switch level
    const high = redStripSpan(canvas, y(0.12), left, right); // post-switch level
    expect(low.length).toBeGreaterThan(10);
    expect(high.length).toBeGreaterThan(10);
    // the 0.1 level exists only before the switch, the 0.12 level only after
    expect(Math.max(...low)).toBeLessThanOrEqual(xSwitch + 3);
    expect(Math.min(...low)).toBeLessThan(xSwitch - 40);
    expect(Math.min(...high)).toBeGreaterThanOrEqual(xSwitch - 3);
    expect(Math.max(...high)).toBeGreaterThan(xSwitch + 40);
  });

  it("rejects an empty trace", () => {
    expect(() => plotSingleRun([], REF)).toThrow(/empty trace/);
  });

  it("renders the real headline trace", () => {
    const rows = readTrace(join(FIXTURES, "trace.csv"));
    const ref = referenceParams(join(FIXTURES, "trace.csv"));
    const { canvas } = plotSingleRun(rows, ref);
    const out = join(mkdtempSync(join(tmpdir(), "fig-")), "single.png");
    writePng(canvas, out);
    expect(statSync(out).size).toBeGreaterThan(10_000);
  });

  it("supports a linear loss axis", () => {
    const rows = syntheticTrace();
    const { canvas } = plotSingleRun(rows, REF, { logLoss: false });
    expect(canvas.width).toBe(900);
  });
});

describe("plotSweep", () => {
  it("renders the real sweep summary", () => {
    const rows = readSweepSummary(join(FIXTURES, "sweep_summary.csv"));
    const canvas = plotSweep(rows, "kbar-sweep");
    const out = join(mkdtempSync(join(tmpdir(), "fig-")), "sweep.png");
    writePng(canvas, out);
    expect(statSync(out).size).toBeGreaterThan(5_000);
  });

  it("handles a log x axis for ensemble-size sweeps", () => {
    const rows: SweepRow[] = [
      { point: 8, median: 480, p25: 340, p75: 570 },
      { point: 32, median: 32, p25: 21, p75: 44 },
      { point: 128, median: 2.2, p25: 1.7, p75: 2.9 },
    ];
    expect(plotSweep(rows, "n-sweep").width).toBe(680);
  });

  it("collapses the band onto the line when p25 = median = p75", () => {
    const rows: SweepRow[] = [1, 2, 3].map((p) => ({ point: p, median: 5, p25: 5, p75: 5 }));
    expect(plotSweep(rows, "kbar-sweep").width).toBe(680);
  });

  it("narrowing quartiles render a narrowing band", () => {
    const rows: SweepRow[] = [
      { point: 1, median: 10, p25: 1, p75: 100 },
      { point: 2, median: 10, p25: 5, p75: 20 },
      { point: 3, median: 10, p25: 9.8, p75: 10.2 },
    ];
    const canvas = plotSweep(rows, "kbar-sweep");
    const ctx = canvas.getContext("2d");
    // band color composited over white
    const isBand = (r: number, g: number, b: number) =>
      Math.abs(r - 199) <= 6 && Math.abs(g - 221) <= 6 && Math.abs(b - 236) <= 6;
    const countBand = (x0: number) => {
      const img = ctx.getImageData(x0, 0, 8, canvas.height).data;
      let c = 0;
      for (let i = 0; i < img.length; i += 4) {
        if (isBand(img[i], img[i + 1], img[i + 2])) c++;
      }
      return c;
    };
    // strips just inside the first and last sweep points
    const wide = countBand(110);
    const narrow = countBand(610);
    expect(wide).toBeGreaterThan(narrow * 2);
    expect(narrow).toBeGreaterThanOrEqual(0);
  });

  it("rejects an empty summary", () => {
    expect(() => plotSweep([], "kbar-sweep")).toThrow(/empty sweep summary/);
  });
});

describe("writePng", () => {
  it("stamps the requested dpi in a pHYs chunk", () => {
    const { canvas } = plotSingleRun(syntheticTrace(10), REF);
    const dir = mkdtempSync(join(tmpdir(), "fig-"));
    const out = join(dir, "dpi.png");
    writePng(canvas, out, 150);
    const buf = readFileSync(out);
    expect(buf.subarray(0, 4)).toEqual(Buffer.from([0x89, 0x50, 0x4e, 0x47]));
    const idx = buf.indexOf("pHYs");
    expect(idx).toBeGreaterThan(0);
    const ppm = buf.readUInt32BE(idx + 4);
    expect(ppm).toBe(Math.round(150 / 0.0254)); // 5906 px/m
    expect(buf.readUInt8(idx + 12)).toBe(1);
  });

  it("keeps the PNG decodable after the chunk insertion", async () => {
    const { canvas } = plotSingleRun(syntheticTrace(10), REF);
    const png = pngWithDpi(canvas.toBuffer("image/png"), 300);
    const { loadImage } = await import("@napi-rs/canvas");
    const img = await loadImage(png);
    expect(img.width).toBe(900);
  });
});

describe("cliMain", () => {
  const quiet = () => {
    const log = vi.spyOn(console, "log").mockImplementation(() => {});
    const err = vi.spyOn(console, "error").mockImplementation(() => {});
    return () => {
      log.mockRestore();
      err.mockRestore();
    };
  };

  it("renders a single-run figure end to end", () => {
    const restore = quiet();
    const out = join(mkdtempSync(join(tmpdir(), "fig-")), "fig1.png");
    const code = cliMain([
      "--input", join(FIXTURES, "trace.csv"),
      "--kind", "single-run",
      "--out", out,
    ]);
    restore();
    expect(code).toBe(0);
    expect(statSync(out).size).toBeGreaterThan(10_000);
  });

  it("renders a sweep figure end to end", () => {
    const restore = quiet();
    const out = join(mkdtempSync(join(tmpdir(), "fig-")), "fig3.png");
    const code = cliMain([
      "--input", join(FIXTURES, "sweep_summary.csv"),
      "--kind", "kbar-sweep",
      "--out", out,
    ]);
    restore();
    expect(code).toBe(0);
    expect(existsSync(out)).toBe(true);
  });

  it("fails without creating a file when the trace is empty", () => {
    const restore = quiet();
    const dir = mkdtempSync(join(tmpdir(), "fig-"));
    const empty = join(dir, "trace.csv");
    writeFileSync(empty, "n,t_min,C,T,q_c_applied,loss_n\n");
    const out = join(dir, "never.png");
    const code = cliMain(["--input", empty, "--kind", "single-run", "--out", out]);
    restore();
    expect(code).toBe(1);
    expect(existsSync(out)).toBe(false);
  });

  it("fails on a missing input file", () => {
    const restore = quiet();
    const code = cliMain([
      "--input", "/nonexistent/trace.csv",
      "--kind", "single-run",
      "--out", "/tmp/x.png",
    ]);
    restore();
    expect(code).toBe(1);
  });

  it("rejects unknown kinds at argument parsing", () => {
    const restore = quiet();
    const code = cliMain(["--input", "x.csv", "--kind", "pie", "--out", "y.png"]);
    restore();
    expect(code).toBe(2);
  });
});
