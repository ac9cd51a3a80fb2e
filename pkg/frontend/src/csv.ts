/**
 * Readers for the experiment harness outputs.
 *
 * Two CSV schemas are consumed: reactor run traces
 * (n,t_min,C,T,q_c_applied,loss_n) and sweep summaries
 * (point,median,p25,p75).  Column checks are by name so a schema
 * mismatch says exactly which columns are missing.
 */

import { existsSync, readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import Papa from "papaparse";

export const TRACE_COLUMNS = ["n", "t_min", "C", "T", "q_c_applied", "loss_n"] as const;
export const SWEEP_COLUMNS = ["point", "median", "p25", "p75"] as const;

export interface TraceRow {
  n: number;
  t_min: number;
  C: number;
  T: number;
  q_c_applied: number;
  loss_n: number;
}

export interface SweepRow {
  point: number;
  median: number;
  p25: number;
  p75: number;
}

/** Reference schedule parameters needed for the overlay. */
export interface ReferenceParams {
  tSwitch: number;
  cRef: [number, number];
}

export class SchemaError extends Error {}

function parseCsv(path: string, required: readonly string[]): Record<string, number>[] {
  const text = readFileSync(path, "utf8");
  const parsed = Papa.parse<Record<string, number>>(text.trim(), {
    header: true,
    dynamicTyping: true,
    skipEmptyLines: true,
  });
  if (parsed.errors.length > 0) {
    throw new SchemaError(`${path}: ${parsed.errors[0].message}`);
  }
  const fields = parsed.meta.fields ?? [];
  const missing = required.filter((c) => !fields.includes(c));
  if (missing.length > 0) {
    throw new SchemaError(
      `${path}: missing column(s) ${missing.join(", ")} (found: ${fields.join(", ")})`,
    );
  }
  if (parsed.data.length === 0) {
    throw new SchemaError(`${path}: no data rows`);
  }
  for (const col of required) {
    for (const row of parsed.data) {
      if (typeof row[col] !== "number" || !Number.isFinite(row[col])) {
        throw new SchemaError(`${path}: non-numeric value in column ${col}`);
      }
    }
  }
  return parsed.data;
}

export function readTrace(path: string): TraceRow[] {
  return parseCsv(path, TRACE_COLUMNS) as unknown as TraceRow[];
}

export function readSweepSummary(path: string): SweepRow[] {
  return parseCsv(path, SWEEP_COLUMNS) as unknown as SweepRow[];
}

const DEFAULT_REFERENCE: ReferenceParams = { tSwitch: 3.0, cRef: [0.1, 0.12] };

/**
 * Reference schedule for the overlay: taken from the run's summary.json
 * (sitting next to the trace) when it overrides the plant parameters,
 * otherwise the standard protocol values.  Figures never recompute the
 * plant, they only re-read what the run recorded.
 */
export function referenceParams(tracePath: string): ReferenceParams {
  const summaryPath = join(dirname(tracePath), "summary.json");
  if (!existsSync(summaryPath)) return DEFAULT_REFERENCE;
  try {
    const summary = JSON.parse(readFileSync(summaryPath, "utf8"));
    const pp = summary?.config?.plant_params ?? {};
    const tSwitch = typeof pp.t_switch === "number" ? pp.t_switch : DEFAULT_REFERENCE.tSwitch;
    const cRef: [number, number] =
      Array.isArray(pp.c_ref) && pp.c_ref.length === 2
        ? [Number(pp.c_ref[0]), Number(pp.c_ref[1])]
        : DEFAULT_REFERENCE.cRef;
    return { tSwitch, cRef };
  } catch {
    return DEFAULT_REFERENCE; // unreadable summary is not the trace's fault
  }
}
