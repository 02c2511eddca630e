/**
 * Client-side record validation mirroring the service's schema semantics.
 *
 * The rules here must agree with the server on every record: a record the
 * server rejects must be rejected locally (and vice versa), so users see
 * failures before submitting.  The parity suite pins this against a
 * server-generated fixture corpus.
 */

import type { DataTypeDef, ScalarType } from "./types.js";

export type Verdict =
  | { ok: true; value: unknown }
  | { ok: false; reason: string };

export type RecordVerdict =
  | { ok: true; coerced: Record<string, unknown> }
  | { ok: false; reason: string };

// Date-only or date + time, optional seconds and fraction (3 or 6 digits,
// matching the service's parser), optional Z or numeric offset.
const TIMESTAMP_RE =
  /^(\d{4})-(\d{2})-(\d{2})(?:[T ](\d{2}):(\d{2})(?::(\d{2})(?:\.(\d{3}|\d{6}))?)?(Z|[+-]\d{2}:\d{2})?)?$/;

const DAYS_IN_MONTH = [31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31];

function isLeapYear(year: number): boolean {
  return (year % 4 === 0 && year % 100 !== 0) || year % 400 === 0;
}

interface ParsedTimestamp {
  epochMs: number;
}

export function parseTimestamp(raw: string): ParsedTimestamp | null {
  const m = TIMESTAMP_RE.exec(raw.trim());
  if (!m) return null;
  const year = Number(m[1]);
  const month = Number(m[2]);
  const day = Number(m[3]);
  if (month < 1 || month > 12) return null;
  const maxDay = month === 2 && isLeapYear(year) ? 29 : DAYS_IN_MONTH[month - 1]!;
  if (day < 1 || day > maxDay) return null;
  const hour = m[4] === undefined ? 0 : Number(m[4]);
  const minute = m[5] === undefined ? 0 : Number(m[5]);
  const second = m[6] === undefined ? 0 : Number(m[6]);
  if (hour > 23 || minute > 59 || second > 59) return null;
  const fraction = m[7] ? Number(`0.${m[7]}`) : 0;
  let epochMs = Date.UTC(year, month - 1, day, hour, minute, second) + fraction * 1000;
  const offset = m[8];
  if (offset && offset !== "Z") {
    const sign = offset.startsWith("-") ? -1 : 1;
    const offsetMinutes = sign * (Number(offset.slice(1, 3)) * 60 + Number(offset.slice(4, 6)));
    epochMs -= offsetMinutes * 60_000;
  }
  return { epochMs };
}

/** Normalized `YYYY-MM-DDTHH:MM:SSZ`, second precision, like the server. */
export function formatTimestamp(parsed: ParsedTimestamp): string {
  const date = new Date(Math.floor(parsed.epochMs / 1000) * 1000);
  return date.toISOString().replace(/\.\d{3}Z$/, "Z");
}

const NUMBER_RE = /^[+-]?(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?$/;
const SPECIAL_FLOATS: Record<string, number> = {
  nan: Number.NaN,
  inf: Number.POSITIVE_INFINITY,
  infinity: Number.POSITIVE_INFINITY,
  "-inf": Number.NEGATIVE_INFINITY,
  "-infinity": Number.NEGATIVE_INFINITY,
  "+inf": Number.POSITIVE_INFINITY,
  "+infinity": Number.POSITIVE_INFINITY,
};

/** Parse like the server parses numbers from text; null when unparseable. */
function parseNumber(value: unknown): number | null {
  if (typeof value === "boolean") return value ? 1 : 0;
  if (typeof value === "number") return value;
  if (typeof value !== "string") return null;
  const text = value.trim();
  const special = SPECIAL_FLOATS[text.toLowerCase()];
  if (special !== undefined) return special;
  if (!NUMBER_RE.test(text)) return null;
  return Number(text);
}

export function coerceValue(type: ScalarType, value: unknown, path: string): Verdict {
  if (value === null || value === undefined) {
    return { ok: false, reason: `${path}: value is missing` };
  }
  switch (type) {
    case "timestamp": {
      const parsed = parseTimestamp(String(value));
      if (!parsed) {
        return { ok: false, reason: `${path}: expected ISO-8601 timestamp, got ${JSON.stringify(value)}` };
      }
      return { ok: true, value: formatTimestamp(parsed) };
    }
    case "text":
      return { ok: true, value: String(value) };
    case "identifier": {
      const text = String(value).trim();
      if (!text) return { ok: false, reason: `${path}: identifier must be non-empty` };
      return { ok: true, value: text };
    }
    case "duration-hours":
    case "money":
    case "fraction": {
      const num = parseNumber(value);
      if (num === null) {
        return { ok: false, reason: `${path}: expected number, got ${JSON.stringify(value)}` };
      }
      if (!Number.isFinite(num)) {
        return { ok: false, reason: `${path}: expected finite number, got ${JSON.stringify(value)}` };
      }
      if (type === "duration-hours" && num < 0) {
        return { ok: false, reason: `${path}: hours must be non-negative, got ${num}` };
      }
      return { ok: true, value: num };
    }
    case "count": {
      if (typeof value === "boolean") return { ok: true, value: value ? 1 : 0 };
      let candidate: unknown = value;
      if (typeof value === "string") {
        const low = value.trim().toLowerCase();
        if (low === "true" || low === "yes") return { ok: true, value: 1 };
        if (low === "false" || low === "no") return { ok: true, value: 0 };
        candidate = low;
      }
      const num = parseNumber(candidate);
      if (num === null) {
        return { ok: false, reason: `${path}: expected count, got ${JSON.stringify(value)}` };
      }
      if (!Number.isFinite(num) || num < 0 || num !== Math.trunc(num)) {
        return { ok: false, reason: `${path}: expected non-negative integer, got ${JSON.stringify(value)}` };
      }
      return { ok: true, value: Math.trunc(num) };
    }
  }
}

/**
 * Validate one record against a data-type schema: coerce every declared
 * field, reject on the first offence, pass unknown fields through.
 */
export function validateRecord(
  dataType: DataTypeDef,
  record: Record<string, unknown>,
  path = "record",
): RecordVerdict {
  const coerced: Record<string, unknown> = {};
  for (const field of dataType.schema) {
    const value = record[field.name];
    if (value === undefined || value === null || value === "") {
      if (field.optional) continue;
      return { ok: false, reason: `${path}.${field.name}: missing mandatory field` };
    }
    const verdict = coerceValue(field.type, value, `${path}.${field.name}`);
    if (!verdict.ok) return verdict;
    coerced[field.name] = verdict.value;
  }
  const known = new Set(dataType.schema.map((f) => f.name));
  for (const key of Object.keys(record).sort()) {
    if (!known.has(key)) coerced[key] = record[key];
  }
  return { ok: true, coerced };
}

export interface RowRejection {
  index: number;
  reason: string;
}

/** Row-by-row validation of a submission batch, like the server's handler. */
export function validateBatch(
  dataType: DataTypeDef,
  records: Record<string, unknown>[],
): { accepted: Record<string, unknown>[]; rejected: RowRejection[] } {
  const accepted: Record<string, unknown>[] = [];
  const rejected: RowRejection[] = [];
  records.forEach((record, index) => {
    const verdict = validateRecord(dataType, record, `records[${index}]`);
    if (verdict.ok) accepted.push(verdict.coerced);
    else rejected.push({ index, reason: verdict.reason });
  });
  return { accepted, rejected };
}
