import { readFileSync } from "node:fs";
import { fileURLToPath } from "node:url";
import { describe, expect, it } from "vitest";

import type { DataTypeDef } from "../src/types.js";
import { coerceValue, parseTimestamp, validateBatch, validateRecord } from "../src/validate.js";

interface ParityCase {
  record: Record<string, unknown>;
  "server-accepts": boolean;
  reason?: string;
  coerced?: Record<string, unknown>;
}

interface ParityFixture {
  schema: DataTypeDef;
  cases: ParityCase[];
}

const fixturePath = fileURLToPath(new URL("../fixtures/form-parity.json", import.meta.url));
const fixture: ParityFixture = JSON.parse(readFileSync(fixturePath, "utf-8"));

describe("client/server validation parity", () => {
  it("agrees with the server verdict on every fixture case", () => {
    for (const parityCase of fixture.cases) {
      const verdict = validateRecord(fixture.schema, parityCase.record);
      expect(verdict.ok, JSON.stringify(parityCase.record)).toBe(parityCase["server-accepts"]);
    }
  });

  it("coerces accepted records to the server's canonical values", () => {
    for (const parityCase of fixture.cases) {
      if (!parityCase["server-accepts"] || !parityCase.coerced) continue;
      const verdict = validateRecord(fixture.schema, parityCase.record);
      if (verdict.ok) {
        expect(verdict.coerced).toEqual(parityCase.coerced);
      }
    }
  });

  it("never accepts a batch row the server rejects", () => {
    const records = fixture.cases.map((c) => c.record);
    const { rejected } = validateBatch(fixture.schema, records);
    const clientRejected = new Set(rejected.map((r) => r.index));
    fixture.cases.forEach((parityCase, index) => {
      if (!parityCase["server-accepts"]) {
        expect(clientRejected.has(index), JSON.stringify(parityCase.record)).toBe(true);
      }
    });
  });
});

describe("timestamp parsing", () => {
  it("accepts the documented forms", () => {
    for (const ok of ["2026-01-05", "2026-01-05T10:30", "2026-01-05 10:30:00",
                      "2026-01-05T10:30:00Z", "2026-01-05T10:30:00+02:00",
                      "2026-01-05T10:30:00.123456"]) {
      expect(parseTimestamp(ok), ok).not.toBeNull();
    }
  });

  it("rejects malformed dates", () => {
    for (const bad of ["05.01.2026", "2026-13-01", "2026-00-10", "2026-02-29",
                       "2026-01-05T25:00", "20260105", "next tuesday", ""]) {
      expect(parseTimestamp(bad), bad).toBeNull();
    }
  });

  it("accepts Feb 29 in leap years only", () => {
    expect(parseTimestamp("2028-02-29")).not.toBeNull();
    expect(parseTimestamp("2026-02-29")).toBeNull();
    expect(parseTimestamp("2000-02-29")).not.toBeNull();
    expect(parseTimestamp("2100-02-29")).toBeNull();
  });

  it("normalizes offsets to UTC", () => {
    const verdict = coerceValue("timestamp", "2026-01-05T10:00:00+02:00", "f");
    expect(verdict).toEqual({ ok: true, value: "2026-01-05T08:00:00Z" });
  });
});

describe("scalar coercion", () => {
  it("handles counts like the server", () => {
    expect(coerceValue("count", "true", "f")).toEqual({ ok: true, value: 1 });
    expect(coerceValue("count", "3.0", "f")).toEqual({ ok: true, value: 3 });
    expect(coerceValue("count", 2.5, "f").ok).toBe(false);
    expect(coerceValue("count", -1, "f").ok).toBe(false);
  });

  it("rejects negative and non-finite hours", () => {
    expect(coerceValue("duration-hours", -0.5, "f").ok).toBe(false);
    expect(coerceValue("duration-hours", "inf", "f").ok).toBe(false);
    expect(coerceValue("duration-hours", "7.5", "f")).toEqual({ ok: true, value: 7.5 });
  });

  it("trims identifiers and rejects blank ones", () => {
    expect(coerceValue("identifier", "  p1  ", "f")).toEqual({ ok: true, value: "p1" });
    expect(coerceValue("identifier", "   ", "f").ok).toBe(false);
  });
});
