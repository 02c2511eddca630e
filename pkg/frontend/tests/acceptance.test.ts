/**
 * Browser-side acceptance: the schema-generated form agrees with the
 * server on every shared fixture record, and dashboard rendering is
 * structurally stable across re-renders.
 */

import { readFileSync } from "node:fs";
import { fileURLToPath } from "node:url";
import { afterAll, describe, expect, it } from "vitest";

import { buildViewTree, renderToString } from "../src/render.js";
import type { DataTypeDef, ViewPayload } from "../src/types.js";
import { validateRecord } from "../src/validate.js";

function load<T>(name: string): T {
  const path = fileURLToPath(new URL(`../fixtures/${name}`, import.meta.url));
  return JSON.parse(readFileSync(path, "utf-8")) as T;
}

interface ParityFixture {
  schema: DataTypeDef;
  cases: { record: Record<string, unknown>; "server-accepts": boolean }[];
}

interface DashboardFixture {
  views: Record<string, { status: string; payload: ViewPayload | null }>;
}

const verdicts: string[] = [];

afterAll(() => {
  for (const line of verdicts) console.log(line);
});

describe("acceptance: ui parity", () => {
  it("form validation matches the server verdict on the shared fixture set", () => {
    const fixture = load<ParityFixture>("form-parity.json");
    let agreed = 0;
    for (const parityCase of fixture.cases) {
      const verdict = validateRecord(fixture.schema, parityCase.record);
      expect(verdict.ok, JSON.stringify(parityCase.record)).toBe(parityCase["server-accepts"]);
      agreed += 1;
    }
    expect(agreed).toBe(fixture.cases.length);
    verdicts.push(`ACCEPTANCE 10a [form validation parity]: PASS (${agreed} records)`);
  });

  it("the effort-deviation dashboard snapshot is stable across re-renders", () => {
    const fixture = load<DashboardFixture>("dashboard-payloads.json");
    const payload = fixture.views["vi-q2-1-1"]?.payload;
    expect(payload).toBeTruthy();
    const renders = Array.from({ length: 5 }, () =>
      renderToString(buildViewTree(JSON.parse(JSON.stringify(payload)))));
    expect(new Set(renders).size).toBe(1);
    expect(renders[0]).toContain("act-requirements:deviation");
    verdicts.push("ACCEPTANCE 10b [dashboard snapshot stability]: PASS");
  });
});
