import { describe, expect, it } from "vitest";

import { buildFormModel, recordFromInputs, validateSubmission } from "../src/forms.js";
import type { DataTypeDef, FormDescriptor } from "../src/types.js";

const schema: DataTypeDef = {
  id: "dt-effort-log", kind: "effort-log", version: 1,
  schema: [
    { name: "person-id", type: "identifier", optional: false },
    { name: "activity-id", type: "identifier", optional: false },
    { name: "date", type: "timestamp", optional: false },
    { name: "hours", type: "duration-hours", optional: false },
  ],
};

const descriptor: FormDescriptor = {
  instance: "wfi-x",
  form: { id: "wf-effort", "managed-data-type": "dt-effort-log" },
  "target-entry": "de-x",
  schema,
  capabilities: ["add"],
  "slot-data": {},
};

describe("input assembly", () => {
  it("drops empty inputs so optional fields stay absent", () => {
    const fields = buildFormModel(descriptor);
    const record = recordFromInputs(fields, {
      "person-id": " p1 ", "activity-id": "a1", date: "2026-01-09", hours: "",
    });
    expect(record).toEqual({ "person-id": "p1", "activity-id": "a1", date: "2026-01-09" });
  });
});

describe("client-side batch validation", () => {
  it("flags exactly the bad rows with their indices", () => {
    const records = [
      { "person-id": "p1", "activity-id": "a1", date: "2026-01-09", hours: "3" },
      { "person-id": "p2", "activity-id": "a1", date: "2026-01-09", hours: "-1" },
      { "person-id": "p3", "activity-id": "a1", date: "junk", hours: "1" },
    ];
    const { accepted, rejected } = validateSubmission(schema, records);
    expect(accepted).toHaveLength(1);
    expect(rejected.map((r) => r.index)).toEqual([1, 2]);
    expect(rejected[0]!.reason).toContain("hours");
    expect(rejected[1]!.reason).toContain("timestamp");
  });

  it("accepts an empty submission as a no-op", () => {
    const { accepted, rejected } = validateSubmission(schema, []);
    expect(accepted).toHaveLength(0);
    expect(rejected).toHaveLength(0);
  });
});
