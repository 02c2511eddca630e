import { readFileSync } from "node:fs";
import { fileURLToPath } from "node:url";
import { describe, expect, it } from "vitest";

import { buildDashboard, buildFormPage } from "../src/dashboard.js";
import { buildFormModel } from "../src/forms.js";
import { buildViewTree, renderToString } from "../src/render.js";
import type { FormDescriptor, ViewPayload } from "../src/types.js";

interface DashboardFixture {
  "as-of": string;
  views: Record<string, { status: string; payload: ViewPayload | null }>;
}

const fixturePath = fileURLToPath(new URL("../fixtures/dashboard-payloads.json", import.meta.url));
const fixture: DashboardFixture = JSON.parse(readFileSync(fixturePath, "utf-8"));

function payload(viewId: string): ViewPayload {
  const view = fixture.views[viewId];
  if (!view?.payload) throw new Error(`fixture lacks ${viewId}`);
  return view.payload;
}

describe("rendering is a pure function of the payload", () => {
  it("re-rendering every fixture payload yields an identical tree", () => {
    for (const viewId of Object.keys(fixture.views)) {
      const view = fixture.views[viewId];
      if (!view?.payload) continue;
      const first = buildViewTree(view.payload);
      const second = buildViewTree(JSON.parse(JSON.stringify(view.payload)));
      expect(second, viewId).toEqual(first);
      expect(renderToString(second)).toBe(renderToString(first));
    }
  });

  it("effort-deviation chart is structurally stable and complete", () => {
    const chart = buildViewTree(payload("vi-q2-1-1"));
    const html = renderToString(chart);
    expect(html).toContain('data-view-instance="vi-q2-1-1"');
    expect(html).toContain("<svg");
    expect(html).toContain("polyline");
    expect(html).toContain("act-requirements:deviation");
    // deviation flags visually distinguished
    expect(html).toContain("deviation-badge");
    expect(renderToString(buildViewTree(payload("vi-q2-1-1")))).toBe(html);
  });

  it("composite goal views drill down into their children", () => {
    const composite = buildViewTree(payload("vi-g-g2"));
    const html = renderToString(composite);
    expect(html).toContain("<details");
    expect(html).toContain('data-view-instance="vi-q2-1-1"');
  });

  it("traffic lights carry their status", () => {
    const light = buildViewTree(payload("vi-q1-1-1"));
    const html = renderToString(light);
    expect(html).toContain('data-status="green"');
  });

  it("milestone trend chart shows classification badges", () => {
    const trend = buildViewTree(payload("vi-q3-1-1"));
    const html = renderToString(trend);
    expect(html).toContain("trend-badge");
    expect(html).toContain('data-classification="delayed"');
  });

  it("tables render header and body rows", () => {
    const table = buildViewTree(payload("vi-q4-1-1"));
    const html = renderToString(table);
    expect(html).toContain("<th>person-id</th>");
    expect(html).toContain("<tbody>");
  });
});

describe("dashboard page assembly", () => {
  const envelopes = Object.entries(fixture.views).map(([id, view]) => ({
    "view-instance": id,
    role: view.payload?.role ?? "",
    status: view.status,
    payload: view.payload,
  }));

  it("nav lists views; content shows the selection", () => {
    const tree = buildDashboard({
      project: "proj-demo",
      role: "project-manager",
      roles: ["project-manager", "quality-assurance-manager"],
      views: envelopes,
      selected: "vi-g-g2",
      error: null,
      asOf: fixture["as-of"],
    });
    const html = renderToString(tree);
    expect(html).toContain('class="sidebar"');
    expect(html).toContain('data-view="vi-g-g2"');
    expect(html).toContain("evaluated as of");
  });

  it("service errors render inline with a retry control, never blank", () => {
    const tree = buildDashboard({
      project: "proj-demo", role: "project-manager", roles: ["project-manager"],
      views: [], selected: null, error: "not-configured: no catena", asOf: null,
    });
    const html = renderToString(tree);
    expect(html).toContain("error-box");
    expect(html).toContain('data-action="retry"');
  });

  it("a role with no views gets an explicit empty state", () => {
    const tree = buildDashboard({
      project: "proj-demo", role: "nobody", roles: ["nobody"],
      views: [], selected: null, error: null, asOf: null,
    });
    expect(renderToString(tree)).toContain("no views are defined");
  });
});

describe("schema-generated forms", () => {
  const descriptor: FormDescriptor = {
    instance: "wfi-m-actual-effort",
    form: { id: "wf-effort", "managed-data-type": "dt-effort-log" },
    "target-entry": "de-m-actual-effort",
    schema: {
      id: "dt-effort-log", kind: "effort-log", version: 1,
      schema: [
        { name: "person-id", type: "identifier", optional: false },
        { name: "activity-id", type: "identifier", optional: false },
        { name: "date", type: "timestamp", optional: false },
        { name: "hours", type: "duration-hours", optional: false },
      ],
    },
    capabilities: ["add"],
    "slot-data": {
      activities: {
        entry: "de-m-activity-list",
        records: [
          { id: "act-requirements", name: "Requirements" },
          { id: "act-design", name: "Design" },
        ],
      },
    },
  };

  it("derives fields from the managed schema", () => {
    const fields = buildFormModel(descriptor);
    expect(fields.map((f) => f.name)).toEqual(["person-id", "activity-id", "date", "hours"]);
    const activity = fields.find((f) => f.name === "activity-id")!;
    expect(activity.control).toBe("select");
    expect(activity.options).toEqual(["act-design", "act-requirements"]);
    expect(fields.find((f) => f.name === "hours")!.control).toBe("number");
    expect(fields.find((f) => f.name === "date")!.control).toBe("date");
  });

  it("renders the form page with rejection rows", () => {
    const tree = buildFormPage({
      descriptor,
      fields: buildFormModel(descriptor),
      clientRejections: [{ index: 0, reason: "records[0].hours: hours must be non-negative, got -1" }],
      serverRejections: [],
      acceptedCount: null,
    });
    const html = renderToString(tree);
    expect(html).toContain("form-row");
    expect(html).toContain("rejection client");
    expect(html).toContain("non-negative");
    // identical state renders identically
    expect(renderToString(buildFormPage({
      descriptor,
      fields: buildFormModel(descriptor),
      clientRejections: [{ index: 0, reason: "records[0].hours: hours must be non-negative, got -1" }],
      serverRejections: [],
      acceptedCount: null,
    }))).toBe(html);
  });
});
