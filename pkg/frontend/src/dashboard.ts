/**
 * Page assembly: navigation bar, view menu, content pane, and form pages.
 *
 * Everything here returns render trees; event wiring happens in the
 * browser bootstrap so these builders stay pure and snapshot-testable.
 */

import type { FormDescriptor, ViewEnvelope } from "./types.js";
import type { RowRejection } from "./validate.js";
import { buildEnvelopeTree, el, type RenderNode } from "./render.js";
import type { FormFieldModel } from "./forms.js";

export interface DashboardState {
  project: string;
  role: string;
  roles: string[];
  views: ViewEnvelope[];
  selected: string | null;
  error: string | null;
  asOf: string | null;
}

export function buildNav(state: DashboardState): RenderNode {
  const roleItems = state.roles.map((role) =>
    el("li", undefined, [
      el("button", {
        class: role === state.role ? "role active" : "role",
        "data-role": role,
      }, undefined, role),
    ]));
  const viewItems = state.views.map((view) =>
    el("li", undefined, [
      el("button", {
        class: view["view-instance"] === state.selected ? "view-link active" : "view-link",
        "data-view": view["view-instance"],
      }, undefined, viewLabel(view)),
    ]));
  return el("nav", { class: "sidebar" }, [
    el("h2", undefined, undefined, state.project),
    el("h4", undefined, undefined, "Roles"),
    el("ul", { class: "roles" }, roleItems),
    el("h4", undefined, undefined, "Views"),
    state.views.length
      ? el("ul", { class: "view-menu" }, viewItems)
      : el("p", { class: "empty" }, undefined, "no views for this role"),
    el("h4", undefined, undefined, "Data entry"),
    el("ul", { class: "form-menu" }, [
      el("li", undefined, [el("button", { class: "forms-link", "data-page": "forms" },
        undefined, "manual data entry forms")]),
    ]),
  ]);
}

function viewLabel(view: ViewEnvelope): string {
  const title = view.payload?.parameters?.["title"];
  if (typeof title === "string" && title) return title;
  return view["view-instance"];
}

export function buildContent(state: DashboardState): RenderNode {
  if (state.error) {
    return el("main", { class: "content" }, [
      el("div", { class: "error-box" }, [
        el("p", undefined, undefined, `service error: ${state.error}`),
        el("button", { class: "retry", "data-action": "retry" }, undefined, "retry"),
      ]),
    ]);
  }
  if (!state.views.length) {
    return el("main", { class: "content" }, [
      el("p", { class: "empty-state" }, undefined,
        `no views are defined for role "${state.role}"`),
    ]);
  }
  const selected = state.views.find((v) => v["view-instance"] === state.selected)
    ?? state.views[0]!;
  return el("main", { class: "content" }, [
    state.asOf
      ? el("p", { class: "as-of" }, undefined, `evaluated as of ${state.asOf}`)
      : el("p", { class: "as-of" }, undefined, ""),
    buildEnvelopeTree(selected),
  ]);
}

export function buildDashboard(state: DashboardState): RenderNode {
  return el("div", { class: "dashboard" }, [buildNav(state), buildContent(state)]);
}

export interface FormPageState {
  descriptor: FormDescriptor;
  fields: FormFieldModel[];
  clientRejections: RowRejection[];
  serverRejections: RowRejection[];
  acceptedCount: number | null;
}

export function buildFormPage(state: FormPageState): RenderNode {
  const rows = state.fields.map((field) => {
    const label = el("label", { for: `field-${field.name}` }, undefined,
      field.optional ? field.name : `${field.name} *`);
    let input: RenderNode;
    if (field.control === "select") {
      input = el("select", { id: `field-${field.name}`, name: field.name },
        [el("option", { value: "" }, undefined, "choose...")].concat(
          (field.options ?? []).map((option) =>
            el("option", { value: option }, undefined, option))));
    } else {
      const typeAttr = field.control === "number" ? "number" : "text";
      const placeholder = field.type === "timestamp" ? "YYYY-MM-DD" : "";
      input = el("input", {
        id: `field-${field.name}`, name: field.name, type: typeAttr,
        placeholder, "data-scalar-type": field.type,
      });
    }
    return el("div", { class: "form-row" }, [label, input]);
  });

  const problems: RenderNode[] = [];
  for (const rejection of state.clientRejections) {
    problems.push(el("p", { class: "rejection client", "data-index": String(rejection.index) },
      undefined, `row ${rejection.index}: ${rejection.reason}`));
  }
  for (const rejection of state.serverRejections) {
    problems.push(el("p", { class: "rejection server", "data-index": String(rejection.index) },
      undefined, `row ${rejection.index} (server): ${rejection.reason}`));
  }
  const status = state.acceptedCount === null
    ? []
    : [el("p", { class: "submit-status" }, undefined,
        `${state.acceptedCount} record(s) accepted`)];

  return el("section", { class: "form-page", "data-form": state.descriptor.instance }, [
    el("h3", undefined, undefined,
      `${state.descriptor.form.id} → ${state.descriptor["target-entry"]}`),
    el("p", { class: "capabilities" }, undefined,
      `capabilities: ${state.descriptor.capabilities.join(", ")}`),
    el("form", { class: "entry-form" }, [
      ...rows,
      el("button", { type: "submit" }, undefined, "submit"),
    ]),
    el("div", { class: "problems" }, problems),
    ...status,
  ]);
}
