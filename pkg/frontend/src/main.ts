/**
 * Browser bootstrap: fetch state from the service, render, wire events.
 *
 * URL parameters select the project and service base:
 *   index.html?project=proj-demo&base=http://localhost:8000&role=project-manager
 */

import { ApiError, CockpitClient } from "./api.js";
import { buildDashboard, buildFormPage, type DashboardState } from "./dashboard.js";
import { buildFormModel, recordFromInputs, validateSubmission } from "./forms.js";
import { toDom } from "./render.js";
import type { FormDescriptor } from "./types.js";

const params = new URLSearchParams(window.location.search);
const project = params.get("project") ?? "proj-demo";
const base = params.get("base") ?? "";
const client = new CockpitClient(base, params.get("token"));

const state: DashboardState = {
  project,
  role: params.get("role") ?? "project-manager",
  roles: ["project-manager", "quality-assurance-manager"],
  views: [],
  selected: null,
  error: null,
  asOf: null,
};

let page: "dashboard" | "forms" = "dashboard";
let forms: FormDescriptor[] = [];
let activeForm: FormDescriptor | null = null;

async function loadViews(): Promise<void> {
  try {
    const response = await client.views(state.project, state.role);
    state.views = response.views;
    state.asOf = response["as-of"];
    state.error = null;
    if (!state.views.some((v) => v["view-instance"] === state.selected)) {
      state.selected = state.views[0]?.["view-instance"] ?? null;
    }
    const roles = new Set(state.roles);
    for (const view of state.views) if (view.role) roles.add(view.role);
    state.roles = [...roles].sort();
  } catch (error) {
    state.error = error instanceof ApiError
      ? `${error.code}: ${error.message}`
      : String(error);
  }
  render();
}

async function loadForms(): Promise<void> {
  try {
    forms = (await client.forms(state.project)).forms;
    state.error = null;
  } catch (error) {
    state.error = error instanceof ApiError
      ? `${error.code}: ${error.message}`
      : String(error);
  }
  render();
}

function render(): void {
  const root = document.getElementById("app");
  if (!root) return;
  root.replaceChildren();
  if (page === "dashboard") {
    root.appendChild(toDom(buildDashboard(state), document));
  } else {
    root.appendChild(toDom(buildDashboard({ ...state, views: state.views }), document));
    const content = root.querySelector("main.content");
    if (content) {
      content.replaceChildren();
      if (activeForm) {
        content.appendChild(toDom(buildFormPage({
          descriptor: activeForm,
          fields: buildFormModel(activeForm),
          clientRejections: [],
          serverRejections: [],
          acceptedCount: null,
        }), document));
      } else {
        for (const descriptor of forms) {
          const button = document.createElement("button");
          button.textContent = descriptor.instance;
          button.className = "open-form";
          button.dataset["form"] = descriptor.instance;
          content.appendChild(button);
        }
      }
    }
  }
  wire(root);
}

function wire(root: HTMLElement): void {
  root.querySelectorAll<HTMLButtonElement>("button.role").forEach((button) => {
    button.addEventListener("click", () => {
      state.role = button.dataset["role"] ?? state.role;
      state.selected = null;
      page = "dashboard";
      void loadViews();
    });
  });
  root.querySelectorAll<HTMLButtonElement>("button.view-link").forEach((button) => {
    button.addEventListener("click", () => {
      state.selected = button.dataset["view"] ?? null;
      page = "dashboard";
      render();
    });
  });
  root.querySelectorAll<HTMLButtonElement>("button.retry").forEach((button) => {
    button.addEventListener("click", () => void loadViews());
  });
  root.querySelectorAll<HTMLButtonElement>("button.forms-link").forEach((button) => {
    button.addEventListener("click", () => {
      page = "forms";
      activeForm = null;
      void loadForms();
    });
  });
  root.querySelectorAll<HTMLButtonElement>("button.open-form").forEach((button) => {
    button.addEventListener("click", () => {
      activeForm = forms.find((f) => f.instance === button.dataset["form"]) ?? null;
      render();
    });
  });
  const form = root.querySelector<HTMLFormElement>("form.entry-form");
  if (form && activeForm) {
    form.addEventListener("submit", (event) => {
      event.preventDefault();
      void submitForm(form, activeForm!);
    });
  }
}

async function submitForm(form: HTMLFormElement, descriptor: FormDescriptor): Promise<void> {
  const fields = buildFormModel(descriptor);
  const raw: Record<string, string> = {};
  for (const field of fields) {
    const input = form.querySelector<HTMLInputElement | HTMLSelectElement>(
      `[name="${field.name}"]`);
    raw[field.name] = input?.value ?? "";
  }
  const record = recordFromInputs(fields, raw);
  const records = Object.keys(record).length ? [record] : [];
  const clientSide = validateSubmission(descriptor.schema, records);
  let serverRejections: { index: number; reason: string }[] = [];
  let acceptedCount: number | null = null;
  if (clientSide.rejected.length === 0) {
    try {
      const result = await client.submit(descriptor.instance ? state.project : state.project,
        descriptor.instance, records, state.role);
      serverRejections = result.rejected;
      acceptedCount = result.accepted;
    } catch (error) {
      state.error = error instanceof ApiError
        ? `${error.code}: ${error.message}`
        : String(error);
    }
  }
  const content = document.querySelector("main.content");
  if (content) {
    content.replaceChildren(toDom(buildFormPage({
      descriptor,
      fields,
      clientRejections: clientSide.rejected,
      serverRejections,
      acceptedCount,
    }), document));
    const replaced = content.querySelector<HTMLFormElement>("form.entry-form");
    if (replaced) {
      replaced.addEventListener("submit", (event) => {
        event.preventDefault();
        void submitForm(replaced, descriptor);
      });
    }
  }
}

void loadViews();
