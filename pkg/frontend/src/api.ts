/** Typed client for the cockpit service's JSON API. */

import type {
  DeviationRecord,
  FormDescriptor,
  SubmissionResult,
  ViewsResponse,
} from "./types.js";

export class ApiError extends Error {
  readonly code: string;
  readonly status: number;

  constructor(code: string, message: string, status: number) {
    super(message);
    this.code = code;
    this.status = status;
  }
}

async function parseError(response: Response): Promise<ApiError> {
  try {
    const body = (await response.json()) as { error?: { code?: string; message?: string } };
    return new ApiError(
      body.error?.code ?? "unknown",
      body.error?.message ?? response.statusText,
      response.status,
    );
  } catch {
    return new ApiError("unknown", response.statusText, response.status);
  }
}

export class CockpitClient {
  constructor(
    private readonly baseUrl: string = "",
    private readonly token: string | null = null,
  ) {}

  private headers(): Record<string, string> {
    const headers: Record<string, string> = { "Content-Type": "application/json" };
    if (this.token) headers["Authorization"] = `Bearer ${this.token}`;
    return headers;
  }

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const response = await fetch(`${this.baseUrl}${path}`, {
      method,
      headers: this.headers(),
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    if (!response.ok) throw await parseError(response);
    return (await response.json()) as T;
  }

  listProjects(): Promise<{ projects: string[] }> {
    return this.request("GET", "/projects");
  }

  views(project: string, role?: string, asOf?: string): Promise<ViewsResponse> {
    const params = new URLSearchParams();
    if (role) params.set("role", role);
    if (asOf) params.set("as_of", asOf);
    const query = params.toString();
    return this.request("GET", `/projects/${project}/views${query ? `?${query}` : ""}`);
  }

  forms(project: string): Promise<{ forms: FormDescriptor[] }> {
    return this.request("GET", `/projects/${project}/forms`);
  }

  submit(
    project: string,
    formInstance: string,
    records: Record<string, unknown>[],
    submitterRole: string,
    action = "add",
  ): Promise<SubmissionResult> {
    return this.request("POST", `/projects/${project}/forms/${formInstance}/submissions`, {
      "submitter-role": submitterRole,
      action,
      records,
    });
  }

  deviations(project: string): Promise<{ deviations: DeviationRecord[] }> {
    return this.request("GET", `/projects/${project}/deviations`);
  }

  checks(project: string, asOf?: string): Promise<{ pass: boolean; items: unknown[] }> {
    const query = asOf ? `?as_of=${encodeURIComponent(asOf)}` : "";
    return this.request("GET", `/projects/${project}/checks${query}`);
  }
}
