/** Wire types mirrored from the service's JSON documents. */

export type ScalarType =
  | "timestamp"
  | "duration-hours"
  | "money"
  | "count"
  | "fraction"
  | "text"
  | "identifier";

export interface FieldDef {
  name: string;
  type: ScalarType;
  optional: boolean;
}

export interface DataTypeDef {
  id: string;
  kind: string;
  version: number;
  schema: FieldDef[];
  accumulation?: string;
  tags?: unknown[];
}

export type RenderKind =
  | "line-chart"
  | "bar-chart"
  | "table"
  | "traffic-light"
  | "milestone-trend-chart"
  | "composite";

export interface ChartSeries {
  name: string;
  points: [unknown, unknown][];
}

export interface MilestoneSeries {
  "milestone-id": string;
  points: [string, string][];
  classification: string | null;
}

export interface CompositeChild {
  "view-instance": string;
  status: string;
  payload: ViewPayload | null;
}

/** One rendered view instance; shape depends on the render kind. */
export interface ViewPayload {
  "view-instance": string;
  "render-kind": RenderKind;
  role: string;
  parameters: Record<string, unknown>;
  deviations: string[];
  series?: ChartSeries[] | MilestoneSeries[];
  columns?: string[];
  rows?: unknown[][];
  status?: string | null;
  score?: number | null;
  label?: string;
  children?: CompositeChild[];
}

export interface ViewEnvelope {
  "view-instance": string;
  role: string;
  status: string;
  message?: string;
  payload: ViewPayload | null;
}

export interface ViewsResponse {
  "as-of": string;
  views: ViewEnvelope[];
}

export interface SlotData {
  entry: string;
  records: Record<string, unknown>[];
}

export interface FormDescriptor {
  instance: string;
  form: { id: string; "managed-data-type": string };
  "target-entry": string;
  schema: DataTypeDef;
  capabilities: string[];
  "slot-data": Record<string, SlotData>;
}

export interface SubmissionResult {
  accepted: number;
  rejected: { index: number; reason: string }[];
  "payload-timestamp": string | null;
}

export interface DeviationRecord {
  id: string;
  source: string;
  subject: string;
  kind: string;
  severity: string;
  "raised-at": string;
  "data-as-of": string;
}
