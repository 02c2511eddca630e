/**
 * Pure rendering: view payload in, render tree out.
 *
 * The tree is plain data (tag / attrs / children / text), so re-rendering
 * the same payload yields a structurally identical tree; the dashboard
 * snapshot tests pin exactly that.  DOM creation is a separate, thin step.
 */

import type {
  ChartSeries,
  CompositeChild,
  MilestoneSeries,
  ViewEnvelope,
  ViewPayload,
} from "./types.js";
import { parseTimestamp } from "./validate.js";

export interface RenderNode {
  tag: string;
  attrs?: Record<string, string>;
  children?: RenderNode[];
  text?: string;
}

export function el(
  tag: string,
  attrs?: Record<string, string>,
  children?: RenderNode[],
  text?: string,
): RenderNode {
  const node: RenderNode = { tag };
  if (attrs && Object.keys(attrs).length) node.attrs = attrs;
  if (children && children.length) node.children = children;
  if (text !== undefined) node.text = text;
  return node;
}

const STATUS_COLORS: Record<string, string> = {
  green: "#16a34a",
  yellow: "#eab308",
  red: "#dc2626",
};

const SERIES_COLORS = ["#2563eb", "#dc2626", "#16a34a", "#9333ea", "#ea580c", "#0891b2"];

function titleOf(payload: ViewPayload): string {
  const title = payload.parameters?.["title"];
  return typeof title === "string" && title ? title : payload["view-instance"];
}

function numeric(value: unknown): number | null {
  if (typeof value === "number" && Number.isFinite(value)) return value;
  if (typeof value === "string") {
    const parsed = parseTimestamp(value);
    if (parsed) return parsed.epochMs;
  }
  return null;
}

function deviationBadge(payload: ViewPayload): RenderNode[] {
  if (!payload.deviations || payload.deviations.length === 0) return [];
  return [
    el("p", { class: "deviation-badge", "data-deviations": String(payload.deviations.length) },
      undefined, `⚠ ${payload.deviations.length} deviation flag(s)`),
  ];
}

interface ScaledPoint {
  x: number;
  y: number;
}

function buildChartSvg(seriesList: { name: string; points: [unknown, unknown][] }[],
                       bars: boolean): RenderNode {
  const width = 640;
  const height = 300;
  const margin = 46;
  const cleaned: { name: string; points: ScaledPoint[] }[] = [];
  const xs: number[] = [];
  const ys: number[] = [];
  for (const series of seriesList) {
    const points: ScaledPoint[] = [];
    for (const [rawX, rawY] of series.points) {
      const x = numeric(rawX);
      const y = numeric(rawY);
      if (x === null || y === null) continue;
      points.push({ x, y });
      xs.push(x);
      ys.push(y);
    }
    if (points.length) cleaned.push({ name: series.name, points });
  }
  if (!cleaned.length) {
    return el("svg", { viewBox: `0 0 ${width} ${height}`, class: "chart" }, [
      el("text", { x: String(width / 2), y: String(height / 2), "text-anchor": "middle" },
        undefined, "no data"),
    ]);
  }
  const xLo = Math.min(...xs);
  const xHi = Math.max(...xs) === xLo ? xLo + 1 : Math.max(...xs);
  const yLo = Math.min(...ys);
  const yHi = Math.max(...ys) === yLo ? yLo + 1 : Math.max(...ys);
  const px = (x: number) => margin + ((x - xLo) / (xHi - xLo)) * (width - 2 * margin);
  const py = (y: number) => height - margin - ((y - yLo) / (yHi - yLo)) * (height - 2 * margin);

  const children: RenderNode[] = [
    el("rect", {
      x: String(margin), y: String(margin),
      width: String(width - 2 * margin), height: String(height - 2 * margin),
      fill: "none", stroke: "#9ca3af",
    }),
  ];
  cleaned.forEach((series, index) => {
    const color = SERIES_COLORS[index % SERIES_COLORS.length]!;
    if (bars) {
      const barWidth = Math.max(2, (width - 2 * margin) / (series.points.length * (cleaned.length + 1)));
      for (const point of series.points) {
        children.push(el("rect", {
          x: (px(point.x) + index * barWidth).toFixed(1),
          y: py(point.y).toFixed(1),
          width: barWidth.toFixed(1),
          height: (height - margin - py(point.y)).toFixed(1),
          fill: color,
        }));
      }
    } else {
      const coords = series.points
        .map((p) => `${px(p.x).toFixed(1)},${py(p.y).toFixed(1)}`)
        .join(" ");
      children.push(el("polyline", {
        points: coords, fill: "none", stroke: color, "stroke-width": "1.5",
      }));
    }
    children.push(el("text", {
      x: String(margin + 6), y: String(margin + 14 + index * 15), fill: color, class: "legend",
    }, undefined, series.name));
  });
  return el("svg", { viewBox: `0 0 ${width} ${height}`, class: "chart" }, children);
}

function buildTable(payload: ViewPayload): RenderNode {
  const columns = payload.columns ?? [];
  const rows = payload.rows ?? [];
  return el("table", { class: "data-table" }, [
    el("thead", undefined, [
      el("tr", undefined, columns.map((c) => el("th", undefined, undefined, String(c)))),
    ]),
    el("tbody", undefined, rows.map((row) =>
      el("tr", undefined, row.map((cell) =>
        el("td", undefined, undefined, cell === null || cell === undefined ? "" : String(cell)))),
    )),
  ]);
}

function buildTrafficLight(payload: ViewPayload): RenderNode {
  const status = payload.status ?? "none";
  const color = STATUS_COLORS[status] ?? "#9ca3af";
  const scoreText =
    typeof payload.score === "number" ? ` (score ${payload.score.toFixed(2)})` : "";
  return el("div", { class: "traffic-light", "data-status": status }, [
    el("span", { class: "lamp", style: `background:${color}` }),
    el("span", { class: "status-text" }, undefined, `${status.toUpperCase()}${scoreText}`),
  ]);
}

function buildMilestoneChart(payload: ViewPayload): RenderNode {
  const groups = (payload.series ?? []) as MilestoneSeries[];
  const seriesList = groups.map((group) => ({
    name: group.classification
      ? `${group["milestone-id"]} (${group.classification})`
      : group["milestone-id"],
    points: group.points as [unknown, unknown][],
  }));
  const badges = groups.map((group) =>
    el("span", {
      class: "trend-badge",
      "data-classification": group.classification ?? "unknown",
    }, undefined, `${group["milestone-id"]}: ${group.classification ?? "n/a"}`));
  return el("div", { class: "milestone-trend" }, [
    buildChartSvg(seriesList, false),
    el("div", { class: "trend-badges" }, badges),
  ]);
}

function buildComposite(payload: ViewPayload): RenderNode {
  const children = (payload.children ?? []) as CompositeChild[];
  return el("div", { class: "composite" }, children.map((child) => {
    if (child.payload) {
      return el("details", { open: "", "data-view": child["view-instance"] }, [
        el("summary", undefined, undefined, titleOf(child.payload)),
        buildViewTree(child.payload),
      ]);
    }
    return el("p", { class: "missing-child" }, undefined,
      `${child["view-instance"]}: ${child.status}`);
  }));
}

/** Payload to render tree; same payload, same tree, always. */
export function buildViewTree(payload: ViewPayload): RenderNode {
  const body: RenderNode[] = [...deviationBadge(payload)];
  switch (payload["render-kind"]) {
    case "line-chart":
      body.push(buildChartSvg((payload.series ?? []) as ChartSeries[], false));
      break;
    case "bar-chart":
      body.push(buildChartSvg((payload.series ?? []) as ChartSeries[], true));
      break;
    case "table":
      body.push(buildTable(payload));
      break;
    case "traffic-light":
      body.push(buildTrafficLight(payload));
      break;
    case "milestone-trend-chart":
      body.push(buildMilestoneChart(payload));
      break;
    case "composite":
      body.push(buildComposite(payload));
      break;
    default:
      body.push(el("p", undefined, undefined, "unsupported view payload"));
  }
  return el("section", {
    class: `view view-${payload["render-kind"]}`,
    "data-view-instance": payload["view-instance"],
  }, [el("h3", undefined, undefined, titleOf(payload)), ...body]);
}

export function buildEnvelopeTree(envelope: ViewEnvelope): RenderNode {
  if (envelope.status === "ok" && envelope.payload) {
    return buildViewTree(envelope.payload);
  }
  return el("section", { class: "view view-unavailable" }, [
    el("h3", undefined, undefined, envelope["view-instance"]),
    el("p", { class: "view-status" }, undefined,
      `${envelope.status}: ${envelope.message ?? ""}`),
  ]);
}

/** Deterministic serialization used by snapshot tests and SSR-style output. */
export function renderToString(node: RenderNode): string {
  const attrs = node.attrs
    ? Object.keys(node.attrs).sort().map((k) => ` ${k}="${escapeAttr(node.attrs![k]!)}"`).join("")
    : "";
  const inner = (node.text !== undefined ? escapeText(node.text) : "") +
    (node.children ?? []).map(renderToString).join("");
  return `<${node.tag}${attrs}>${inner}</${node.tag}>`;
}

function escapeAttr(value: string): string {
  return value.replace(/&/g, "&amp;").replace(/"/g, "&quot;").replace(/</g, "&lt;");
}

function escapeText(value: string): string {
  return value.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

/** Materialize a render tree into real DOM nodes (browser side). */
export function toDom(node: RenderNode, doc: Document): Element {
  const svgTags = new Set(["svg", "rect", "polyline", "text", "circle", "line"]);
  const element = svgTags.has(node.tag)
    ? doc.createElementNS("http://www.w3.org/2000/svg", node.tag)
    : doc.createElement(node.tag);
  for (const [key, value] of Object.entries(node.attrs ?? {})) {
    element.setAttribute(key, value);
  }
  if (node.text !== undefined) element.appendChild(doc.createTextNode(node.text));
  for (const child of node.children ?? []) {
    element.appendChild(toDom(child, doc));
  }
  return element;
}
