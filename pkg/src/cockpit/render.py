"""Static renderings of evaluated view payloads: text, HTML, SVG.

The HTML report is a single self-contained page (no scripts); charts are
inline vector graphics.
"""

from __future__ import annotations

import html
from datetime import datetime, timezone

from cockpit.interchange import parse_timestamp

_COLORS = ["#2563eb", "#dc2626", "#16a34a", "#9333ea", "#ea580c", "#0891b2",
           "#4d7c0f", "#be185d"]
_STATUS_COLORS = {"green": "#16a34a", "yellow": "#eab308", "red": "#dc2626"}


def _num(value) -> float | None:
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return float(value)
    if isinstance(value, str):
        try:
            return parse_timestamp(value).timestamp()
        except Exception:
            return None
    return None


def text_table(columns: list[str], rows: list[list]) -> str:
    cells = [[("" if v is None else str(v)) for v in row] for row in rows]
    widths = [len(c) for c in columns]
    for row in cells:
        for i, cell in enumerate(row):
            if i < len(widths):
                widths[i] = max(widths[i], len(cell))
    lines = [
        "  ".join(c.ljust(widths[i]) for i, c in enumerate(columns)),
        "  ".join("-" * w for w in widths),
    ]
    for row in cells:
        lines.append("  ".join(cell.ljust(widths[i]) for i, cell in enumerate(row)))
    return "\n".join(lines)


def render_payload_text(payload: dict, indent: str = "") -> str:
    kind = payload.get("render-kind", "")
    title = payload.get("parameters", {}).get("title") or payload.get("view-instance", "")
    lines = [f"{indent}== {title} [{kind}] =="]
    if payload.get("deviations"):
        lines.append(f"{indent}deviations: {', '.join(payload['deviations'])}")
    if kind in ("line-chart", "bar-chart"):
        for series in payload.get("series", []):
            points = series.get("points", [])
            preview = ", ".join(f"({p[0]}, {p[1]:g})" if isinstance(p[1], (int, float))
                                else f"({p[0]}, {p[1]})" for p in points[-3:])
            lines.append(f"{indent}  {series['name']}: {len(points)} point(s) {preview}")
    elif kind == "table":
        table = text_table(payload.get("columns", []), payload.get("rows", []))
        lines.extend(indent + "  " + line for line in table.splitlines())
    elif kind == "traffic-light":
        status = payload.get("status") or "n/a"
        score = payload.get("score")
        lines.append(f"{indent}  status: {status.upper()}"
                     + (f" (score {score:g})" if isinstance(score, (int, float)) else ""))
    elif kind == "milestone-trend-chart":
        for series in payload.get("series", []):
            lines.append(f"{indent}  {series['milestone-id']}: "
                         f"{series.get('classification') or 'n/a'} "
                         f"over {len(series.get('points', []))} report(s)")
    elif kind == "composite":
        for child in payload.get("children", []):
            if child.get("payload"):
                lines.append(render_payload_text(child["payload"], indent + "  "))
            else:
                lines.append(f"{indent}  -- {child.get('view-instance')}: {child.get('status')}")
    return "\n".join(lines)


def _svg_header(width: int, height: int) -> str:
    return (f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
            f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="11">')


def _scale(values: list[float], lo_pad: float = 0.05) -> tuple[float, float]:
    lo, hi = min(values), max(values)
    if hi == lo:
        hi = lo + 1.0
    pad = (hi - lo) * lo_pad
    return lo - pad, hi + pad


def _chart_svg(payload: dict, bars: bool = False, width: int = 640, height: int = 320) -> str:
    series_list = payload.get("series", [])
    margin = 50
    plot_w, plot_h = width - 2 * margin, height - 2 * margin
    title = payload.get("parameters", {}).get("title", "")
    parts = [_svg_header(width, height),
             f'<text x="{width / 2}" y="16" text-anchor="middle" font-size="13">{html.escape(str(title))}</text>']
    xs: list[float] = []
    ys: list[float] = []
    cleaned = []
    for series in series_list:
        points = []
        for p in series.get("points", []):
            x, y = _num(p[0]), _num(p[1])
            if x is None or y is None:
                continue
            points.append((x, y, p[0]))
        if points:
            cleaned.append((series.get("name", ""), points))
            xs.extend(p[0] for p in points)
            ys.extend(p[1] for p in points)
    if not cleaned:
        parts.append(f'<text x="{width / 2}" y="{height / 2}" text-anchor="middle">no data</text></svg>')
        return "".join(parts)
    x_lo, x_hi = _scale(xs)
    y_lo, y_hi = _scale(ys)

    def px(x: float) -> float:
        return margin + (x - x_lo) / (x_hi - x_lo) * plot_w

    def py(y: float) -> float:
        return height - margin - (y - y_lo) / (y_hi - y_lo) * plot_h

    parts.append(f'<rect x="{margin}" y="{margin}" width="{plot_w}" height="{plot_h}" '
                 'fill="none" stroke="#999"/>')
    for i, (name, points) in enumerate(cleaned):
        color = _COLORS[i % len(_COLORS)]
        if bars:
            bar_w = max(2.0, plot_w / (len(points) * (len(cleaned) + 1)))
            for x, y, _ in points:
                parts.append(f'<rect x="{px(x) + i * bar_w:.1f}" y="{py(y):.1f}" '
                             f'width="{bar_w:.1f}" height="{height - margin - py(y):.1f}" '
                             f'fill="{color}" opacity="0.85"/>')
        else:
            coords = " ".join(f"{px(x):.1f},{py(y):.1f}" for x, y, _ in points)
            parts.append(f'<polyline points="{coords}" fill="none" stroke="{color}" stroke-width="1.5"/>')
            for x, y, _ in points:
                parts.append(f'<circle cx="{px(x):.1f}" cy="{py(y):.1f}" r="2" fill="{color}"/>')
        parts.append(f'<rect x="{margin + 4}" y="{margin + 6 + i * 16}" width="10" height="10" fill="{color}"/>')
        parts.append(f'<text x="{margin + 18}" y="{margin + 15 + i * 16}">{html.escape(str(name))}</text>')

    def x_label(x: float) -> str:
        if xs and xs[0] > 1e8:  # timestamps
            return datetime.fromtimestamp(x, tz=timezone.utc).strftime("%Y-%m-%d")
        return f"{x:g}"

    parts.append(f'<text x="{margin}" y="{height - margin + 16}">{x_label(x_lo)}</text>')
    parts.append(f'<text x="{width - margin}" y="{height - margin + 16}" text-anchor="end">{x_label(x_hi)}</text>')
    parts.append(f'<text x="{margin - 6}" y="{height - margin}" text-anchor="end">{y_lo:.4g}</text>')
    parts.append(f'<text x="{margin - 6}" y="{margin + 10}" text-anchor="end">{y_hi:.4g}</text>')
    parts.append("</svg>")
    return "".join(parts)


def _milestone_svg(payload: dict) -> str:
    series = []
    for group in payload.get("series", []):
        label = group.get("milestone-id", "")
        classification = group.get("classification")
        if classification:
            label = f"{label} ({classification})"
        series.append({"name": label, "points": group.get("points", [])})
    return _chart_svg({"series": series, "parameters": payload.get("parameters", {})})


def _traffic_light_svg(payload: dict) -> str:
    status = payload.get("status") or "green"
    color = _STATUS_COLORS.get(status, "#999")
    title = payload.get("parameters", {}).get("title", "")
    score = payload.get("score")
    score_text = f" score {score:.2f}" if isinstance(score, (int, float)) else ""
    return ("".join([
        _svg_header(240, 80),
        f'<circle cx="40" cy="40" r="22" fill="{color}" stroke="#333"/>',
        f'<text x="75" y="36" font-size="13">{html.escape(str(title))}</text>',
        f'<text x="75" y="54">{html.escape(status.upper() + score_text)}</text>',
        "</svg>",
    ]))


def render_payload_svg(payload: dict) -> str:
    kind = payload.get("render-kind", "")
    if kind == "line-chart":
        return _chart_svg(payload)
    if kind == "bar-chart":
        return _chart_svg(payload, bars=True)
    if kind == "milestone-trend-chart":
        return _milestone_svg(payload)
    if kind == "traffic-light":
        return _traffic_light_svg(payload)
    if kind == "table":
        columns = payload.get("columns", [])
        rows = payload.get("rows", [])
        h = 40 + 18 * (len(rows) + 1)
        parts = [_svg_header(720, h)]
        for i, col in enumerate(columns):
            parts.append(f'<text x="{20 + i * 110}" y="30" font-weight="bold">{html.escape(str(col))}</text>')
        for r, row in enumerate(rows):
            for i, cell in enumerate(row):
                text = "" if cell is None else str(cell)
                parts.append(f'<text x="{20 + i * 110}" y="{48 + r * 18}">{html.escape(text[:16])}</text>')
        parts.append("</svg>")
        return "".join(parts)
    return _svg_header(240, 40) + '<text x="10" y="25">unsupported payload</text></svg>'


def _payload_html(payload: dict) -> str:
    kind = payload.get("render-kind", "")
    title = payload.get("parameters", {}).get("title") or payload.get("view-instance", "")
    parts = [f"<section><h3>{html.escape(str(title))}</h3>"]
    if payload.get("deviations"):
        flags = ", ".join(payload["deviations"])
        parts.append(f'<p class="deviations">&#9888; deviations: {html.escape(flags)}</p>')
    if kind == "table":
        parts.append("<table><thead><tr>")
        parts.extend(f"<th>{html.escape(str(c))}</th>" for c in payload.get("columns", []))
        parts.append("</tr></thead><tbody>")
        for row in payload.get("rows", []):
            parts.append("<tr>" + "".join(
                f"<td>{html.escape('' if v is None else str(v))}</td>" for v in row) + "</tr>")
        parts.append("</tbody></table>")
    elif kind == "composite":
        for child in payload.get("children", []):
            if child.get("payload"):
                parts.append(_payload_html(child["payload"]))
            else:
                parts.append(f"<p>{html.escape(str(child.get('view-instance')))}: "
                             f"{html.escape(str(child.get('status')))}</p>")
    else:
        parts.append(render_payload_svg(payload))
    parts.append("</section>")
    return "".join(parts)


_PAGE_STYLE = """
body { font-family: sans-serif; margin: 2rem; color: #1f2937; }
section { margin-bottom: 2rem; }
table { border-collapse: collapse; }
th, td { border: 1px solid #d1d5db; padding: 4px 10px; text-align: left; }
th { background: #f3f4f6; }
.deviations { color: #b45309; }
h1 { font-size: 1.4rem; } h3 { margin-bottom: .5rem; }
.meta { color: #6b7280; }
"""


def render_result_html(result_doc: dict) -> str:
    """One self-contained page over every rendered view of an evaluation."""
    views = result_doc.get("views", {})
    nested = set()
    for view in views.values():
        payload = view.get("payload") or {}
        for child in payload.get("children", []) or []:
            nested.add(child.get("view-instance"))
    parts = [
        "<!DOCTYPE html><html><head><meta charset='utf-8'>",
        "<title>project control report</title>",
        f"<style>{_PAGE_STYLE}</style></head><body>",
        "<h1>Project control report</h1>",
        f"<p class='meta'>as of {html.escape(str(result_doc.get('as-of', '')))} "
        f"| plan {html.escape(str(result_doc.get('provenance', '')))}</p>",
    ]
    deviations = result_doc.get("deviations", [])
    if deviations:
        parts.append("<section><h3>Deviations</h3><table><thead><tr>"
                     "<th>kind</th><th>subject</th><th>severity</th><th>data as of</th>"
                     "</tr></thead><tbody>")
        for dev in deviations:
            parts.append("<tr>" + "".join(
                f"<td>{html.escape(str(dev.get(k, '')))}</td>"
                for k in ("kind", "subject", "severity", "data-as-of")) + "</tr>")
        parts.append("</tbody></table></section>")
    for vid in sorted(views):
        if vid in nested:
            continue
        view = views[vid]
        if view.get("status") == "ok" and view.get("payload"):
            parts.append(_payload_html(view["payload"]))
        else:
            parts.append(f"<section><h3>{html.escape(vid)}</h3>"
                         f"<p>{html.escape(str(view.get('status')))}: "
                         f"{html.escape(str(view.get('message', '')))}</p></section>")
    parts.append("</body></html>")
    return "".join(parts)


def render_result_text(result_doc: dict) -> str:
    views = result_doc.get("views", {})
    nested = set()
    for view in views.values():
        payload = view.get("payload") or {}
        for child in payload.get("children", []) or []:
            nested.add(child.get("view-instance"))
    lines = [f"evaluation as of {result_doc.get('as-of', '')}"]
    deviations = result_doc.get("deviations", [])
    if deviations:
        lines.append(f"deviations ({len(deviations)}):")
        for dev in deviations:
            lines.append(f"  [{dev.get('severity')}] {dev.get('kind')} {dev.get('subject')} "
                         f"(data as of {dev.get('data-as-of')})")
    for vid in sorted(views):
        if vid in nested:
            continue
        view = views[vid]
        if view.get("status") == "ok" and view.get("payload"):
            lines.append(render_payload_text(view["payload"]))
        else:
            lines.append(f"== {vid} == {view.get('status')}: {view.get('message', '')}")
    return "\n".join(lines) + "\n"
