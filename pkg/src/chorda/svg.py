"""SVG rendering of layouted diagrams with BPMN-style glyphs."""

from __future__ import annotations

from xml.sax.saxutils import escape, quoteattr

from .layout import LayoutedDiagram, Rect
from .model import EndEvent, FlowNode, StartEvent, Store, SubProcess, Task, TaskKind

MARGIN = 20
FONT = "font-family=\"sans-serif\" font-size=\"11\""


def _fmt(value: float) -> str:
    return f"{value:g}"


def _text(x: float, y: float, content: str, anchor: str = "middle") -> str:
    return f'<text x="{_fmt(x)}" y="{_fmt(y)}" text-anchor="{anchor}" {FONT}>{escape(content)}</text>'


def _task_class(kind: TaskKind) -> str:
    return {TaskKind.SEND: "task send", TaskKind.RECEIVE: "task receive", TaskKind.GENERIC: "task"}[kind]


def _node_svg(node: FlowNode, rect: Rect, out: list[str]) -> None:
    x, y, w, h = rect.x, rect.y, rect.width, rect.height
    node_id = quoteattr(f"node-{node.id}")
    if isinstance(node, StartEvent):
        out.append(
            f'<circle id={node_id} class="event start-event" cx="{_fmt(x + w / 2)}" cy="{_fmt(y + h / 2)}" '
            f'r="{_fmt(w / 2)}" fill="white" stroke="black" stroke-width="1.5"/>'
        )
    elif isinstance(node, EndEvent):
        out.append(
            f'<circle id={node_id} class="event end-event" cx="{_fmt(x + w / 2)}" cy="{_fmt(y + h / 2)}" '
            f'r="{_fmt(w / 2)}" fill="white" stroke="black" stroke-width="3"/>'
        )
    elif isinstance(node, Task):
        out.append(
            f'<rect id={node_id} class="{_task_class(node.kind)}" x="{_fmt(x)}" y="{_fmt(y)}" '
            f'width="{_fmt(w)}" height="{_fmt(h)}" rx="10" fill="white" stroke="black"/>'
        )
        out.append(_text(x + w / 2, y + h / 2 + 4, node.name))
    elif isinstance(node, Store):
        out.append(
            f'<path id={node_id} class="store" d="M {_fmt(x + w)} {_fmt(y)} L {_fmt(x)} {_fmt(y)} '
            f'L {_fmt(x)} {_fmt(y + h)} L {_fmt(x + w)} {_fmt(y + h)}" fill="none" stroke="black"/>'
        )
        out.append(_text(x + w / 2, y + h / 2 + 4, node.name))
    elif isinstance(node, SubProcess):
        collapsed = not node.nodes
        css = "subprocess collapsed" if collapsed else "subprocess"
        out.append(
            f'<rect id={node_id} class="{css}" x="{_fmt(x)}" y="{_fmt(y)}" width="{_fmt(w)}" '
            f'height="{_fmt(h)}" rx="10" fill="none" stroke="black"/>'
        )
        out.append(_text(x + w / 2, y + 14, node.name))
        if collapsed:
            cx, cy = x + w / 2, y + h - 9
            out.append(
                f'<rect class="plus-box" x="{_fmt(cx - 7)}" y="{_fmt(cy - 7)}" width="14" height="14" '
                f'fill="white" stroke="black"/>'
            )
            out.append(
                f'<path class="plus-marker" d="M {_fmt(cx - 4)} {_fmt(cy)} L {_fmt(cx + 4)} {_fmt(cy)} '
                f'M {_fmt(cx)} {_fmt(cy - 4)} L {_fmt(cx)} {_fmt(cy + 4)}" stroke="black"/>'
            )


def _walk(nodes, diagram: LayoutedDiagram, out: list[str]) -> None:
    for node in nodes:
        _node_svg(node, diagram.geometry[node.id], out)
        if isinstance(node, SubProcess):
            _walk(node.nodes, diagram, out)


def _polyline(flow_id: str, css: str, points, dashed: bool, marker: str) -> str:
    rendered = " ".join(f"{_fmt(x)},{_fmt(y)}" for x, y in points)
    dash = ' stroke-dasharray="6 4"' if dashed else ""
    return (
        f'<polyline id={quoteattr(f"flow-{flow_id}")} class="{css}" points="{rendered}" fill="none" '
        f'stroke="black"{dash} marker-end="url(#{marker})"/>'
    )


def to_svg(diagram: LayoutedDiagram) -> str:
    """Render the diagram; equal diagrams yield identical bytes."""
    model = diagram.model
    width = max((r.x + r.width for r in diagram.geometry.values()), default=0) + MARGIN
    height = max((r.y + r.height for r in diagram.geometry.values()), default=0) + MARGIN
    out: list[str] = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_fmt(width)}" height="{_fmt(height)}" '
        f'viewBox="0 0 {_fmt(width)} {_fmt(height)}">',
        "<defs>",
        '<marker id="arrow" markerWidth="10" markerHeight="8" refX="9" refY="4" orient="auto">'
        '<path d="M 0 0 L 10 4 L 0 8 z" fill="black"/></marker>',
        '<marker id="open-arrow" markerWidth="10" markerHeight="8" refX="9" refY="4" orient="auto">'
        '<path d="M 0 0 L 10 4 L 0 8" fill="none" stroke="black"/></marker>',
        "</defs>",
    ]
    for pool in model.pools:
        rect = diagram.geometry[pool.id]
        out.append(f'<g class="pool" id={quoteattr(f"pool-{pool.id}")}>')
        out.append(
            f'<rect x="{_fmt(rect.x)}" y="{_fmt(rect.y)}" width="{_fmt(rect.width)}" '
            f'height="{_fmt(rect.height)}" fill="none" stroke="black"/>'
        )
        label_x = rect.x + 30
        out.append(
            f'<line x1="{_fmt(label_x)}" y1="{_fmt(rect.y)}" x2="{_fmt(label_x)}" '
            f'y2="{_fmt(rect.y + rect.height)}" stroke="black"/>'
        )
        cx, cy = rect.x + 15, rect.y + rect.height / 2
        out.append(
            f'<text x="{_fmt(cx)}" y="{_fmt(cy)}" text-anchor="middle" {FONT} '
            f'transform="rotate(-90 {_fmt(cx)} {_fmt(cy)})">{escape(pool.participant_id)}</text>'
        )
        _walk(pool.nodes, diagram, out)
        for flow_id, points in sorted(
            (f.id, diagram.waypoints[f.id])
            for f in _all_sequence_flows(pool.nodes, pool.sequence_flows)
        ):
            out.append(_polyline(flow_id, "sequence-flow", points, dashed=False, marker="arrow"))
        out.append("</g>")
    for flow in model.message_flows:
        out.append(_polyline(flow.id, "message-flow", diagram.waypoints[flow.id], dashed=True, marker="open-arrow"))
        points = diagram.waypoints[flow.id]
        mid_x = (points[0][0] + points[-1][0]) / 2
        mid_y = (points[0][1] + points[-1][1]) / 2
        out.append(_text(mid_x + 4, mid_y - 4, flow.label, anchor="start"))
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _all_sequence_flows(nodes, flows):
    out = list(flows)
    for node in nodes:
        if isinstance(node, SubProcess):
            out.extend(_all_sequence_flows(node.nodes, node.sequence_flows))
    return out
