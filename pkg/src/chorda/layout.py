"""Deterministic auto-layout: pools stacked vertically, activities left to right.

Coordinates are abstract units, not pixels; renderers scale as needed.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .model import (
    BpmnModel,
    EndEvent,
    FlowNode,
    SequenceFlow,
    StartEvent,
    Store,
    SubProcess,
    Task,
    Violation,
    validate_model,
)

TASK_W, TASK_H = 120, 60
EVENT_SIZE = 30
STORE_W, STORE_H = 100, 60
SUB_MIN_W, SUB_MIN_H = 120, 60
SUB_PAD = 20
GAP_X = 40
POOL_PAD = 20
POOL_GAP = 40
POOL_LABEL_W = 30


class InvalidModelError(ValueError):
    def __init__(self, violations: list[Violation]):
        self.violations = violations
        super().__init__("; ".join(f"{v.rule}: {v.message}" for v in violations))


@dataclass(frozen=True)
class Rect:
    x: float
    y: float
    width: float
    height: float


@dataclass(frozen=True)
class LayoutedDiagram:
    model: BpmnModel
    geometry: dict[str, Rect] = field(default_factory=dict)
    waypoints: dict[str, tuple[tuple[float, float], ...]] = field(default_factory=dict)


_ID_NUM = re.compile(r"^([a-z]+)(\d+)$")


def _id_key(node_id: str) -> tuple:
    match = _ID_NUM.match(node_id)
    if match:
        return (0, match.group(1), int(match.group(2)))
    return (1, node_id, 0)


def _topo_order(nodes: tuple[FlowNode, ...], flows: tuple[SequenceFlow, ...]) -> list[FlowNode]:
    by_id = {n.id: n for n in nodes}
    indegree = {n.id: 0 for n in nodes}
    successors: dict[str, list[str]] = {n.id: [] for n in nodes}
    for f in flows:
        if f.source_id in by_id and f.target_id in by_id:
            indegree[f.target_id] += 1
            successors[f.source_id].append(f.target_id)
    ready = sorted((nid for nid, deg in indegree.items() if deg == 0), key=_id_key)
    order: list[FlowNode] = []
    while ready:
        nid = ready.pop(0)
        order.append(by_id[nid])
        changed = False
        for nxt in successors[nid]:
            indegree[nxt] -= 1
            if indegree[nxt] == 0:
                ready.append(nxt)
                changed = True
        if changed:
            ready.sort(key=_id_key)
    return order


def _node_size(node: FlowNode, sizes: dict[str, tuple[float, float]]) -> tuple[float, float]:
    if isinstance(node, (StartEvent, EndEvent)):
        return (EVENT_SIZE, EVENT_SIZE)
    if isinstance(node, Task):
        return (TASK_W, TASK_H)
    if isinstance(node, Store):
        return (STORE_W, STORE_H)
    return sizes[node.id]


def _measure(node: SubProcess, sizes: dict[str, tuple[float, float]]) -> None:
    for child in node.nodes:
        if isinstance(child, SubProcess):
            _measure(child, sizes)
    if not node.nodes:
        sizes[node.id] = (SUB_MIN_W, SUB_MIN_H)
        return
    order = _topo_order(node.nodes, node.sequence_flows)
    width = sum(_node_size(n, sizes)[0] for n in order) + GAP_X * (len(order) - 1)
    height = max(_node_size(n, sizes)[1] for n in order)
    sizes[node.id] = (max(width + 2 * SUB_PAD, SUB_MIN_W), max(height + 2 * SUB_PAD, SUB_MIN_H))


def _place_scope(
    nodes: tuple[FlowNode, ...],
    flows: tuple[SequenceFlow, ...],
    x: float,
    y: float,
    row_height: float,
    sizes: dict[str, tuple[float, float]],
    geometry: dict[str, Rect],
) -> None:
    cursor = x
    for node in _topo_order(nodes, flows):
        w, h = _node_size(node, sizes)
        top = y + (row_height - h) / 2
        geometry[node.id] = Rect(cursor, top, w, h)
        if isinstance(node, SubProcess) and node.nodes:
            inner_row = max(_node_size(n, sizes)[1] for n in _topo_order(node.nodes, node.sequence_flows))
            _place_scope(
                node.nodes,
                node.sequence_flows,
                cursor + SUB_PAD,
                top + (h - inner_row) / 2,
                inner_row,
                sizes,
                geometry,
            )
        cursor += w + GAP_X


def _scope_flows(nodes: tuple[FlowNode, ...], flows: tuple[SequenceFlow, ...]) -> list[SequenceFlow]:
    out = list(flows)
    for node in nodes:
        if isinstance(node, SubProcess):
            out.extend(_scope_flows(node.nodes, node.sequence_flows))
    return out


def layout(model: BpmnModel) -> LayoutedDiagram:
    """Compute geometry for every pool, node and flow of a valid model."""
    violations = validate_model(model)
    if violations:
        raise InvalidModelError(violations)

    sizes: dict[str, tuple[float, float]] = {}
    for pool in model.pools:
        for node in pool.nodes:
            if isinstance(node, SubProcess):
                _measure(node, sizes)

    geometry: dict[str, Rect] = {}
    y = 0.0
    for pool in model.pools:
        order = _topo_order(pool.nodes, pool.sequence_flows)
        row_height = max((_node_size(n, sizes)[1] for n in order), default=EVENT_SIZE)
        content_width = sum(_node_size(n, sizes)[0] for n in order) + GAP_X * max(0, len(order) - 1)
        pool_height = row_height + 2 * POOL_PAD
        pool_width = POOL_LABEL_W + POOL_PAD + content_width + POOL_PAD
        geometry[pool.id] = Rect(0.0, y, pool_width, pool_height)
        _place_scope(pool.nodes, pool.sequence_flows, POOL_LABEL_W + POOL_PAD, y + POOL_PAD, row_height, sizes, geometry)
        y += pool_height + POOL_GAP

    waypoints: dict[str, tuple[tuple[float, float], ...]] = {}
    for pool in model.pools:
        for flow in _scope_flows(pool.nodes, pool.sequence_flows):
            src = geometry[flow.source_id]
            tgt = geometry[flow.target_id]
            waypoints[flow.id] = (
                (src.x + src.width, src.y + src.height / 2),
                (tgt.x, tgt.y + tgt.height / 2),
            )
    for flow in model.message_flows:
        src = geometry[flow.source_id]
        tgt = geometry[flow.target_id]
        sx = src.x + src.width / 2
        downward = tgt.y >= src.y
        start_y = src.y + src.height if downward else src.y
        if tgt.x <= sx <= tgt.x + tgt.width:
            end_y = tgt.y if downward else tgt.y + tgt.height
            waypoints[flow.id] = ((sx, start_y), (sx, end_y))
        else:
            mid_y = tgt.y + tgt.height / 2
            end_x = tgt.x if sx < tgt.x else tgt.x + tgt.width
            waypoints[flow.id] = ((sx, start_y), (sx, mid_y), (end_x, mid_y))

    return LayoutedDiagram(model, geometry, waypoints)
