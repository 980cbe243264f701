"""Choreography skeleton generation from Interaction statements.

Every interaction becomes a send task in the sender's pool plus a receive
task and an (initially empty) processing sub-process in the receiver's pool,
joined by a message flow. Pools chain their activities in document order
between a start and an end event.
"""

from __future__ import annotations

from .classify import ClassificationIssue, validate_classification
from .model import (
    BpmnModel,
    EndEvent,
    FlowNode,
    MessageFlow,
    Pool,
    RequirementsDocument,
    SequenceFlow,
    StartEvent,
    StatementClass,
    Store,
    SubProcess,
    Task,
    TaskKind,
    TraceLink,
)


class ClassificationError(ValueError):
    """Raised when generation is attempted on a document that is not ready."""

    def __init__(self, issues: list[ClassificationIssue]):
        self.issues = issues
        summary = "; ".join(f"{i.statement_id}: {i.message}" for i in issues)
        super().__init__(f"document has classification issues: {summary}")


def flow_id(source_id: str, target_id: str) -> str:
    """Flow ids are content-derived so they stay stable across re-generation."""
    return f"f_{source_id}_{target_id}"


def chain_flows(nodes: tuple[FlowNode, ...]) -> tuple[SequenceFlow, ...]:
    """Sequence flows for a scope: consecutive chain plus task-to-store branches.

    Store nodes sit next to the task that feeds them but stay out of the chain.
    """
    flows: list[SequenceFlow] = []
    chain = [n for n in nodes if not isinstance(n, Store)]
    for left, right in zip(chain, chain[1:]):
        flows.append(SequenceFlow(flow_id(left.id, right.id), left.id, right.id))
    previous: FlowNode | None = None
    for node in nodes:
        if isinstance(node, Store) and previous is not None:
            flows.append(SequenceFlow(flow_id(previous.id, node.id), previous.id, node.id))
        else:
            previous = node
    return tuple(flows)


def payload_label(doc: RequirementsDocument, payload: tuple[str, ...]) -> str:
    return ", ".join(doc.data_object_by_id(did).name for did in payload)


def generate_skeleton(doc: RequirementsDocument) -> tuple[BpmnModel, list[TraceLink]]:
    """Build the collaboration skeleton and one trace link per interaction."""
    issues = validate_classification(doc)
    if issues:
        raise ClassificationError(issues)

    interactions = [s for s in doc.statements if s.cls is StatementClass.INTERACTION]

    pool_order: list[str] = []
    for stmt in interactions:
        for pid in (stmt.sender, stmt.receiver):
            if pid not in pool_order:
                pool_order.append(pid)  # type: ignore[arg-type]

    pool_ids = {pid: f"p{k}" for k, pid in enumerate(pool_order, start=1)}
    # symbolic build first; real node ids are assigned pool by pool afterwards
    pool_nodes: dict[str, list] = {pid: [] for pid in pool_order}
    process_names: dict[str, set[str]] = {pid: set() for pid in pool_order}
    plans = []  # (statement, send placeholder, receive placeholder, process placeholder)

    for stmt in interactions:
        label = payload_label(doc, stmt.payload)
        send = ["task", f"Send {label}", TaskKind.SEND]
        receive = ["task", f"Receive {label}", TaskKind.RECEIVE]
        base = f"Process {label}"
        name = base
        suffix = 2
        while name in process_names[stmt.receiver]:
            name = f"{base} ({suffix})"
            suffix += 1
        process_names[stmt.receiver].add(name)
        process = ["subprocess", name]
        pool_nodes[stmt.sender].append(send)
        pool_nodes[stmt.receiver].append(receive)
        pool_nodes[stmt.receiver].append(process)
        plans.append((stmt, send, receive, process, label))

    counter = 0

    def next_node_id() -> str:
        nonlocal counter
        counter += 1
        return f"n{counter}"

    pools: list[Pool] = []
    node_ids: dict[int, str] = {}
    for pid in pool_order:
        nodes: list[FlowNode] = [StartEvent(next_node_id())]
        for placeholder in pool_nodes[pid]:
            node_id = next_node_id()
            node_ids[id(placeholder)] = node_id
            if placeholder[0] == "task":
                nodes.append(Task(node_id, placeholder[1], placeholder[2]))
            else:
                nodes.append(SubProcess(node_id, placeholder[1]))
        nodes.append(EndEvent(next_node_id()))
        pools.append(Pool(pool_ids[pid], pid, tuple(nodes), chain_flows(tuple(nodes))))

    message_flows: list[MessageFlow] = []
    links: list[TraceLink] = []
    for stmt, send, receive, process, label in plans:
        send_id = node_ids[id(send)]
        receive_id = node_ids[id(receive)]
        process_id = node_ids[id(process)]
        message = MessageFlow(flow_id(send_id, receive_id), send_id, receive_id, stmt.payload, label)
        message_flows.append(message)
        links.append(
            TraceLink(
                stmt.id,
                (send_id, receive_id, process_id, flow_id(receive_id, process_id), message.id),
            )
        )

    return BpmnModel(tuple(pools), tuple(message_flows)), links
