"""Shared domain types: annotated requirements documents and BPMN collaboration models.

All types are immutable value objects; transformations produce new instances.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Iterator, Mapping, Optional, Union


def normalize_name(name: str) -> str:
    """Collapse whitespace and casefold; the key form used for name matching."""
    return " ".join(name.split()).casefold()


class StatementClass(Enum):
    DATA = "D"
    INTERACTION = "I"
    LOCAL = "L"
    UNCLASSIFIED = "U"


@dataclass(frozen=True)
class Participant:
    id: str
    name: str
    aliases: frozenset[str] = frozenset()


@dataclass(frozen=True)
class DataObject:
    id: str
    name: str
    aliases: frozenset[str] = frozenset()
    parts: tuple[str, ...] = ()


@dataclass(frozen=True)
class DictionaryEntry:
    term: str
    definition: str = ""
    synonyms: frozenset[str] = frozenset()


@dataclass(frozen=True)
class Statement:
    id: str
    text: str
    cls: StatementClass = StatementClass.UNCLASSIFIED
    participants: tuple[str, ...] = ()
    data_refs: tuple[str, ...] = ()
    sender: Optional[str] = None
    receiver: Optional[str] = None
    payload: tuple[str, ...] = ()
    group_path: tuple[str, ...] = ()
    attributes: Mapping[str, str] = field(default_factory=dict)


@dataclass(frozen=True)
class GroupNode:
    """One node of a participant's statement-group tree."""

    name: str
    children: tuple["GroupNode", ...] = ()


@dataclass(frozen=True)
class RequirementsDocument:
    participants: tuple[Participant, ...] = ()
    data_objects: tuple[DataObject, ...] = ()
    dictionary: tuple[DictionaryEntry, ...] = ()
    statements: tuple[Statement, ...] = ()

    def participant_by_id(self, pid: str) -> Participant:
        for p in self.participants:
            if p.id == pid:
                return p
        raise KeyError(pid)

    def data_object_by_id(self, did: str) -> DataObject:
        for d in self.data_objects:
            if d.id == did:
                return d
        raise KeyError(did)

    def group_trees(self) -> dict[str, tuple[GroupNode, ...]]:
        """Group tree per participant, derived from Local statements' group paths.

        Sibling order follows the document order of each group's first statement.
        """
        # path -> insertion index, child names in first-seen order
        roots: dict[str, dict] = {}
        for stmt in self.statements:
            if stmt.cls is not StatementClass.LOCAL or not stmt.group_path:
                continue
            pid = stmt.participants[0] if stmt.participants else ""
            level = roots.setdefault(pid, {})
            for name in stmt.group_path:
                level = level.setdefault(name, {})

        def build(level: dict) -> tuple[GroupNode, ...]:
            return tuple(GroupNode(name, build(sub)) for name, sub in level.items())

        return {pid: build(level) for pid, level in roots.items()}


# --- BPMN collaboration model -------------------------------------------------


class TaskKind(Enum):
    SEND = "send"
    RECEIVE = "receive"
    GENERIC = "generic"


@dataclass(frozen=True)
class StartEvent:
    id: str


@dataclass(frozen=True)
class EndEvent:
    id: str


@dataclass(frozen=True)
class Task:
    id: str
    name: str
    kind: TaskKind = TaskKind.GENERIC


@dataclass(frozen=True)
class SequenceFlow:
    id: str
    source_id: str
    target_id: str


@dataclass(frozen=True)
class SubProcess:
    id: str
    name: str
    nodes: tuple["FlowNode", ...] = ()
    sequence_flows: tuple[SequenceFlow, ...] = ()


@dataclass(frozen=True)
class Store:
    """Data-repository node, a DFD-style extension to the BPMN palette."""

    id: str
    name: str
    data_object_id: str


FlowNode = Union[StartEvent, EndEvent, Task, SubProcess, Store]


@dataclass(frozen=True)
class MessageFlow:
    id: str
    source_id: str
    target_id: str
    payload: tuple[str, ...] = ()
    label: str = ""


@dataclass(frozen=True)
class Pool:
    id: str
    participant_id: str
    nodes: tuple[FlowNode, ...] = ()
    sequence_flows: tuple[SequenceFlow, ...] = ()


@dataclass(frozen=True)
class BpmnModel:
    pools: tuple[Pool, ...] = ()
    message_flows: tuple[MessageFlow, ...] = ()


@dataclass(frozen=True)
class TraceLink:
    statement_id: str
    element_ids: tuple[str, ...]


@dataclass(frozen=True)
class Violation:
    rule: str
    message: str
    element_ids: tuple[str, ...] = ()


def iter_scopes(model: BpmnModel) -> Iterator[tuple[str, tuple[FlowNode, ...], tuple[SequenceFlow, ...]]]:
    """Yield (scope id, direct nodes, direct flows) for every pool and sub-process."""
    stack: list[tuple[str, tuple[FlowNode, ...], tuple[SequenceFlow, ...]]] = [
        (pool.id, pool.nodes, pool.sequence_flows) for pool in model.pools
    ]
    while stack:
        scope = stack.pop(0)
        yield scope
        for node in scope[1]:
            if isinstance(node, SubProcess):
                stack.append((node.id, node.nodes, node.sequence_flows))


def iter_nodes(model: BpmnModel) -> Iterator[tuple[str, FlowNode]]:
    """Yield (pool id, node) for every node at any depth."""
    for pool in model.pools:
        stack = list(pool.nodes)
        while stack:
            node = stack.pop(0)
            yield pool.id, node
            if isinstance(node, SubProcess):
                stack.extend(node.nodes)


def find_node(model: BpmnModel, node_id: str) -> Optional[tuple[str, FlowNode]]:
    for pool_id, node in iter_nodes(model):
        if node.id == node_id:
            return pool_id, node
    return None


def validate_model(model: BpmnModel) -> list[Violation]:
    """Check the structural well-formedness rules; an empty list means the model is sound.

    Violations are data, not exceptions: invalid models are constructible on
    purpose (e.g. to test this function or to report schema errors on import).
    """
    violations: list[Violation] = []

    node_pools: dict[str, str] = {}
    seen: dict[str, int] = {}
    for pool_id, node in iter_nodes(model):
        node_pools.setdefault(node.id, pool_id)
        seen[node.id] = seen.get(node.id, 0) + 1
    for node_id, count in seen.items():
        if count > 1:
            violations.append(
                Violation("unique-node-ids", f"node id {node_id!r} appears {count} times", (node_id,))
            )

    for scope_id, nodes, flows in iter_scopes(model):
        direct_ids = {n.id for n in nodes}
        for flow in flows:
            missing = [e for e in (flow.source_id, flow.target_id) if e not in direct_ids]
            if missing:
                violations.append(
                    Violation(
                        "flow-scope",
                        f"sequence flow {flow.id!r} references nodes outside its scope {scope_id!r}: "
                        + ", ".join(repr(m) for m in missing),
                        (flow.id, *missing),
                    )
                )
        # connectivity and acyclicity over the scope's sequence-flow graph
        scoped = [f for f in flows if f.source_id in direct_ids and f.target_id in direct_ids]
        if len(nodes) > 1:
            neighbours: dict[str, set[str]] = {n.id: set() for n in nodes}
            for f in scoped:
                neighbours[f.source_id].add(f.target_id)
                neighbours[f.target_id].add(f.source_id)
            start = nodes[0].id
            reached = {start}
            frontier = [start]
            while frontier:
                for nxt in neighbours[frontier.pop()]:
                    if nxt not in reached:
                        reached.add(nxt)
                        frontier.append(nxt)
            unreached = sorted(direct_ids - reached)
            if unreached:
                violations.append(
                    Violation(
                        "scope-connected",
                        f"scope {scope_id!r} is not connected; unreachable: " + ", ".join(unreached),
                        (scope_id, *unreached),
                    )
                )
        out_edges: dict[str, list[str]] = {}
        for f in scoped:
            out_edges.setdefault(f.source_id, []).append(f.target_id)
        state: dict[str, int] = {}

        def has_cycle(node_id: str) -> bool:
            state[node_id] = 1
            for nxt in out_edges.get(node_id, ()):
                if state.get(nxt) == 1:
                    return True
                if state.get(nxt) is None and has_cycle(nxt):
                    return True
            state[node_id] = 2
            return False

        for n in nodes:
            if state.get(n.id) is None and has_cycle(n.id):
                violations.append(
                    Violation("scope-acyclic", f"scope {scope_id!r} contains a sequence-flow cycle", (scope_id,))
                )
                break

    for pool in model.pools:
        has_activity = any(isinstance(n, (Task, SubProcess)) for n in pool.nodes)
        if not has_activity:
            continue
        starts = [n for n in pool.nodes if isinstance(n, StartEvent)]
        ends = [n for n in pool.nodes if isinstance(n, EndEvent)]
        if len(starts) != 1:
            violations.append(
                Violation(
                    "pool-start-event",
                    f"pool {pool.id!r} has {len(starts)} start events at top level, expected exactly 1",
                    (pool.id,),
                )
            )
        if not ends:
            violations.append(
                Violation("pool-end-event", f"pool {pool.id!r} has no end event at top level", (pool.id,))
            )

    for flow in model.message_flows:
        source_pool = node_pools.get(flow.source_id)
        target_pool = node_pools.get(flow.target_id)
        missing = [e for e in (flow.source_id, flow.target_id) if e not in node_pools]
        if missing:
            violations.append(
                Violation(
                    "message-flow-endpoints",
                    f"message flow {flow.id!r} references unknown nodes: " + ", ".join(repr(m) for m in missing),
                    (flow.id, *missing),
                )
            )
        elif source_pool == target_pool:
            violations.append(
                Violation(
                    "message-flow-pools",
                    f"message flow {flow.id!r} connects two nodes of the same pool {source_pool!r}",
                    (flow.id, flow.source_id, flow.target_id),
                )
            )

    sources: dict[str, int] = {}
    targets: dict[str, int] = {}
    for flow in model.message_flows:
        sources[flow.source_id] = sources.get(flow.source_id, 0) + 1
        targets[flow.target_id] = targets.get(flow.target_id, 0) + 1
    for _, node in iter_nodes(model):
        if isinstance(node, Task) and node.kind is TaskKind.SEND:
            count = sources.get(node.id, 0)
            if count != 1:
                violations.append(
                    Violation(
                        "send-message-flow",
                        f"send task {node.id!r} is the source of {count} message flows, expected exactly 1",
                        (node.id,),
                    )
                )
        if isinstance(node, Task) and node.kind is TaskKind.RECEIVE:
            count = targets.get(node.id, 0)
            if count != 1:
                violations.append(
                    Violation(
                        "receive-message-flow",
                        f"receive task {node.id!r} is the target of {count} message flows, expected exactly 1",
                        (node.id,),
                    )
                )

    return violations


def canonicalize(name: str, dictionary: tuple[DictionaryEntry, ...] | list[DictionaryEntry]) -> str:
    """Resolve a surface name to its dictionary term, or to its normalized form.

    Matching is case-insensitive and whitespace-normalized; when the name
    matches an entry's term or any synonym, the entry's term is returned
    verbatim.
    """
    lookup: dict[str, str] = {}
    for entry in dictionary:
        lookup[normalize_name(entry.term)] = entry.term
        for synonym in entry.synonyms:
            lookup.setdefault(normalize_name(synonym), entry.term)
    return lookup.get(normalize_name(name), normalize_name(name))
