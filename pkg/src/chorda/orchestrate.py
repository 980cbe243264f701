"""Top-down expansion of Local statements into the skeleton's pools and sub-processes.

Groups of Local statements are attached to sub-processes through explicit
bindings; unbound root groups and ungrouped statements land at the top level
of their participant's pool, which is created on demand for participants that
do not interact. Re-running expansion replaces previously expanded content.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

from .markup import display_text
from .model import (
    BpmnModel,
    EndEvent,
    FlowNode,
    Pool,
    RequirementsDocument,
    StartEvent,
    Statement,
    StatementClass,
    Store,
    SubProcess,
    Task,
    TaskKind,
    TraceLink,
    normalize_name,
)
from .skeleton import chain_flows, flow_id


@dataclass(frozen=True)
class GroupBinding:
    participant_id: str
    group_path: tuple[str, ...]
    target_sub_process_id: str


class BindingError(ValueError):
    pass


class ExpansionError(ValueError):
    pass


def _find_sub_process(nodes: tuple[FlowNode, ...], sub_id: str) -> Optional[SubProcess]:
    for node in nodes:
        if isinstance(node, SubProcess):
            if node.id == sub_id:
                return node
            nested = _find_sub_process(node.nodes, sub_id)
            if nested is not None:
                return nested
    return None


def _pool_of(model: BpmnModel, participant_id: str) -> Optional[Pool]:
    for pool in model.pools:
        if pool.participant_id == participant_id:
            return pool
    return None


def bind_group(
    model: BpmnModel,
    bindings: tuple[GroupBinding, ...],
    participant_id: str,
    group_path: tuple[str, ...],
    target_sub_process_id: str,
) -> tuple[GroupBinding, ...]:
    """Record one group binding; rebinding the same path replaces the old one."""
    pool = _pool_of(model, participant_id)
    if pool is None:
        raise BindingError(f"unknown participant {participant_id!r}: no pool in the model")
    if _find_sub_process(pool.nodes, target_sub_process_id) is None:
        for other in model.pools:
            if other.id != pool.id and _find_sub_process(other.nodes, target_sub_process_id) is not None:
                raise BindingError(
                    f"sub-process {target_sub_process_id!r} is in pool {other.id!r}, "
                    f"not in {participant_id!r}'s pool"
                )
        raise BindingError(f"unknown sub-process {target_sub_process_id!r}")
    binding = GroupBinding(participant_id, tuple(group_path), target_sub_process_id)
    replaced = False
    out: list[GroupBinding] = []
    for existing in bindings:
        if existing.participant_id == binding.participant_id and existing.group_path == binding.group_path:
            out.append(binding)
            replaced = True
        else:
            out.append(existing)
    if not replaced:
        out.append(binding)
    return tuple(out)


def bind_by_name(model: BpmnModel, doc: RequirementsDocument) -> tuple[GroupBinding, ...]:
    """Bind every root group whose name matches a sub-process in its pool.

    Matching is case-insensitive on the exact name; the first matching
    sub-process in model order wins.
    """
    bindings: tuple[GroupBinding, ...] = ()
    seen: set[tuple[str, str]] = set()
    for stmt in doc.statements:
        if stmt.cls is not StatementClass.LOCAL or not stmt.group_path or not stmt.participants:
            continue
        pid = stmt.participants[0]
        root = stmt.group_path[0]
        if (pid, normalize_name(root)) in seen:
            continue
        seen.add((pid, normalize_name(root)))
        pool = _pool_of(model, pid)
        if pool is None:
            continue
        match = _match_by_name(pool.nodes, root)
        if match is not None:
            bindings = bind_group(model, bindings, pid, (root,), match.id)
    return bindings


def _match_by_name(nodes: tuple[FlowNode, ...], name: str) -> Optional[SubProcess]:
    for node in nodes:
        if isinstance(node, SubProcess):
            if normalize_name(node.name) == normalize_name(name):
                return node
            nested = _match_by_name(node.nodes, name)
            if nested is not None:
                return nested
    return None


def unresolved_root_groups(
    model: BpmnModel, doc: RequirementsDocument, bindings: tuple[GroupBinding, ...]
) -> list[tuple[str, str]]:
    """Root groups with no binding whose participant already has a pool.

    These are flagged rather than silently attached at pool level; a root
    group of a pool-less participant is not listed because expansion
    legitimately creates that pool.
    """
    bound = {(b.participant_id, b.group_path) for b in bindings}
    out: list[tuple[str, str]] = []
    seen: set[tuple[str, str]] = set()
    for stmt in doc.statements:
        if stmt.cls is not StatementClass.LOCAL or not stmt.group_path or not stmt.participants:
            continue
        pid = stmt.participants[0]
        path = stmt.group_path
        if any((pid, path[:k]) in bound for k in range(1, len(path) + 1)):
            continue
        if _pool_of(model, pid) is None:
            continue
        key = (pid, path[0])
        if key not in seen:
            seen.add(key)
            out.append(key)
    return out


# --- expansion ------------------------------------------------------------------


@dataclass
class _Content:
    """Statements and child groups destined for one container, in document order."""

    statements: list[tuple[int, Statement]] = field(default_factory=list)
    groups: dict[str, "_Group"] = field(default_factory=dict)

    def child(self, name: str, identity: tuple, position: int) -> "_Content":
        group = self.groups.get(name)
        if group is None:
            group = _Group(name, identity, position, _Content())
            self.groups[name] = group
        elif group.identity != identity:
            raise ExpansionError(
                f"duplicate sibling group names: {name!r} is reached from two different group paths"
            )
        group.position = min(group.position, position)
        return group.content

    def entries(self) -> list[tuple[int, Union[Statement, "_Group"]]]:
        items: list[tuple[int, Union[Statement, _Group]]] = [(pos, stmt) for pos, stmt in self.statements]
        items.extend((group.position, group) for group in self.groups.values())
        items.sort(key=lambda pair: pair[0])
        return items


@dataclass
class _Group:
    name: str
    identity: tuple
    position: int
    content: _Content


def _is_skeleton_sub(pool: Pool, sub_id: str) -> bool:
    receive_ids = {n.id for n in pool.nodes if isinstance(n, Task) and n.kind is TaskKind.RECEIVE}
    return any(f.target_id == sub_id and f.source_id in receive_ids for f in pool.sequence_flows)


def _clear_bound(node: SubProcess, bound: set[str]) -> SubProcess:
    if node.id in bound:
        return SubProcess(node.id, node.name)
    nodes = tuple(_clear_bound(n, bound) if isinstance(n, SubProcess) else n for n in node.nodes)
    return SubProcess(node.id, node.name, nodes, node.sequence_flows)


def _strip_expansion(model: BpmnModel, bound: set[str]) -> BpmnModel:
    """Remove everything a previous expansion may have added, keeping the skeleton."""
    pools: list[Pool] = []
    for pool in model.pools:
        has_interaction = any(
            isinstance(n, Task) and n.kind in (TaskKind.SEND, TaskKind.RECEIVE) for n in pool.nodes
        )
        if not has_interaction:
            continue  # pool created by expansion for a local-only participant
        kept: list[FlowNode] = []
        for node in pool.nodes:
            if isinstance(node, (StartEvent, EndEvent)):
                kept.append(node)
            elif isinstance(node, Task) and node.kind in (TaskKind.SEND, TaskKind.RECEIVE):
                kept.append(node)
            elif isinstance(node, SubProcess) and _is_skeleton_sub(pool, node.id):
                kept.append(_clear_bound(node, bound))
        nodes = tuple(kept)
        pools.append(Pool(pool.id, pool.participant_id, nodes, chain_flows(nodes)))
    return BpmnModel(tuple(pools), model.message_flows)


class _Ids:
    def __init__(self, model: BpmnModel):
        taken_nodes = set()
        taken_pools = set()
        for pool in model.pools:
            taken_pools.add(pool.id)
            stack = list(pool.nodes)
            while stack:
                node = stack.pop()
                taken_nodes.add(node.id)
                if isinstance(node, SubProcess):
                    stack.extend(node.nodes)
        self._taken_nodes = taken_nodes
        self._taken_pools = taken_pools
        self._node = max((int(n[1:]) for n in taken_nodes if n[1:].isdigit() and n.startswith("n")), default=0)
        self._pool = max((int(p[1:]) for p in taken_pools if p[1:].isdigit() and p.startswith("p")), default=0)

    def node(self) -> str:
        self._node += 1
        while f"n{self._node}" in self._taken_nodes:
            self._node += 1
        return f"n{self._node}"

    def pool(self) -> str:
        self._pool += 1
        while f"p{self._pool}" in self._taken_pools:
            self._pool += 1
        return f"p{self._pool}"


def _store_target(stmt: Statement, doc: RequirementsDocument) -> Optional[str]:
    raw = stmt.attributes.get("store")
    if raw is None or not stmt.data_refs:
        return None
    if normalize_name(raw) in ("true", "yes", "1"):
        return stmt.data_refs[-1]
    from .model import canonicalize

    key = normalize_name(canonicalize(raw, doc.dictionary))
    if key not in stmt.data_refs:
        raise ExpansionError(f"statement {stmt.id!r}: store={raw!r} names a data object the statement does not reference")
    return key


def expand(
    model: BpmnModel,
    doc: RequirementsDocument,
    bindings: tuple[GroupBinding, ...] = (),
) -> tuple[BpmnModel, list[TraceLink]]:
    """Attach all Local statements to the model; returns one trace link each."""
    for binding in bindings:
        bind_group(model, (), binding.participant_id, binding.group_path, binding.target_sub_process_id)

    bound_targets = {b.target_sub_process_id for b in bindings}
    base = _strip_expansion(model, bound_targets)
    for binding in bindings:
        pool = _pool_of(base, binding.participant_id)
        if pool is None or _find_sub_process(pool.nodes, binding.target_sub_process_id) is None:
            raise ExpansionError(
                f"binding target {binding.target_sub_process_id!r} was produced by a previous "
                "expansion; bind against the skeleton instead"
            )

    binding_map = {(b.participant_id, b.group_path): b.target_sub_process_id for b in bindings}
    containers: dict[object, _Content] = {}
    local_order: list[Statement] = []
    pool_less_order: list[str] = []

    for position, stmt in enumerate(doc.statements):
        if stmt.cls is not StatementClass.LOCAL:
            continue
        if not stmt.participants:
            raise ExpansionError(f"local statement {stmt.id!r} has no participant")
        local_order.append(stmt)
        pid = stmt.participants[0]
        path = stmt.group_path
        key: object = ("pool", pid)
        rest = path
        for k in range(len(path), 0, -1):
            target = binding_map.get((pid, path[:k]))
            if target is not None:
                key = target
                rest = path[k:]
                break
        if key == ("pool", pid) and _pool_of(base, pid) is None and pid not in pool_less_order:
            pool_less_order.append(pid)
        content = containers.setdefault(key, _Content())
        walked: tuple[str, ...] = path[: len(path) - len(rest)]
        for segment in rest:
            walked = walked + (segment,)
            content = content.child(segment, (pid, walked), position)
        content.statements.append((position, stmt))

    ids = _Ids(base)
    links: dict[str, TraceLink] = {}

    def emit_items(entries: list[tuple[int, Union[Statement, _Group]]]) -> list[FlowNode]:
        nodes: list[FlowNode] = []
        for _, item in entries:
            if isinstance(item, _Group):
                body = emit_body(item.content)
                nodes.append(SubProcess(ids.node(), item.name, tuple(body), chain_flows(tuple(body))))
            else:
                task = Task(ids.node(), display_text(item), TaskKind.GENERIC)
                nodes.append(task)
                element_ids = [task.id]
                store_ref = _store_target(item, doc)
                if store_ref is not None:
                    store = Store(ids.node(), doc.data_object_by_id(store_ref).name, store_ref)
                    nodes.append(store)
                    element_ids.extend([store.id, flow_id(task.id, store.id)])
                links[item.id] = TraceLink(item.id, tuple(element_ids))
        return nodes

    def emit_body(content: _Content) -> list[FlowNode]:
        start = StartEvent(ids.node())
        items = emit_items(content.entries())
        end = EndEvent(ids.node())
        return [start, *items, end]

    def fill(node: SubProcess) -> SubProcess:
        if node.id in containers:
            body = tuple(emit_body(containers[node.id]))  # bound targets were cleared by the strip
            return SubProcess(node.id, node.name, body, chain_flows(body))
        nodes = tuple(fill(n) if isinstance(n, SubProcess) else n for n in node.nodes)
        return SubProcess(node.id, node.name, nodes, node.sequence_flows)

    pools: list[Pool] = []
    for pool in base.pools:
        nodes = tuple(fill(n) if isinstance(n, SubProcess) else n for n in pool.nodes)
        root = containers.get(("pool", pool.participant_id))
        if root is not None:
            end_index = max(i for i, n in enumerate(nodes) if isinstance(n, EndEvent))
            items = emit_items(root.entries())
            nodes = nodes[:end_index] + tuple(items) + nodes[end_index:]
        pools.append(Pool(pool.id, pool.participant_id, nodes, chain_flows(nodes)))

    for pid in pool_less_order:
        body = tuple(emit_body(containers[("pool", pid)]))
        pools.append(Pool(ids.pool(), pid, body, chain_flows(body)))

    expanded = BpmnModel(tuple(pools), base.message_flows)
    ordered_links = [links[stmt.id] for stmt in local_order if stmt.id in links]
    return expanded, ordered_links
