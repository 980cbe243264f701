"""Canonical JSON serialization of models, trace links and documents.

This is the service wire format and the golden-file format for tests: keys
are sorted, arrays keep model order, and equal inputs serialize to identical
bytes.
"""

from __future__ import annotations

import json
from typing import Any, Optional

from .model import (
    BpmnModel,
    DataObject,
    DictionaryEntry,
    EndEvent,
    FlowNode,
    MessageFlow,
    Participant,
    Pool,
    RequirementsDocument,
    SequenceFlow,
    StartEvent,
    Statement,
    StatementClass,
    Store,
    SubProcess,
    Task,
    TaskKind,
    TraceLink,
    iter_nodes,
    iter_scopes,
    validate_model,
)


class SchemaError(ValueError):
    """Raised by the JSON readers; the message is path-qualified."""

    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}")


def canonical_json(payload: Any) -> str:
    return json.dumps(payload, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


# --- model ---------------------------------------------------------------------


def _node_to_dict(node: FlowNode) -> dict:
    if isinstance(node, StartEvent):
        return {"id": node.id, "kind": "startEvent"}
    if isinstance(node, EndEvent):
        return {"id": node.id, "kind": "endEvent"}
    if isinstance(node, Task):
        return {"id": node.id, "kind": "task", "name": node.name, "taskKind": node.kind.value}
    if isinstance(node, Store):
        return {"id": node.id, "kind": "store", "name": node.name, "dataObjectId": node.data_object_id}
    return {
        "id": node.id,
        "kind": "subProcess",
        "name": node.name,
        "nodes": [_node_to_dict(n) for n in node.nodes],
        "sequenceFlows": [_flow_to_dict(f) for f in node.sequence_flows],
    }


def _flow_to_dict(flow: SequenceFlow) -> dict:
    return {"id": flow.id, "sourceId": flow.source_id, "targetId": flow.target_id}


def model_to_dict(model: BpmnModel, links: list[TraceLink]) -> dict:
    return {
        "pools": [
            {
                "id": pool.id,
                "participantId": pool.participant_id,
                "nodes": [_node_to_dict(n) for n in pool.nodes],
                "sequenceFlows": [_flow_to_dict(f) for f in pool.sequence_flows],
            }
            for pool in model.pools
        ],
        "messageFlows": [
            {
                "id": f.id,
                "sourceId": f.source_id,
                "targetId": f.target_id,
                "payload": list(f.payload),
                "label": f.label,
            }
            for f in model.message_flows
        ],
        "traceLinks": [{"statementId": l.statement_id, "elementIds": list(l.element_ids)} for l in links],
    }


def to_json(model: BpmnModel, links: list[TraceLink] = ()) -> str:  # type: ignore[assignment]
    return canonical_json(model_to_dict(model, list(links)))


def _expect(value: Any, path: str, kind: type, name: str) -> Any:
    if not isinstance(value, kind):
        raise SchemaError(path, f"expected {name}, got {type(value).__name__}")
    return value


def _expect_keys(value: dict, path: str, required: set[str], optional: set[str] = frozenset()) -> None:
    unknown = sorted(set(value) - required - optional)
    if unknown:
        raise SchemaError(path, "unknown keys: " + ", ".join(unknown))
    missing = sorted(required - set(value))
    if missing:
        raise SchemaError(path, "missing keys: " + ", ".join(missing))


def _str(value: Any, path: str) -> str:
    return _expect(value, path, str, "string")


def _str_list(value: Any, path: str) -> tuple[str, ...]:
    items = _expect(value, path, list, "array")
    return tuple(_str(item, f"{path}[{i}]") for i, item in enumerate(items))


def _flow_from_dict(value: Any, path: str) -> SequenceFlow:
    obj = _expect(value, path, dict, "object")
    _expect_keys(obj, path, {"id", "sourceId", "targetId"})
    return SequenceFlow(_str(obj["id"], f"{path}.id"), _str(obj["sourceId"], f"{path}.sourceId"),
                        _str(obj["targetId"], f"{path}.targetId"))


_TASK_KINDS = {k.value: k for k in TaskKind}


def _node_from_dict(value: Any, path: str) -> FlowNode:
    obj = _expect(value, path, dict, "object")
    kind = _str(obj.get("kind", ""), f"{path}.kind")
    if kind == "startEvent":
        _expect_keys(obj, path, {"id", "kind"})
        return StartEvent(_str(obj["id"], f"{path}.id"))
    if kind == "endEvent":
        _expect_keys(obj, path, {"id", "kind"})
        return EndEvent(_str(obj["id"], f"{path}.id"))
    if kind == "task":
        _expect_keys(obj, path, {"id", "kind", "name", "taskKind"})
        task_kind = _str(obj["taskKind"], f"{path}.taskKind")
        if task_kind not in _TASK_KINDS:
            raise SchemaError(f"{path}.taskKind", f"unknown task kind {task_kind!r}")
        return Task(_str(obj["id"], f"{path}.id"), _str(obj["name"], f"{path}.name"), _TASK_KINDS[task_kind])
    if kind == "store":
        _expect_keys(obj, path, {"id", "kind", "name", "dataObjectId"})
        return Store(
            _str(obj["id"], f"{path}.id"),
            _str(obj["name"], f"{path}.name"),
            _str(obj["dataObjectId"], f"{path}.dataObjectId"),
        )
    if kind == "subProcess":
        _expect_keys(obj, path, {"id", "kind", "name", "nodes", "sequenceFlows"})
        nodes = _expect(obj["nodes"], f"{path}.nodes", list, "array")
        flows = _expect(obj["sequenceFlows"], f"{path}.sequenceFlows", list, "array")
        return SubProcess(
            _str(obj["id"], f"{path}.id"),
            _str(obj["name"], f"{path}.name"),
            tuple(_node_from_dict(n, f"{path}.nodes[{i}]") for i, n in enumerate(nodes)),
            tuple(_flow_from_dict(f, f"{path}.sequenceFlows[{i}]") for i, f in enumerate(flows)),
        )
    raise SchemaError(f"{path}.kind", f"unknown node kind {kind!r}")


def model_from_dict(payload: Any, path: str = "model") -> tuple[BpmnModel, list[TraceLink]]:
    obj = _expect(payload, path, dict, "object")
    _expect_keys(obj, path, {"pools", "messageFlows", "traceLinks"})
    pools = []
    for i, raw in enumerate(_expect(obj["pools"], f"{path}.pools", list, "array")):
        pool_path = f"{path}.pools[{i}]"
        pool_obj = _expect(raw, pool_path, dict, "object")
        _expect_keys(pool_obj, pool_path, {"id", "participantId", "nodes", "sequenceFlows"})
        nodes = _expect(pool_obj["nodes"], f"{pool_path}.nodes", list, "array")
        flows = _expect(pool_obj["sequenceFlows"], f"{pool_path}.sequenceFlows", list, "array")
        pools.append(
            Pool(
                _str(pool_obj["id"], f"{pool_path}.id"),
                _str(pool_obj["participantId"], f"{pool_path}.participantId"),
                tuple(_node_from_dict(n, f"{pool_path}.nodes[{j}]") for j, n in enumerate(nodes)),
                tuple(_flow_from_dict(f, f"{pool_path}.sequenceFlows[{j}]") for j, f in enumerate(flows)),
            )
        )
    message_flows = []
    for i, raw in enumerate(_expect(obj["messageFlows"], f"{path}.messageFlows", list, "array")):
        flow_path = f"{path}.messageFlows[{i}]"
        flow_obj = _expect(raw, flow_path, dict, "object")
        _expect_keys(flow_obj, flow_path, {"id", "sourceId", "targetId", "payload", "label"})
        message_flows.append(
            MessageFlow(
                _str(flow_obj["id"], f"{flow_path}.id"),
                _str(flow_obj["sourceId"], f"{flow_path}.sourceId"),
                _str(flow_obj["targetId"], f"{flow_path}.targetId"),
                _str_list(flow_obj["payload"], f"{flow_path}.payload"),
                _str(flow_obj["label"], f"{flow_path}.label"),
            )
        )
    links = []
    for i, raw in enumerate(_expect(obj["traceLinks"], f"{path}.traceLinks", list, "array")):
        link_path = f"{path}.traceLinks[{i}]"
        link_obj = _expect(raw, link_path, dict, "object")
        _expect_keys(link_obj, link_path, {"statementId", "elementIds"})
        element_ids = _str_list(link_obj["elementIds"], f"{link_path}.elementIds")
        if not element_ids:
            raise SchemaError(f"{link_path}.elementIds", "must not be empty")
        links.append(TraceLink(_str(link_obj["statementId"], f"{link_path}.statementId"), element_ids))

    model = BpmnModel(tuple(pools), tuple(message_flows))
    violations = validate_model(model)
    if violations:
        first = violations[0]
        raise SchemaError(f"{path}", f"structural violation ({first.rule}): {first.message}")
    known = {node.id for _, node in iter_nodes(model)}
    known.update(pool.id for pool in model.pools)
    for _, _, flows in iter_scopes(model):
        known.update(f.id for f in flows)
    known.update(f.id for f in model.message_flows)
    for i, link in enumerate(links):
        for j, element_id in enumerate(link.element_ids):
            if element_id not in known:
                raise SchemaError(
                    f"{path}.traceLinks[{i}].elementIds[{j}]", f"unknown element {element_id!r}"
                )
    return model, links


def from_json(text: str) -> tuple[BpmnModel, list[TraceLink]]:
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError("model", f"invalid JSON: {exc}") from exc
    return model_from_dict(payload)


# --- documents -------------------------------------------------------------------


def document_to_dict(doc: RequirementsDocument) -> dict:
    return {
        "participants": [
            {"id": p.id, "name": p.name, "aliases": sorted(p.aliases)} for p in doc.participants
        ],
        "dataObjects": [
            {"id": d.id, "name": d.name, "aliases": sorted(d.aliases), "parts": list(d.parts)}
            for d in doc.data_objects
        ],
        "dictionary": [
            {"term": e.term, "definition": e.definition, "synonyms": sorted(e.synonyms)}
            for e in doc.dictionary
        ],
        "statements": [
            {
                "id": s.id,
                "text": s.text,
                "class": s.cls.value,
                "participants": list(s.participants),
                "dataRefs": list(s.data_refs),
                "sender": s.sender,
                "receiver": s.receiver,
                "payload": list(s.payload),
                "groupPath": list(s.group_path),
                "attributes": dict(s.attributes),
            }
            for s in doc.statements
        ],
    }


def document_to_json(doc: RequirementsDocument) -> str:
    return canonical_json(document_to_dict(doc))


_CLASSES = {c.value: c for c in StatementClass}


def document_from_dict(payload: Any, path: str = "document") -> RequirementsDocument:
    obj = _expect(payload, path, dict, "object")
    _expect_keys(obj, path, {"participants", "dataObjects", "dictionary", "statements"})
    participants = []
    for i, raw in enumerate(_expect(obj["participants"], f"{path}.participants", list, "array")):
        p_path = f"{path}.participants[{i}]"
        p = _expect(raw, p_path, dict, "object")
        _expect_keys(p, p_path, {"id", "name"}, {"aliases"})
        participants.append(
            Participant(
                _str(p["id"], f"{p_path}.id"),
                _str(p["name"], f"{p_path}.name"),
                frozenset(_str_list(p.get("aliases", []), f"{p_path}.aliases")),
            )
        )
    data_objects = []
    for i, raw in enumerate(_expect(obj["dataObjects"], f"{path}.dataObjects", list, "array")):
        d_path = f"{path}.dataObjects[{i}]"
        d = _expect(raw, d_path, dict, "object")
        _expect_keys(d, d_path, {"id", "name"}, {"aliases", "parts"})
        data_objects.append(
            DataObject(
                _str(d["id"], f"{d_path}.id"),
                _str(d["name"], f"{d_path}.name"),
                frozenset(_str_list(d.get("aliases", []), f"{d_path}.aliases")),
                _str_list(d.get("parts", []), f"{d_path}.parts"),
            )
        )
    entries = []
    for i, raw in enumerate(_expect(obj["dictionary"], f"{path}.dictionary", list, "array")):
        e_path = f"{path}.dictionary[{i}]"
        e = _expect(raw, e_path, dict, "object")
        _expect_keys(e, e_path, {"term"}, {"definition", "synonyms"})
        entries.append(
            DictionaryEntry(
                _str(e["term"], f"{e_path}.term"),
                _str(e.get("definition", ""), f"{e_path}.definition"),
                frozenset(_str_list(e.get("synonyms", []), f"{e_path}.synonyms")),
            )
        )
    statements = []
    for i, raw in enumerate(_expect(obj["statements"], f"{path}.statements", list, "array")):
        s_path = f"{path}.statements[{i}]"
        s = _expect(raw, s_path, dict, "object")
        _expect_keys(
            s,
            s_path,
            {"id", "text"},
            {"class", "participants", "dataRefs", "sender", "receiver", "payload", "groupPath", "attributes"},
        )
        cls_value = _str(s.get("class", "U"), f"{s_path}.class")
        if cls_value not in _CLASSES:
            raise SchemaError(f"{s_path}.class", f"unknown class {cls_value!r}")
        attributes_raw = _expect(s.get("attributes", {}), f"{s_path}.attributes", dict, "object")
        attributes = {
            _str(k, f"{s_path}.attributes"): _str(v, f"{s_path}.attributes.{k}") for k, v in attributes_raw.items()
        }
        sender = s.get("sender")
        receiver = s.get("receiver")
        statements.append(
            Statement(
                id=_str(s["id"], f"{s_path}.id"),
                text=_str(s["text"], f"{s_path}.text"),
                cls=_CLASSES[cls_value],
                participants=_str_list(s.get("participants", []), f"{s_path}.participants"),
                data_refs=_str_list(s.get("dataRefs", []), f"{s_path}.dataRefs"),
                sender=None if sender is None else _str(sender, f"{s_path}.sender"),
                receiver=None if receiver is None else _str(receiver, f"{s_path}.receiver"),
                payload=_str_list(s.get("payload", []), f"{s_path}.payload"),
                group_path=_str_list(s.get("groupPath", []), f"{s_path}.groupPath"),
                attributes=attributes,
            )
        )
    return RequirementsDocument(tuple(participants), tuple(data_objects), tuple(entries), tuple(statements))


# --- bindings --------------------------------------------------------------------


def bindings_to_json(bindings) -> str:
    return canonical_json(
        [
            {
                "participantId": b.participant_id,
                "groupPath": list(b.group_path),
                "targetSubProcessId": b.target_sub_process_id,
            }
            for b in bindings
        ]
    )


def bindings_from_json(text: str):
    from .orchestrate import GroupBinding

    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError("bindings", f"invalid JSON: {exc}") from exc
    items = _expect(payload, "bindings", list, "array")
    out = []
    for i, raw in enumerate(items):
        b_path = f"bindings[{i}]"
        b = _expect(raw, b_path, dict, "object")
        _expect_keys(b, b_path, {"participantId", "groupPath", "targetSubProcessId"})
        group_path = _str_list(b["groupPath"], f"{b_path}.groupPath")
        if not group_path:
            raise SchemaError(f"{b_path}.groupPath", "must not be empty")
        out.append(
            GroupBinding(
                _str(b["participantId"], f"{b_path}.participantId"),
                group_path,
                _str(b["targetSubProcessId"], f"{b_path}.targetSubProcessId"),
            )
        )
    return tuple(out)
