"""XPDL 2.x-subset export of layouted diagrams.

The emitted element subset is pinned by docs/xpdl-subset.xsd: one Package,
Pool elements referencing Participants, Activities implemented as tasks or
block activities (sub-processes become ActivitySets), Transitions for
sequence flows, MessageFlows with the payload label as the message name, and
graphics elements carrying the layout coordinates.
"""

from __future__ import annotations

import xml.etree.ElementTree as ET

from .layout import LayoutedDiagram, Rect
from .model import EndEvent, FlowNode, Pool, SequenceFlow, StartEvent, Store, SubProcess, Task, TaskKind

XPDL_NS = "http://www.wfmc.org/2009/XPDL2.2"


def _fmt(value: float) -> str:
    return f"{value:g}"


def _graphics(parent: ET.Element, rect: Rect) -> None:
    infos = ET.SubElement(parent, "NodeGraphicsInfos")
    info = ET.SubElement(
        infos,
        "NodeGraphicsInfo",
        {"ToolId": "chorda", "Width": _fmt(rect.width), "Height": _fmt(rect.height)},
    )
    ET.SubElement(info, "Coordinates", {"XCoordinate": _fmt(rect.x), "YCoordinate": _fmt(rect.y)})


def _connector_graphics(parent: ET.Element, waypoints: tuple[tuple[float, float], ...]) -> None:
    infos = ET.SubElement(parent, "ConnectorGraphicsInfos")
    info = ET.SubElement(infos, "ConnectorGraphicsInfo", {"ToolId": "chorda"})
    for x, y in waypoints:
        ET.SubElement(info, "Coordinates", {"XCoordinate": _fmt(x), "YCoordinate": _fmt(y)})


def _activity(parent: ET.Element, node: FlowNode, diagram: LayoutedDiagram) -> None:
    if isinstance(node, (StartEvent, EndEvent)):
        activity = ET.SubElement(parent, "Activity", {"Id": node.id, "Name": ""})
        event = ET.SubElement(activity, "Event")
        if isinstance(node, StartEvent):
            ET.SubElement(event, "StartEvent", {"Trigger": "None"})
        else:
            ET.SubElement(event, "EndEvent", {"Result": "None"})
    elif isinstance(node, Task):
        activity = ET.SubElement(parent, "Activity", {"Id": node.id, "Name": node.name})
        implementation = ET.SubElement(activity, "Implementation")
        task = ET.SubElement(implementation, "Task")
        if node.kind is TaskKind.SEND:
            ET.SubElement(task, "TaskSend")
        elif node.kind is TaskKind.RECEIVE:
            ET.SubElement(task, "TaskReceive")
    elif isinstance(node, Store):
        activity = ET.SubElement(parent, "Activity", {"Id": node.id, "Name": node.name})
        implementation = ET.SubElement(activity, "Implementation")
        ET.SubElement(implementation, "Task")
        extended = ET.SubElement(activity, "ExtendedAttributes")
        ET.SubElement(extended, "ExtendedAttribute", {"Name": "StoreDataObject", "Value": node.data_object_id})
    else:  # SubProcess
        activity = ET.SubElement(parent, "Activity", {"Id": node.id, "Name": node.name})
        ET.SubElement(activity, "BlockActivity", {"ActivitySetId": f"{node.id}_set"})
    _graphics(activity, diagram.geometry[node.id])


def _transitions(parent: ET.Element, flows: tuple[SequenceFlow, ...], diagram: LayoutedDiagram) -> None:
    container = ET.SubElement(parent, "Transitions")
    for flow in flows:
        transition = ET.SubElement(container, "Transition", {"Id": flow.id, "From": flow.source_id, "To": flow.target_id})
        _connector_graphics(transition, diagram.waypoints[flow.id])


def _activity_sets(parent: ET.Element, nodes: tuple[FlowNode, ...], diagram: LayoutedDiagram) -> None:
    for node in nodes:
        if not isinstance(node, SubProcess):
            continue
        activity_set = ET.SubElement(parent, "ActivitySet", {"Id": f"{node.id}_set"})
        activities = ET.SubElement(activity_set, "Activities")
        for child in node.nodes:
            _activity(activities, child, diagram)
        _transitions(activity_set, node.sequence_flows, diagram)
        _activity_sets(parent, node.nodes, diagram)


def _workflow_process(parent: ET.Element, pool: Pool, diagram: LayoutedDiagram) -> None:
    process = ET.SubElement(parent, "WorkflowProcess", {"Id": f"{pool.id}_process", "Name": pool.participant_id})
    ET.SubElement(process, "ProcessHeader")
    sets = ET.SubElement(process, "ActivitySets")
    _activity_sets(sets, pool.nodes, diagram)
    activities = ET.SubElement(process, "Activities")
    for node in pool.nodes:
        _activity(activities, node, diagram)
    _transitions(process, pool.sequence_flows, diagram)


def to_xpdl(diagram: LayoutedDiagram) -> str:
    """Serialize a layouted diagram; equal diagrams yield identical bytes."""
    model = diagram.model
    package = ET.Element("Package", {"xmlns": XPDL_NS, "Id": "package", "Name": "package"})
    header = ET.SubElement(package, "PackageHeader")
    ET.SubElement(header, "XPDLVersion").text = "2.2"
    ET.SubElement(header, "Vendor").text = "chorda"

    participants = ET.SubElement(package, "Participants")
    for pool in model.pools:
        participant = ET.SubElement(participants, "Participant", {"Id": pool.participant_id, "Name": pool.participant_id})
        ET.SubElement(participant, "ParticipantType", {"Type": "ROLE"})

    pools = ET.SubElement(package, "Pools")
    for pool in model.pools:
        pool_el = ET.SubElement(
            pools,
            "Pool",
            {
                "Id": pool.id,
                "Name": pool.participant_id,
                "Process": f"{pool.id}_process",
                "Participant": pool.participant_id,
                "BoundaryVisible": "true",
            },
        )
        _graphics(pool_el, diagram.geometry[pool.id])

    message_flows = ET.SubElement(package, "MessageFlows")
    for flow in model.message_flows:
        flow_el = ET.SubElement(
            message_flows,
            "MessageFlow",
            {"Id": flow.id, "Source": flow.source_id, "Target": flow.target_id, "Name": flow.label},
        )
        ET.SubElement(flow_el, "Message", {"Id": f"{flow.id}_msg", "Name": flow.label})
        _connector_graphics(flow_el, diagram.waypoints[flow.id])

    processes = ET.SubElement(package, "WorkflowProcesses")
    for pool in model.pools:
        _workflow_process(processes, pool, diagram)

    ET.indent(package, space="  ")
    body = ET.tostring(package, encoding="unicode")
    return '<?xml version="1.0" encoding="UTF-8"?>\n' + body + "\n"
