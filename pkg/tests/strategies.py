"""Hypothesis strategies producing valid documents and generated models.

Documents are built directly as value objects whose statement texts carry the
matching inline tags, so they are exactly what the parser itself would
produce; names are lowercase single-spaced strings, making each entity's id
equal to its name.
"""

from __future__ import annotations

from hypothesis import strategies as st

from chorda import (
    DataObject,
    Participant,
    RequirementsDocument,
    Statement,
    StatementClass,
    bind_by_name,
    expand,
    generate_skeleton,
)

PARTICIPANT_NAMES = ("alpha team", "beta desk", "gamma office", "delta board", "epsilon unit")
DATA_NAMES = ("report", "invoice", "ledger", "summary", "contract", "budget")
GROUP_NAMES = ("review", "archive run", "prepare plan", "audit", "publish")


def _p_tag(name: str) -> str:
    return "{{p:" + name + "}}"


def _d_tag(name: str) -> str:
    return "[[d:" + name + "]]"


@st.composite
def documents(draw, min_statements: int = 0, max_statements: int = 8) -> RequirementsDocument:
    participants = draw(
        st.lists(st.sampled_from(PARTICIPANT_NAMES), unique=True, min_size=2, max_size=len(PARTICIPANT_NAMES))
    )
    data = draw(st.lists(st.sampled_from(DATA_NAMES), unique=True, min_size=1, max_size=len(DATA_NAMES)))
    count = draw(st.integers(min_statements, max_statements))
    statements = []
    for index in range(count):
        kind = draw(st.sampled_from("DIL"))
        sid = f"s{index + 1}"
        if kind == "I":
            sender, receiver = draw(st.lists(st.sampled_from(participants), unique=True, min_size=2, max_size=2))
            payload = tuple(draw(st.lists(st.sampled_from(data), unique=True, min_size=1, max_size=3)))
            text = (
                f"The {_p_tag(sender)} sends "
                + " and ".join(_d_tag(d) for d in payload)
                + f" to the {_p_tag(receiver)}."
            )
            statements.append(
                Statement(
                    id=sid,
                    text=text,
                    cls=StatementClass.INTERACTION,
                    participants=(sender, receiver),
                    data_refs=payload,
                    sender=sender,
                    receiver=receiver,
                    payload=payload,
                )
            )
        elif kind == "L":
            owner = draw(st.sampled_from(participants))
            group_path = tuple(
                draw(st.lists(st.sampled_from(GROUP_NAMES), unique=True, min_size=0, max_size=2))
            )
            wants_store = draw(st.booleans())
            refs = tuple(draw(st.lists(st.sampled_from(data), unique=True, min_size=1 if wants_store else 0, max_size=2)))
            text = f"The {_p_tag(owner)} handles " + (" and ".join(_d_tag(d) for d in refs) or "routine work") + "."
            statements.append(
                Statement(
                    id=sid,
                    text=text,
                    cls=StatementClass.LOCAL,
                    participants=(owner,),
                    data_refs=refs,
                    group_path=group_path,
                    attributes={"store": "true"} if wants_store and refs else {},
                )
            )
        else:
            refs = tuple(draw(st.lists(st.sampled_from(data), unique=True, min_size=1, max_size=3)))
            text = "The " + " and the ".join(_d_tag(d) for d in refs) + " must stay consistent."
            statements.append(
                Statement(id=sid, text=text, cls=StatementClass.DATA, data_refs=refs)
            )
    return RequirementsDocument(
        participants=tuple(Participant(name, name) for name in participants),
        data_objects=tuple(DataObject(name, name) for name in data),
        statements=tuple(statements),
    )


@st.composite
def skeleton_models(draw):
    doc = draw(documents(min_statements=1))
    model, links = generate_skeleton(doc)
    return doc, model, links


@st.composite
def expanded_models(draw):
    doc = draw(documents(min_statements=1))
    model, links = generate_skeleton(doc)
    expanded, local_links = expand(model, doc, bind_by_name(model, doc))
    return doc, expanded, links + local_links
