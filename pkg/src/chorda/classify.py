"""Statement classification: Data / Interaction / Local suggestion and validation."""

from __future__ import annotations

from dataclasses import dataclass

from .model import RequirementsDocument, Statement, StatementClass


@dataclass(frozen=True)
class ClassificationIssue:
    statement_id: str
    code: str
    message: str


def suggest_class(stmt: Statement) -> tuple[StatementClass, str]:
    """Suggest a class from the statement's participant and data tags.

    The analyst's own assignment takes precedence; this is advisory only.
    """
    n_participants = len(stmt.participants)
    n_data = len(stmt.data_refs)
    if n_participants == 0 and n_data >= 1:
        return StatementClass.DATA, "no participants are tagged, only data"
    if n_participants == 1:
        return StatementClass.LOCAL, "exactly one participant is tagged"
    if n_participants == 2:
        return StatementClass.INTERACTION, "two participants are tagged"
    if n_participants == 0:
        return StatementClass.UNCLASSIFIED, "nothing is tagged; tag participants or data, or split the statement"
    return (
        StatementClass.UNCLASSIFIED,
        f"{n_participants} participants are tagged; split the statement into pairwise interactions",
    )


def _issues_for(stmt: Statement) -> list[ClassificationIssue]:
    issues: list[ClassificationIssue] = []
    if stmt.cls is StatementClass.UNCLASSIFIED:
        issues.append(ClassificationIssue(stmt.id, "unclassified", "statement has no class assigned"))
        return issues
    if stmt.cls is StatementClass.INTERACTION:
        if not stmt.payload:
            issues.append(ClassificationIssue(stmt.id, "no-payload", "interaction lacks exchanged data"))
        if stmt.sender is None or stmt.receiver is None:
            issues.append(
                ClassificationIssue(stmt.id, "no-direction", "interaction needs explicit sender= and receiver=")
            )
        elif stmt.sender == stmt.receiver:
            issues.append(ClassificationIssue(stmt.id, "self-interaction", "sender and receiver are the same participant"))
        else:
            untagged = [pid for pid in (stmt.sender, stmt.receiver) if pid not in stmt.participants]
            if untagged:
                issues.append(
                    ClassificationIssue(
                        stmt.id,
                        "direction-untagged",
                        "sender/receiver not among the statement's tagged participants: " + ", ".join(untagged),
                    )
                )
    elif stmt.cls is StatementClass.LOCAL:
        if len(stmt.participants) != 1:
            issues.append(
                ClassificationIssue(
                    stmt.id,
                    "local-participants",
                    f"local statement references {len(stmt.participants)} participants, expected exactly 1",
                )
            )
    elif stmt.cls is StatementClass.DATA:
        if stmt.participants:
            issues.append(
                ClassificationIssue(
                    stmt.id, "data-participants", "data statement must not reference participants"
                )
            )
    return issues


def validate_classification(doc: RequirementsDocument) -> list[ClassificationIssue]:
    """All structural classification problems; empty means ready for generation."""
    issues: list[ClassificationIssue] = []
    for stmt in doc.statements:
        issues.extend(_issues_for(stmt))
    return issues
