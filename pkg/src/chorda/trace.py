"""Completeness checking: every statement must be traceable to model elements."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .model import BpmnModel, RequirementsDocument, StatementClass, TraceLink, iter_nodes, iter_scopes


@dataclass(frozen=True)
class DanglingLink:
    statement_id: str
    missing_statement: bool = False
    missing_elements: tuple[str, ...] = ()


@dataclass(frozen=True)
class CoverageReport:
    covered: tuple[str, ...]
    uncovered: tuple[str, ...]
    documentation_only: tuple[str, ...]
    dangling: tuple[DanglingLink, ...]

    @property
    def complete(self) -> bool:
        return not self.uncovered and not self.dangling

    def to_dict(self) -> dict:
        return {
            "complete": self.complete,
            "covered": list(self.covered),
            "uncovered": list(self.uncovered),
            "documentationOnly": list(self.documentation_only),
            "dangling": [
                {
                    "statementId": d.statement_id,
                    "missingStatement": d.missing_statement,
                    "missingElements": list(d.missing_elements),
                }
                for d in self.dangling
            ],
        }

    def to_text(self) -> str:
        lines = [f"complete: {'yes' if self.complete else 'no'}"]
        lines.append(f"covered ({len(self.covered)}): " + (", ".join(self.covered) or "-"))
        lines.append(f"uncovered ({len(self.uncovered)}): " + (", ".join(self.uncovered) or "-"))
        lines.append(
            f"documentation-only ({len(self.documentation_only)}): " + (", ".join(self.documentation_only) or "-")
        )
        for d in self.dangling:
            if d.missing_statement:
                lines.append(f"dangling: link for unknown statement {d.statement_id!r}")
            else:
                lines.append(
                    f"dangling: {d.statement_id!r} references missing elements: " + ", ".join(d.missing_elements)
                )
        return "\n".join(lines) + "\n"


def _element_ids(model: BpmnModel) -> set[str]:
    ids: set[str] = set()
    for pool in model.pools:
        ids.add(pool.id)
    for _, node in iter_nodes(model):
        ids.add(node.id)
    for _, _, flows in iter_scopes(model):
        ids.update(f.id for f in flows)
    ids.update(f.id for f in model.message_flows)
    return ids


def check_completeness(
    doc: RequirementsDocument,
    links: list[TraceLink],
    model: Optional[BpmnModel] = None,
) -> CoverageReport:
    """Classify statements as covered / uncovered / documentation-only.

    Data statements never block completeness; they are tracked separately so
    nothing is silently dropped. When a model is supplied, links referencing
    elements that are not in it are reported as dangling.
    """
    known = {s.id for s in doc.statements}
    elements = _element_ids(model) if model is not None else None

    dangling: list[DanglingLink] = []
    valid_by_statement: set[str] = set()
    for link in links:
        if link.statement_id not in known:
            dangling.append(DanglingLink(link.statement_id, missing_statement=True))
            continue
        if elements is not None:
            missing = tuple(e for e in link.element_ids if e not in elements)
            if missing:
                dangling.append(DanglingLink(link.statement_id, missing_elements=missing))
                continue
        if not link.element_ids:
            dangling.append(DanglingLink(link.statement_id, missing_elements=()))
            continue
        valid_by_statement.add(link.statement_id)

    covered: list[str] = []
    uncovered: list[str] = []
    documentation_only: list[str] = []
    for stmt in doc.statements:
        if stmt.cls is StatementClass.DATA:
            documentation_only.append(stmt.id)
        elif stmt.id in valid_by_statement:
            covered.append(stmt.id)
        else:
            uncovered.append(stmt.id)

    return CoverageReport(tuple(covered), tuple(uncovered), tuple(documentation_only), tuple(dangling))
