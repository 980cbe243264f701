"""Parser and serializer for the `.chorda` requirements markup format.

The format is line-oriented: a version header followed by blocks, each opened
by an `@`-keyword line carrying `key=value` attributes and closed by `@end`.
Statement bodies may tag participants inline as ``{{p:name}}`` and data
objects as ``[[d:name]]``. See docs/markup.md for the full grammar.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

from .model import (
    DataObject,
    DictionaryEntry,
    Participant,
    RequirementsDocument,
    Statement,
    StatementClass,
    canonicalize,
    normalize_name,
)

FILE_VERSION = 1

_KEY_RE = re.compile(r"[A-Za-z][A-Za-z0-9_.-]*")
_TAG_RE = re.compile(r"\{\{(?P<pkind>[^:{}]*):(?P<pname>[^{}]*)\}\}|\[\[(?P<dkind>[^:\[\]]*):(?P<dname>[^\[\]]*)\]\]")

_STATEMENT_KEYS = ("id", "class", "sender", "receiver", "participant", "data", "group")
_CLASS_LETTERS = {"D": StatementClass.DATA, "I": StatementClass.INTERACTION, "L": StatementClass.LOCAL}


class Severity(Enum):
    ERROR = "error"
    WARNING = "warning"


@dataclass(frozen=True)
class SourceSpan:
    byte_start: int
    byte_end: int
    line: int
    column: int


@dataclass(frozen=True)
class ParseDiagnostic:
    severity: Severity
    message: str
    span: SourceSpan

    def render(self, path: str = "<input>") -> str:
        return f"{path}:{self.span.line}:{self.span.column}: {self.severity.value}: {self.message}"


@dataclass
class _Attr:
    key: str
    value: str
    span: SourceSpan


@dataclass
class _Block:
    kind: str
    attrs: list[_Attr]
    body: list[tuple[int, str]] = field(default_factory=list)  # (line number, text)
    span: SourceSpan = SourceSpan(0, 0, 1, 1)
    terminated: bool = True


class _Lines:
    """Input split into lines with byte-offset bookkeeping for spans."""

    def __init__(self, text: str):
        self.raw = text.split("\n")
        self.stripped = [line[:-1] if line.endswith("\r") else line for line in self.raw]
        self.offsets: list[int] = []
        offset = 0
        for line in self.raw:
            self.offsets.append(offset)
            offset += len(line.encode("utf-8")) + 1
        self.total = max(0, offset - 1)

    def span(self, line_no: int, col: int = 1, length: Optional[int] = None) -> SourceSpan:
        line = self.stripped[line_no - 1]
        start = self.offsets[line_no - 1] + len(line[: col - 1].encode("utf-8"))
        if length is None:
            end = self.offsets[line_no - 1] + len(line.encode("utf-8"))
        else:
            end = start + len(line[col - 1 : col - 1 + length].encode("utf-8"))
        return SourceSpan(start, min(end, self.total), line_no, col)


def _parse_attrs(lines: _Lines, line_no: int, text: str, start_col: int, diags: list[ParseDiagnostic]) -> list[_Attr]:
    attrs: list[_Attr] = []
    seen: set[str] = set()
    pos = start_col - 1
    while pos < len(text):
        if text[pos].isspace():
            pos += 1
            continue
        match = _KEY_RE.match(text, pos)
        if not match or (match.end() >= len(text) or text[match.end()] != "="):
            diags.append(
                ParseDiagnostic(
                    Severity.ERROR,
                    f"malformed block header: expected key=value at column {pos + 1}",
                    lines.span(line_no, pos + 1),
                )
            )
            break
        key = match.group(0)
        pos = match.end() + 1
        if pos < len(text) and text[pos] == '"':
            closing = text.find('"', pos + 1)
            if closing == -1:
                diags.append(
                    ParseDiagnostic(
                        Severity.ERROR,
                        f"malformed block header: unterminated quoted value for {key!r}",
                        lines.span(line_no, pos + 1),
                    )
                )
                break
            value = text[pos + 1 : closing]
            end = closing + 1
        else:
            end = pos
            while end < len(text) and not text[end].isspace():
                end += 1
            value = text[pos:end]
        span = lines.span(line_no, match.start() + 1, end - match.start())
        if key in seen:
            diags.append(ParseDiagnostic(Severity.ERROR, f"duplicate attribute key {key!r}", span))
        else:
            seen.add(key)
            attrs.append(_Attr(key, value, span))
        pos = end
    return attrs


def _scan_blocks(lines: _Lines, diags: list[ParseDiagnostic]) -> list[_Block]:
    blocks: list[_Block] = []
    current: Optional[_Block] = None
    header_seen = False
    for line_no, text in enumerate(lines.stripped, start=1):
        word = text.split(None, 1)[0] if text.strip() else ""
        if current is not None:
            if word == "@end":
                current = None
                continue
            if word.startswith("@"):
                diags.append(
                    ParseDiagnostic(
                        Severity.ERROR,
                        f"unterminated block: {word!r} begins before @end",
                        lines.span(line_no),
                    )
                )
                current.terminated = False
                current = None
                # fall through so the new header is processed below
            else:
                current.body.append((line_no, text))
                continue
        if not text.strip():
            continue
        if word == "@chorda":
            rest = text.split(None, 1)[1].strip() if len(text.split(None, 1)) > 1 else ""
            if header_seen:
                diags.append(ParseDiagnostic(Severity.ERROR, "duplicate @chorda header", lines.span(line_no)))
            elif rest != str(FILE_VERSION):
                diags.append(
                    ParseDiagnostic(
                        Severity.ERROR,
                        f"unsupported format version {rest!r}, expected {FILE_VERSION}",
                        lines.span(line_no),
                    )
                )
            header_seen = True
            continue
        if word in ("@statement", "@dictionary", "@data", "@participant"):
            if not header_seen:
                diags.append(
                    ParseDiagnostic(
                        Severity.ERROR,
                        "missing @chorda version header before first block",
                        lines.span(line_no),
                    )
                )
                header_seen = True  # report once
            attrs = _parse_attrs(lines, line_no, text, len(word) + 1, diags)
            current = _Block(word[1:], attrs, span=lines.span(line_no))
            blocks.append(current)
            continue
        if word == "@end":
            diags.append(ParseDiagnostic(Severity.ERROR, "@end outside a block", lines.span(line_no)))
            continue
        if word.startswith("@"):
            diags.append(
                ParseDiagnostic(Severity.ERROR, f"malformed block header: unknown block type {word!r}", lines.span(line_no))
            )
            continue
        diags.append(ParseDiagnostic(Severity.ERROR, "content outside a block", lines.span(line_no)))
    if current is not None:
        diags.append(
            ParseDiagnostic(
                Severity.ERROR,
                f"unterminated block: @{current.kind} is never closed by @end",
                current.span,
            )
        )
        current.terminated = False
    return blocks


class _Registry:
    """Keeps participants or data objects deduplicated by canonical name."""

    def __init__(self, dictionary: tuple[DictionaryEntry, ...]):
        self.terms: dict[str, str] = {}
        for entry in dictionary:
            self.terms[normalize_name(entry.term)] = entry.term
            for synonym in entry.synonyms:
                self.terms.setdefault(normalize_name(synonym), entry.term)
        self.order: list[str] = []
        self.names: dict[str, str] = {}
        self.aliases: dict[str, set[str]] = {}

    def register(self, surface: str) -> str:
        display = " ".join(surface.split())
        term = self.terms.get(normalize_name(surface))
        key = normalize_name(term) if term is not None else normalize_name(surface)
        if key not in self.names:
            self.order.append(key)
            # a dictionary match pins the display name to the term; otherwise
            # the first surface form seen wins
            self.names[key] = term if term is not None else display
            self.aliases[key] = set()
        if display != self.names[key]:
            self.aliases[key].add(display)
        return key

    def register_alias(self, key: str, alias: str) -> None:
        display = " ".join(alias.split())
        if display != self.names[key]:
            self.aliases[key].add(display)


def _split_list(value: str) -> list[str]:
    return [part.strip() for part in value.split(";") if part.strip()]


def _scan_tags(
    lines: _Lines,
    body: list[tuple[int, str]],
    diags: list[ParseDiagnostic],
) -> tuple[list[str], list[str]]:
    """Collect (participant surfaces, data surfaces) tagged inline, in text order."""
    p_surfaces: list[str] = []
    d_surfaces: list[str] = []
    for line_no, text in body:
        for match in _TAG_RE.finditer(text):
            if match.group("pname") is not None:
                kind, name = match.group("pkind"), match.group("pname")
                expected = "p"
            else:
                kind, name = match.group("dkind"), match.group("dname")
                expected = "d"
            span = lines.span(line_no, match.start() + 1, match.end() - match.start())
            if kind != expected:
                diags.append(
                    ParseDiagnostic(Severity.ERROR, f"unknown inline tag kind {kind!r} in {match.group(0)!r}", span)
                )
                continue
            if not name.strip():
                diags.append(ParseDiagnostic(Severity.ERROR, f"empty name in inline tag {match.group(0)!r}", span))
                continue
            (p_surfaces if expected == "p" else d_surfaces).append(name)
    return p_surfaces, d_surfaces


def _body_text(body: list[tuple[int, str]]) -> str:
    return " ".join(text.strip() for _, text in body if text.strip())


def parse_document(text: str) -> tuple[RequirementsDocument, list[ParseDiagnostic]]:
    """Parse markup into a document plus diagnostics; never raises on bad input."""
    diags: list[ParseDiagnostic] = []
    lines = _Lines(text)
    blocks = _scan_blocks(lines, diags)

    dictionary: list[DictionaryEntry] = []
    used_terms: dict[str, str] = {}
    for block in blocks:
        if block.kind != "dictionary":
            continue
        attrs = {a.key: a for a in block.attrs}
        for attr in block.attrs:
            if attr.key != "term":
                diags.append(ParseDiagnostic(Severity.ERROR, f"unknown attribute key {attr.key!r} in @dictionary", attr.span))
        if "term" not in attrs or not attrs["term"].value.strip():
            diags.append(ParseDiagnostic(Severity.ERROR, "@dictionary requires a non-empty term=", block.span))
            continue
        term = " ".join(attrs["term"].value.split())
        definition_parts: list[str] = []
        synonyms: list[str] = []
        for line_no, body_line in block.body:
            stripped = body_line.strip()
            if not stripped:
                continue
            if stripped.startswith("definition:"):
                definition_parts.append(stripped[len("definition:") :].strip())
            elif stripped.startswith("synonyms:"):
                synonyms.extend(_split_list(stripped[len("synonyms:") :]))
            else:
                diags.append(
                    ParseDiagnostic(
                        Severity.ERROR,
                        "dictionary body lines must start with 'definition:' or 'synonyms:'",
                        lines.span(line_no),
                    )
                )
        cleaned: list[str] = []
        for synonym in synonyms:
            if normalize_name(synonym) == normalize_name(term):
                diags.append(
                    ParseDiagnostic(Severity.ERROR, f"synonym {synonym!r} repeats its own term", attrs["term"].span)
                )
            else:
                cleaned.append(synonym)
        for name in [term, *cleaned]:
            key = normalize_name(name)
            if key in used_terms:
                diags.append(
                    ParseDiagnostic(
                        Severity.ERROR,
                        f"{name!r} already appears in the dictionary entry for {used_terms[key]!r}",
                        attrs["term"].span,
                    )
                )
            else:
                used_terms[key] = term
        dictionary.append(DictionaryEntry(term, " ".join(definition_parts), frozenset(cleaned)))

    dict_tuple = tuple(dictionary)
    participants = _Registry(dict_tuple)
    data_objects = _Registry(dict_tuple)

    # names tagged inline anywhere, for the auto-registration warnings
    inline_participants: set[str] = set()
    inline_data: set[str] = set()
    for block in blocks:
        if block.kind != "statement":
            continue
        p_surfaces, d_surfaces = _scan_tags(lines, block.body, [])
        inline_participants.update(normalize_name(canonicalize(s, dict_tuple)) for s in p_surfaces)
        inline_data.update(normalize_name(canonicalize(s, dict_tuple)) for s in d_surfaces)

    warned: set[tuple[str, str]] = set()

    def resolve_ref(registry: _Registry, inline: set[str], surface: str, key: str, attr: _Attr) -> str:
        rid = registry.register(surface)
        kind = "participant" if registry is participants else "data object"
        if rid not in inline and ("ref", rid) not in warned:
            warned.add(("ref", rid))
            diags.append(
                ParseDiagnostic(
                    Severity.WARNING,
                    f"{kind} {surface!r} from {key}= is never tagged inline; registered automatically",
                    attr.span,
                )
            )
        return rid

    data_parts: dict[str, tuple[tuple[str, ...], SourceSpan]] = {}
    statements: list[Statement] = []
    statement_ids: dict[str, SourceSpan] = {}
    statement_index = 0

    for block in blocks:
        if block.kind == "dictionary":
            continue
        if block.kind == "participant":
            attrs = {a.key: a for a in block.attrs}
            for attr in block.attrs:
                if attr.key not in ("name", "aliases"):
                    diags.append(
                        ParseDiagnostic(Severity.ERROR, f"unknown attribute key {attr.key!r} in @participant", attr.span)
                    )
            if "name" not in attrs or not attrs["name"].value.strip():
                diags.append(ParseDiagnostic(Severity.ERROR, "@participant requires a non-empty name=", block.span))
                continue
            pid = participants.register(attrs["name"].value)
            for alias in _split_list(attrs["aliases"].value) if "aliases" in attrs else []:
                participants.register_alias(pid, alias)
            continue
        if block.kind == "data":
            attrs = {a.key: a for a in block.attrs}
            for attr in block.attrs:
                if attr.key not in ("name", "aliases", "parts"):
                    diags.append(
                        ParseDiagnostic(Severity.ERROR, f"unknown attribute key {attr.key!r} in @data", attr.span)
                    )
            if "name" not in attrs or not attrs["name"].value.strip():
                diags.append(ParseDiagnostic(Severity.ERROR, "@data requires a non-empty name=", block.span))
                continue
            did = data_objects.register(attrs["name"].value)
            for alias in _split_list(attrs["aliases"].value) if "aliases" in attrs else []:
                data_objects.register_alias(did, alias)
            if "parts" in attrs:
                part_ids = tuple(data_objects.register(part) for part in _split_list(attrs["parts"].value))
                data_parts[did] = (part_ids, attrs["parts"].span)
            continue

        # @statement
        statement_index += 1
        attrs_list = block.attrs
        attr_map = {a.key: a for a in attrs_list}
        p_surfaces, d_surfaces = _scan_tags(lines, block.body, diags)
        stmt_participants: list[str] = []
        for surface in p_surfaces:
            pid = participants.register(surface)
            if pid not in stmt_participants:
                stmt_participants.append(pid)
        stmt_data: list[str] = []
        for surface in d_surfaces:
            did = data_objects.register(surface)
            if did not in stmt_data:
                stmt_data.append(did)

        stmt_id = attr_map["id"].value.strip() if "id" in attr_map else f"s{statement_index}"
        if not stmt_id:
            stmt_id = f"s{statement_index}"
        if stmt_id in statement_ids:
            diags.append(
                ParseDiagnostic(
                    Severity.ERROR,
                    f"duplicate statement id {stmt_id!r}",
                    attr_map["id"].span if "id" in attr_map else block.span,
                )
            )
        else:
            statement_ids[stmt_id] = block.span

        cls = StatementClass.UNCLASSIFIED
        if "class" in attr_map:
            letter = attr_map["class"].value.strip().upper()
            if letter in _CLASS_LETTERS:
                cls = _CLASS_LETTERS[letter]
            else:
                diags.append(
                    ParseDiagnostic(
                        Severity.ERROR,
                        f"invalid class {attr_map['class'].value!r}; expected one of D, I, L",
                        attr_map["class"].span,
                    )
                )

        sender = receiver = None
        if "sender" in attr_map:
            sender = resolve_ref(participants, inline_participants, attr_map["sender"].value, "sender", attr_map["sender"])
        if "receiver" in attr_map:
            receiver = resolve_ref(
                participants, inline_participants, attr_map["receiver"].value, "receiver", attr_map["receiver"]
            )
        if "participant" in attr_map:
            pid = resolve_ref(
                participants, inline_participants, attr_map["participant"].value, "participant", attr_map["participant"]
            )
            if pid not in stmt_participants:
                stmt_participants.append(pid)

        payload: list[str] = []
        if "data" in attr_map:
            for surface in _split_list(attr_map["data"].value):
                did = resolve_ref(data_objects, inline_data, surface, "data", attr_map["data"])
                if did not in payload:
                    payload.append(did)
                if did not in stmt_data:
                    stmt_data.append(did)

        group_path: tuple[str, ...] = ()
        if "group" in attr_map:
            segments = [seg.strip() for seg in attr_map["group"].value.split("/")]
            if any(not seg for seg in segments):
                diags.append(
                    ParseDiagnostic(Severity.ERROR, "group= path has an empty segment", attr_map["group"].span)
                )
            else:
                group_path = tuple(segments)
            if cls is not StatementClass.LOCAL:
                diags.append(
                    ParseDiagnostic(Severity.ERROR, "group= is only allowed on class=L statements", attr_map["group"].span)
                )
                group_path = ()

        extra = {a.key: a.value for a in attrs_list if a.key not in _STATEMENT_KEYS}
        statements.append(
            Statement(
                id=stmt_id,
                text=_body_text(block.body),
                cls=cls,
                participants=tuple(stmt_participants),
                data_refs=tuple(stmt_data),
                sender=sender,
                receiver=receiver,
                payload=tuple(payload),
                group_path=group_path,
                attributes=extra,
            )
        )

    # composition cycle check
    for did, (parts, span) in data_parts.items():
        seen: set[str] = set()
        frontier = [did]
        while frontier:
            current = frontier.pop()
            for part in data_parts.get(current, ((), None))[0]:
                if part == did:
                    diags.append(
                        ParseDiagnostic(Severity.ERROR, f"data object {did!r} is part of itself via composition", span)
                    )
                    frontier = []
                    break
                if part not in seen:
                    seen.add(part)
                    frontier.append(part)

    doc = RequirementsDocument(
        participants=tuple(
            Participant(key, participants.names[key], frozenset(participants.aliases[key]))
            for key in participants.order
        ),
        data_objects=tuple(
            DataObject(
                key,
                data_objects.names[key],
                frozenset(data_objects.aliases[key]),
                data_parts.get(key, ((), None))[0],
            )
            for key in data_objects.order
        ),
        dictionary=dict_tuple,
        statements=tuple(statements),
    )
    return doc, diags


def has_errors(diags: list[ParseDiagnostic]) -> bool:
    return any(d.severity is Severity.ERROR for d in diags)


def _quote(value: str) -> str:
    if '"' in value:
        raise ValueError(f"markup attribute values cannot contain double quotes: {value!r}")
    return f'"{value}"'


def serialize_document(doc: RequirementsDocument) -> str:
    """Emit canonical markup; parse_document(serialize_document(doc)) reproduces doc."""
    out: list[str] = [f"@chorda {FILE_VERSION}"]
    for p in doc.participants:
        line = f"@participant name={_quote(p.name)}"
        if p.aliases:
            line += f" aliases={_quote('; '.join(sorted(p.aliases)))}"
        out.append(line)
        out.append("@end")
    for d in doc.data_objects:
        line = f"@data name={_quote(d.name)}"
        if d.aliases:
            line += f" aliases={_quote('; '.join(sorted(d.aliases)))}"
        if d.parts:
            names = [doc.data_object_by_id(part).name for part in d.parts]
            line += f" parts={_quote('; '.join(names))}"
        out.append(line)
        out.append("@end")
    for entry in doc.dictionary:
        out.append(f"@dictionary term={_quote(entry.term)}")
        if entry.definition:
            out.append(f"definition: {entry.definition}")
        if entry.synonyms:
            out.append(f"synonyms: {'; '.join(sorted(entry.synonyms))}")
        out.append("@end")
    for stmt in doc.statements:
        parts = [f"@statement id={_quote(stmt.id)}"]
        if stmt.cls is not StatementClass.UNCLASSIFIED:
            parts.append(f"class={stmt.cls.value}")
        if stmt.sender is not None:
            parts.append(f"sender={_quote(doc.participant_by_id(stmt.sender).name)}")
        if stmt.receiver is not None:
            parts.append(f"receiver={_quote(doc.participant_by_id(stmt.receiver).name)}")
        if stmt.cls is StatementClass.LOCAL and stmt.participants:
            parts.append(f"participant={_quote(doc.participant_by_id(stmt.participants[0]).name)}")
        if stmt.payload:
            names = [doc.data_object_by_id(did).name for did in stmt.payload]
            parts.append(f"data={_quote('; '.join(names))}")
        if stmt.group_path:
            parts.append(f"group={_quote('/'.join(stmt.group_path))}")
        for key in sorted(stmt.attributes):
            parts.append(f"{key}={_quote(stmt.attributes[key])}")
        out.append(" ".join(parts))
        if stmt.text:
            out.append(stmt.text)
        out.append("@end")
    return "\n".join(out) + "\n"


def display_text(stmt: Statement) -> str:
    """Statement text with inline tag markup stripped, keeping the tagged names."""
    return _TAG_RE.sub(lambda m: (m.group("pname") if m.group("pname") is not None else m.group("dname")), stmt.text)
