"""HTTP facade over the pipeline for the companion modeler UI.

Documents are stored as `.chorda` markup files under a data directory; the
markup is the source of truth and every model artifact is derived on demand.
Mutations are serialized per document and guarded by an optimistic version
counter (sent back as the ``X-Document-Version`` header / ``version`` field;
clients resubmit it via ``If-Match``).
"""

from __future__ import annotations

import json
import os
import re
import threading
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from fastapi import FastAPI, Request, Response
from fastapi.responses import JSONResponse, PlainTextResponse

from . import jsonio
from .classify import suggest_class, validate_classification
from .layout import layout
from .markup import Severity, has_errors, parse_document, serialize_document
from .model import RequirementsDocument, TraceLink
from .orchestrate import BindingError, ExpansionError, bind_by_name, expand
from .skeleton import generate_skeleton
from .svg import to_svg
from .trace import check_completeness

_DOC_ID = re.compile(r"^[A-Za-z0-9][A-Za-z0-9._-]*$")


@dataclass
class StoredDocument:
    doc_id: str
    version: int
    markup: str


class DocumentStore:
    """File-backed store with per-document write serialization.

    Writes go through an atomic rename, so lock-free readers always see a
    consistent snapshot.
    """

    def __init__(self, root: Path):
        self.root = root
        self.root.mkdir(parents=True, exist_ok=True)
        self._locks: dict[str, threading.Lock] = {}
        self._locks_guard = threading.Lock()

    def lock(self, doc_id: str) -> threading.Lock:
        with self._locks_guard:
            return self._locks.setdefault(doc_id, threading.Lock())

    def _markup_path(self, doc_id: str) -> Path:
        return self.root / f"{doc_id}.chorda"

    def _meta_path(self, doc_id: str) -> Path:
        return self.root / f"{doc_id}.meta.json"

    def _bindings_path(self, doc_id: str) -> Path:
        return self.root / f"{doc_id}.bindings.json"

    def list_ids(self) -> list[str]:
        return sorted(p.stem for p in self.root.glob("*.chorda"))

    def load(self, doc_id: str) -> Optional[StoredDocument]:
        path = self._markup_path(doc_id)
        if not path.exists():
            return None
        version = 1
        meta = self._meta_path(doc_id)
        if meta.exists():
            try:
                version = int(json.loads(meta.read_text(encoding="utf-8"))["version"])
            except (ValueError, KeyError, json.JSONDecodeError):
                version = 1
        return StoredDocument(doc_id, version, path.read_text(encoding="utf-8"))

    def _atomic_write(self, path: Path, content: str) -> None:
        tmp = path.with_suffix(path.suffix + ".tmp")
        tmp.write_text(content, encoding="utf-8", newline="\n")
        os.replace(tmp, path)

    def save(self, doc_id: str, markup: str, version: int) -> None:
        self._atomic_write(self._markup_path(doc_id), markup)
        self._atomic_write(self._meta_path(doc_id), json.dumps({"version": version}) + "\n")

    def load_bindings(self, doc_id: str) -> Optional[str]:
        path = self._bindings_path(doc_id)
        return path.read_text(encoding="utf-8") if path.exists() else None

    def save_bindings(self, doc_id: str, content: str) -> None:
        self._atomic_write(self._bindings_path(doc_id), content)


def _diag_payload(diags) -> list[dict]:
    return [
        {
            "severity": d.severity.value,
            "message": d.message,
            "span": {
                "byteStart": d.span.byte_start,
                "byteEnd": d.span.byte_end,
                "line": d.span.line,
                "column": d.span.column,
            },
        }
        for d in diags
    ]


def _issue_payload(issues) -> list[dict]:
    return [{"statementId": i.statement_id, "code": i.code, "message": i.message} for i in issues]


class _ApiError(Exception):
    def __init__(self, status: int, payload: dict):
        self.status = status
        self.payload = payload


def create_app(data_dir: Path) -> FastAPI:
    app = FastAPI(title="chorda service", version="1.0")
    store = DocumentStore(Path(data_dir))

    @app.exception_handler(_ApiError)
    async def handle_api_error(_request: Request, exc: _ApiError) -> JSONResponse:
        return JSONResponse(exc.payload, status_code=exc.status)

    def get_or_404(doc_id: str) -> StoredDocument:
        stored = store.load(doc_id)
        if stored is None:
            raise _ApiError(404, {"error": f"unknown document {doc_id!r}"})
        return stored

    def parse_or_400(stored: StoredDocument) -> RequirementsDocument:
        doc, diags = parse_document(stored.markup)
        if has_errors(diags):
            raise _ApiError(400, {"error": "document has parse errors", "diagnostics": _diag_payload(diags)})
        return doc

    def ready_or_400(stored: StoredDocument) -> RequirementsDocument:
        doc = parse_or_400(stored)
        issues = validate_classification(doc)
        if issues:
            raise _ApiError(400, {"error": "document has classification issues", "issues": _issue_payload(issues)})
        return doc

    def derive_expanded(stored: StoredDocument):
        doc = ready_or_400(stored)
        model, links = generate_skeleton(doc)
        raw = store.load_bindings(stored.doc_id)
        if raw is not None:
            try:
                bindings = jsonio.bindings_from_json(raw)
            except jsonio.SchemaError as exc:
                raise _ApiError(400, {"error": f"stored bindings are invalid: {exc}"})
        else:
            bindings = bind_by_name(model, doc)
        try:
            expanded, local_links = expand(model, doc, bindings)
        except (BindingError, ExpansionError) as exc:
            raise _ApiError(400, {"error": str(exc)})
        return doc, expanded, links + local_links

    @app.get("/api/v1/documents")
    def list_documents() -> JSONResponse:
        out = []
        for doc_id in store.list_ids():
            stored = store.load(doc_id)
            if stored is not None:
                out.append({"id": doc_id, "version": stored.version})
        return JSONResponse({"documents": out})

    @app.get("/api/v1/documents/{doc_id}")
    def get_document(doc_id: str, request: Request, view: Optional[str] = None) -> Response:
        stored = get_or_404(doc_id)
        wants_json = view == "json" or "application/json" in request.headers.get("accept", "")
        headers = {"X-Document-Version": str(stored.version), "ETag": f'"{stored.version}"'}
        if not wants_json:
            return PlainTextResponse(stored.markup, headers=headers)
        doc, diags = parse_document(stored.markup)
        return JSONResponse(
            {
                "id": doc_id,
                "version": stored.version,
                "markup": stored.markup,
                "document": jsonio.document_to_dict(doc),
                "diagnostics": _diag_payload(diags),
            },
            headers=headers,
        )

    @app.put("/api/v1/documents/{doc_id}")
    async def put_document(doc_id: str, request: Request) -> Response:
        if not _DOC_ID.match(doc_id):
            raise _ApiError(400, {"error": "document ids must match [A-Za-z0-9][A-Za-z0-9._-]*"})
        body = await request.body()
        content_type = request.headers.get("content-type", "text/plain").split(";")[0].strip()
        if content_type == "application/json":
            try:
                payload = json.loads(body)
            except json.JSONDecodeError as exc:
                raise _ApiError(400, {"error": f"invalid JSON body: {exc}"})
            if isinstance(payload, dict) and "markup" in payload:
                markup = str(payload["markup"])
            elif isinstance(payload, dict) and "document" in payload:
                try:
                    markup = serialize_document(jsonio.document_from_dict(payload["document"]))
                except (jsonio.SchemaError, KeyError, ValueError) as exc:
                    raise _ApiError(400, {"error": f"invalid document view: {exc}"})
            else:
                raise _ApiError(400, {"error": "JSON body must carry 'markup' or 'document'"})
        else:
            markup = body.decode("utf-8")

        doc, diags = parse_document(markup)
        if has_errors(diags):
            raise _ApiError(400, {"error": "document has parse errors", "diagnostics": _diag_payload(diags)})

        with store.lock(doc_id):
            stored = store.load(doc_id)
            if_match = request.headers.get("if-match")
            if stored is not None:
                expected = str(stored.version)
                if if_match is None or if_match.strip('"') not in (expected, "*"):
                    raise _ApiError(
                        409,
                        {"error": "version conflict", "currentVersion": stored.version},
                    )
                version = stored.version + 1
            else:
                version = 1
            store.save(doc_id, markup, version)
        return JSONResponse(
            {"id": doc_id, "version": version, "diagnostics": _diag_payload(diags)},
            status_code=200 if stored is not None else 201,
            headers={"X-Document-Version": str(version), "ETag": f'"{version}"'},
        )

    @app.post("/api/v1/documents/{doc_id}/classify")
    def classify_document(doc_id: str) -> JSONResponse:
        stored = get_or_404(doc_id)
        doc = parse_or_400(stored)
        suggestions = []
        for stmt in doc.statements:
            suggested, rationale = suggest_class(stmt)
            suggestions.append(
                {
                    "statementId": stmt.id,
                    "assigned": stmt.cls.value,
                    "suggested": suggested.value,
                    "rationale": rationale,
                }
            )
        issues = validate_classification(doc)
        return JSONResponse(
            {"suggestions": suggestions, "issues": _issue_payload(issues), "ready": not issues}
        )

    @app.post("/api/v1/documents/{doc_id}/skeleton")
    def skeleton_document(doc_id: str) -> Response:
        stored = get_or_404(doc_id)
        doc = ready_or_400(stored)
        model, links = generate_skeleton(doc)
        return Response(jsonio.to_json(model, links), media_type="application/json")

    @app.post("/api/v1/documents/{doc_id}/bindings")
    async def put_bindings(doc_id: str, request: Request) -> JSONResponse:
        stored = get_or_404(doc_id)
        doc = ready_or_400(stored)
        model, _ = generate_skeleton(doc)
        body = (await request.body()).decode("utf-8")
        try:
            payload = json.loads(body) if body.strip() else {}
        except json.JSONDecodeError as exc:
            raise _ApiError(400, {"error": f"invalid JSON body: {exc}"})
        if isinstance(payload, dict) and payload.get("bindByName"):
            bindings = bind_by_name(model, doc)
        else:
            try:
                bindings = jsonio.bindings_from_json(body)
            except jsonio.SchemaError as exc:
                raise _ApiError(400, {"error": str(exc)})
            try:
                for binding in bindings:
                    from .orchestrate import bind_group

                    bind_group(model, (), binding.participant_id, binding.group_path, binding.target_sub_process_id)
            except BindingError as exc:
                raise _ApiError(400, {"error": str(exc)})
        with store.lock(doc_id):
            store.save_bindings(doc_id, jsonio.bindings_to_json(bindings))
        return JSONResponse(json.loads(jsonio.bindings_to_json(bindings)))

    @app.post("/api/v1/documents/{doc_id}/expand")
    def expand_document(doc_id: str) -> Response:
        stored = get_or_404(doc_id)
        _, expanded, links = derive_expanded(stored)
        return Response(jsonio.to_json(expanded, links), media_type="application/json")

    @app.get("/api/v1/documents/{doc_id}/coverage")
    def coverage_document(doc_id: str) -> JSONResponse:
        stored = get_or_404(doc_id)
        doc, expanded, links = derive_expanded(stored)
        return JSONResponse(check_completeness(doc, links, expanded).to_dict())

    @app.get("/api/v1/documents/{doc_id}/diagram.svg")
    def diagram_document(doc_id: str) -> Response:
        stored = get_or_404(doc_id)
        _, expanded, _links = derive_expanded(stored)
        return Response(to_svg(layout(expanded)), media_type="image/svg+xml")

    return app
