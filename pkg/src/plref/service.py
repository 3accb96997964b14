"""Local HTTP+JSON facade over the analyses and transforms.

Owns the session's Program snapshot and version; previews bind to the
version they were computed from and applying a stale preview is rejected
with 409.  Loopback only, no auth: this is a developer tool.
"""

from __future__ import annotations

import hashlib
import json
import os
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from urllib.parse import parse_qs, urlparse

from .analysis import all_suggestions
from .dispatch import BadRequest, find_suggestion, suggestion_editset, \
    transform_editset
from .editset import EditSet, apply as apply_edits, check, unified_diff
from .errors import ConflictError, PlrefError, TransformError
from .model import Program, load_project

DEFAULT_PORT = 7171


class Session:
    """Snapshot + version + pending previews, guarded by one lock."""

    def __init__(self, program: Program):
        self.lock = threading.Lock()
        self.program = program
        self.previews: dict[str, tuple[EditSet, int]] = {}
        self.rejected: set[str] = set()

    @property
    def version(self) -> int:
        return self.program.version

    def snapshot(self) -> Program:
        with self.lock:
            return self.program

    def add_preview(self, editset: EditSet) -> str:
        blob = json.dumps(editset.to_json(), sort_keys=True)
        preview_id = hashlib.sha1(blob.encode()).hexdigest()[:12]
        with self.lock:
            self.previews[preview_id] = (editset, self.program.version)
        return preview_id

    def apply(self, preview_id: str, accept_semantics_change: bool) -> int:
        with self.lock:
            entry = self.previews.get(preview_id)
            if entry is None:
                raise BadRequest(f"unknown preview {preview_id}")
            editset, version = entry
            if version != self.program.version:
                raise _Stale(f"preview built for version {version}, "
                             f"session is at {self.program.version}")
            if editset.semantics_flag != "preserving" \
                    and not accept_semantics_change:
                raise TransformError(
                    f"semantics flag is '{editset.semantics_flag}'; set "
                    f"accept_semantics_change to proceed")
            apply_edits(editset, self.program)
            self.program = load_project(self.program.manifest.path,
                                        version=self.program.version + 1)
            self.previews.clear()
            return self.program.version


class _Stale(PlrefError):
    pass


def _project_payload(program: Program) -> dict:
    return {
        "version": program.version,
        "modules": [
            {
                "name": m,
                "file": program.modules[m].path,
                "exports": [f"{n}/{a}" for n, a in program.modules[m].exports],
            }
            for m in program.module_order
        ],
        "predicates": [str(p) for p in sorted(program.predicates)],
        "roots": [str(p) for p in sorted(program.roots)],
        "warnings": list(program.warnings),
        "files": list(program.file_order),
    }


def make_handler(session: Session, ui_dir: str | None):
    class Handler(BaseHTTPRequestHandler):
        protocol_version = "HTTP/1.1"

        def log_message(self, fmt, *args):  # quiet by default
            pass

        # -- plumbing ------------------------------------------------------

        def _send(self, status: int, body: bytes, content_type: str):
            self.send_response(status)
            self.send_header("Content-Type", content_type)
            self.send_header("Content-Length", str(len(body)))
            self.send_header("X-Plref-Version", str(session.version))
            host = self.headers.get("Host", f"127.0.0.1:{DEFAULT_PORT}")
            self.send_header("Access-Control-Allow-Origin", f"http://{host}")
            self.end_headers()
            self.wfile.write(body)

        def _json(self, status: int, payload: dict):
            self._send(status, json.dumps(payload).encode(),
                       "application/json; charset=utf-8")

        def _error(self, status: int, name: str, message: str):
            self._json(status, {"error": name, "message": message,
                                "version": session.version})

        def _body(self) -> dict:
            length = int(self.headers.get("Content-Length") or 0)
            if length == 0:
                return {}
            raw = self.rfile.read(length)
            try:
                parsed = json.loads(raw)
            except json.JSONDecodeError:
                raise BadRequest("request body is not valid JSON")
            if not isinstance(parsed, dict):
                raise BadRequest("request body must be a JSON object")
            return parsed

        # -- routes --------------------------------------------------------

        def do_GET(self):
            url = urlparse(self.path)
            try:
                if url.path == "/api/project":
                    program = session.snapshot()
                    self._json(200, _project_payload(program))
                elif url.path == "/api/suggestions":
                    program = session.snapshot()
                    items = [s.to_json() for s in all_suggestions(program)
                             if s.id not in session.rejected]
                    self._json(200, {"version": program.version,
                                     "suggestions": items})
                elif url.path == "/api/source":
                    self._source(url)
                else:
                    self._static(url.path)
            except PlrefError as exc:
                self._error(422, exc.name, str(exc))

        def _source(self, url):
            params = parse_qs(url.query)
            file = (params.get("file") or [""])[0]
            program = session.snapshot()
            pf = program.files.get(file)
            if pf is None:
                self._error(400, "BadRequest", f"unknown file {file!r}")
                return
            self._send(200, pf.text.encode(), "text/plain; charset=utf-8")

        def _static(self, path: str):
            if ui_dir is None:
                self._error(404, "NotFound", "no UI bundle configured")
                return
            rel = path.lstrip("/") or "index.html"
            full = os.path.normpath(os.path.join(ui_dir, rel))
            if not full.startswith(os.path.abspath(ui_dir)) \
                    or not os.path.isfile(full):
                if os.path.isfile(os.path.join(ui_dir, "index.html")) \
                        and "." not in rel:
                    full = os.path.join(ui_dir, "index.html")
                else:
                    self._error(404, "NotFound", path)
                    return
            ctype = {
                ".html": "text/html; charset=utf-8",
                ".js": "text/javascript; charset=utf-8",
                ".css": "text/css; charset=utf-8",
                ".map": "application/json",
                ".svg": "image/svg+xml",
            }.get(os.path.splitext(full)[1], "application/octet-stream")
            with open(full, "rb") as fh:
                self._send(200, fh.read(), ctype)

        def do_POST(self):
            url = urlparse(self.path)
            try:
                body = self._body()
                if url.path == "/api/preview":
                    self._preview(body)
                elif url.path == "/api/apply":
                    self._apply(body)
                elif url.path == "/api/reject":
                    self._reject(body)
                else:
                    self._error(404, "NotFound", url.path)
            except BadRequest as exc:
                self._error(400, exc.name, str(exc))
            except _Stale as exc:
                self._error(409, "Stale", str(exc))
            except ConflictError as exc:
                self._error(409, "Conflict", str(exc))
            except PlrefError as exc:
                self._error(422, exc.name, str(exc))

        def _preview(self, body: dict):
            program = session.snapshot()
            if "suggestion_id" in body:
                suggestion = find_suggestion(program, body["suggestion_id"])
                if suggestion is None:
                    raise BadRequest(
                        f"no suggestion with id {body['suggestion_id']}")
                editset = suggestion_editset(program, suggestion,
                                             body.get("params", {}))
            elif "transform" in body:
                editset = transform_editset(program, body["transform"],
                                            body.get("params", {}))
            else:
                raise BadRequest("preview needs suggestion_id or transform")
            conflicts = check(editset, program)
            if conflicts:
                raise ConflictError(conflicts)
            preview_id = session.add_preview(editset)
            self._json(200, {
                "preview_id": preview_id,
                "version": program.version,
                "diff": unified_diff(editset, program),
                "semantics_flag": editset.semantics_flag,
                "annotations": editset.annotations,
            })

        def _apply(self, body: dict):
            preview_id = body.get("preview_id")
            if not preview_id:
                raise BadRequest("apply needs preview_id")
            new_version = session.apply(
                preview_id, bool(body.get("accept_semantics_change")))
            self._json(200, {"new_version": new_version})

        def _reject(self, body: dict):
            suggestion_id = body.get("suggestion_id")
            if not suggestion_id:
                raise BadRequest("reject needs suggestion_id")
            session.rejected.add(suggestion_id)
            self._json(200, {"rejected": suggestion_id,
                             "version": session.version})

    return Handler


def find_ui_dir() -> str | None:
    env = os.environ.get("PLREF_UI_DIR")
    candidates = [env] if env else []
    here = os.path.dirname(os.path.abspath(__file__))
    candidates += [
        os.path.join(os.getcwd(), "frontend", "dist"),
        os.path.abspath(os.path.join(here, "..", "..", "frontend", "dist")),
    ]
    for cand in candidates:
        if cand and os.path.isfile(os.path.join(cand, "index.html")):
            return cand
    return None


def make_server(program: Program, port: int = DEFAULT_PORT,
                ui_dir: str | None = None) -> tuple[ThreadingHTTPServer, Session]:
    session = Session(program)
    handler = make_handler(session, ui_dir if ui_dir else find_ui_dir())
    server = ThreadingHTTPServer(("127.0.0.1", port), handler)
    return server, session


def serve(program: Program, port: int = DEFAULT_PORT,
          ui_dir: str | None = None):
    server, _ = make_server(program, port, ui_dir)
    print(f"plref service on http://127.0.0.1:{port}/ "
          f"(project version {program.version})")
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
