"""Small HTTP service for the assessor workbench.

Single scoring authority: clients render what this service computes and
never aggregate on their own. State lives in the same assessment files the
CLI uses; writes go through optimistic version tokens plus a per-assessment
lock, so concurrent edits resolve to exactly one winner.
"""
from __future__ import annotations

import json
import re
import threading
from collections import defaultdict
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from typing import Optional
from urllib.parse import parse_qs, urlparse

from . import analytics
from .assessment import (
    Assessment,
    AssessmentError,
    AssessmentParseError,
    EvidenceItem,
    LeafEntry,
    STATUSES,
)
from .rubric import Rubric, UnknownCriterionError
from .scoring import score_tree, serialize_report
from .store import AssessmentStore, StoreError, TokenMismatch, version_token


class ServiceState:
    def __init__(self, data_dir: str | Path):
        self.store = AssessmentStore(data_dir)
        self.rubric: Rubric = self.store.load_rubric()
        self._locks: dict[str, threading.Lock] = defaultdict(threading.Lock)
        self._locks_guard = threading.Lock()

    def lock_for(self, slug: str) -> threading.Lock:
        with self._locks_guard:
            return self._locks[slug]

    def load(self, slug: str) -> tuple[Assessment, str]:
        return self.store.load(slug, self.rubric)


class _JsonBody(dict):
    pass


class ApiHandler(BaseHTTPRequestHandler):
    server_version = "frameval"
    protocol_version = "HTTP/1.1"
    state: ServiceState  # set by make_server

    # -- plumbing ---------------------------------------------------------

    def log_message(self, format, *args):  # quiet by default
        pass

    def _send(self, status: int, body: bytes | str,
              content_type: str = "application/json; charset=utf-8",
              etag: Optional[str] = None) -> None:
        data = body.encode("utf-8") if isinstance(body, str) else body
        self.send_response(status)
        self.send_header("Content-Type", content_type)
        self.send_header("Content-Length", str(len(data)))
        if etag is not None:
            self.send_header("ETag", f'"{etag}"')
        self.end_headers()
        self.wfile.write(data)

    def _send_json(self, status: int, payload, etag: Optional[str] = None) -> None:
        self._send(status, json.dumps(payload, indent=2, ensure_ascii=False) + "\n", etag=etag)

    def _error(self, status: int, message: str, **extra) -> None:
        self._send_json(status, {"error": message, **extra})

    def _read_body(self) -> _JsonBody:
        length = int(self.headers.get("Content-Length") or 0)
        raw = self.rfile.read(length) if length else b""
        if not raw:
            return _JsonBody()
        try:
            parsed = json.loads(raw.decode("utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError) as exc:
            raise ValueError(f"invalid JSON body: {exc}") from exc
        if not isinstance(parsed, dict):
            raise ValueError("request body must be a JSON object")
        return _JsonBody(parsed)

    # -- routing ----------------------------------------------------------

    def do_GET(self) -> None:  # noqa: N802 (http.server API)
        try:
            self._route_get()
        except StoreError as exc:
            self._error(404, str(exc))
        except UnknownCriterionError as exc:
            self._error(404, f"unknown criterion {exc}")
        except (AssessmentParseError, analytics.AnalyticsError, ValueError) as exc:
            self._error(400, str(exc))

    def do_PUT(self) -> None:  # noqa: N802
        try:
            self._route_put()
        except TokenMismatch as exc:
            self._error(409, str(exc), current_token=exc.actual)
        except StoreError as exc:
            self._error(404, str(exc))
        except UnknownCriterionError as exc:
            self._error(404, f"unknown criterion {exc}")
        except (AssessmentError, ValueError) as exc:
            self._error(400, str(exc))

    def do_POST(self) -> None:  # noqa: N802
        try:
            self._route_post()
        except StoreError as exc:
            self._error(404, str(exc))
        except UnknownCriterionError as exc:
            self._error(404, f"unknown criterion {exc}")
        except (analytics.AnalyticsError, AssessmentError, ValueError) as exc:
            self._error(400, str(exc))

    # -- GET --------------------------------------------------------------

    def _route_get(self) -> None:
        state = self.state
        url = urlparse(self.path)
        parts = [p for p in url.path.split("/") if p]
        query = parse_qs(url.query)

        if parts == ["rubric"]:
            self._send(200, state.store.rubric_path.read_bytes())
            return

        if parts == ["assessments"]:
            listing = []
            for slug in state.store.list_ids():
                assessment, token = state.load(slug)
                listing.append({
                    "id": slug,
                    "company": assessment.subject.company,
                    "framework_title": assessment.subject.framework_title,
                    "token": token,
                })
            self._send_json(200, listing)
            return

        if len(parts) == 2 and parts[0] == "assessments":
            raw = state.store.read_bytes(parts[1])
            self._send(200, raw, etag=version_token(raw))
            return

        if len(parts) == 3 and parts[0] == "assessments" and parts[2] == "report":
            assessment, token = state.load(parts[1])
            report = score_tree(state.rubric, assessment)
            self._send(200, serialize_report(report), etag=token)
            return

        if parts == ["bestinclass"]:
            assessments = [state.load(slug)[0] for slug in state.store.list_ids()]
            result = analytics.best_in_class(state.rubric, assessments)
            self._send(200, serialize_report(result.report))
            return

        if parts == ["rank"]:
            reports = [score_tree(state.rubric, state.load(slug)[0])
                       for slug in state.store.list_ids()]
            result = analytics.rank_and_stats(reports)
            self._send_json(200, analytics.rank_to_json(result))
            return

        if parts == ["diff"]:
            base_ref = (query.get("base") or [None])[0]
            head_ref = (query.get("head") or [None])[0]
            if not base_ref or not head_ref:
                raise ValueError("diff needs base and head query parameters")
            base, _ = state.load(base_ref)
            head, _ = state.load(head_ref)
            report = analytics.diff(state.rubric, base, head)
            self._send_json(200, analytics.diff_to_json(report))
            return

        if len(parts) == 2 and parts[0] == "lint":
            tolerance = int((query.get("tolerance") or ["1"])[0])
            assessment, _ = state.load(parts[1])
            findings = analytics.lint_consistency(state.rubric, assessment, tolerance=tolerance)
            self._send_json(200, analytics.lint_to_json(findings))
            return

        self._error(404, f"no such resource: {url.path}")

    # -- PUT ---------------------------------------------------------------

    _leaf_path = re.compile(r"^/assessments/([^/]+)/leaves/([^/]+)$")

    def _route_put(self) -> None:
        state = self.state
        match = self._leaf_path.match(urlparse(self.path).path)
        if not match:
            self._error(404, f"no such resource: {self.path}")
            return
        slug, criterion_id = match.group(1), match.group(2)
        body = self._read_body()

        node = state.rubric.node(criterion_id)  # raises UnknownCriterionError
        if not node.is_leaf:
            raise AssessmentError(f"{criterion_id} is not a rubric leaf")
        expected_token = body.get("expected_token")
        if not isinstance(expected_token, str) or not expected_token:
            raise ValueError("expected_token is required")
        score = body.get("score")
        if isinstance(score, bool) or not isinstance(score, int):
            raise AssessmentError("score must be an integer")
        if score not in state.rubric.scale:
            raise AssessmentError(f"score {score} is not on the rubric scale")
        rationale = body.get("rationale")
        if not isinstance(rationale, str) or not rationale.strip():
            raise AssessmentError("rationale must be nonempty")
        evidence = []
        for item in body.get("evidence", []):
            if not isinstance(item, dict):
                raise AssessmentError("evidence items must be objects")
            evidence.append(EvidenceItem(
                quote=item.get("quote", ""),
                location=item.get("location", ""),
                note=item.get("note"),
            ))
        improvements = body.get("improvements")
        if improvements is not None and not isinstance(improvements, str):
            raise AssessmentError("improvements must be a string")
        status = body.get("status", "reconciled")
        if status not in STATUSES:
            raise AssessmentError(f"unknown status {status!r}")

        entry = LeafEntry(
            criterion_id=criterion_id, score=score, rationale=rationale,
            evidence=tuple(evidence), improvements=improvements, status=status,
        )
        with state.lock_for(slug):
            assessment, _token = state.load(slug)
            updated = assessment.with_entry(entry)
            new_token = state.store.replace_if(slug, updated, expected_token)
        self._send_json(200, {"token": new_token})

    # -- POST ----------------------------------------------------------------

    def _route_post(self) -> None:
        state = self.state
        parts = [p for p in urlparse(self.path).path.split("/") if p]
        if parts != ["whatif"]:
            self._error(404, f"no such resource: {self.path}")
            return
        body = self._read_body()
        ref = body.get("assessment") or body.get("id")
        if not isinstance(ref, str) or not ref:
            raise ValueError("whatif needs an assessment id")
        overrides_raw = body.get("overrides", {})
        if not isinstance(overrides_raw, dict):
            raise ValueError("overrides must be an object of leaf id -> score")
        overrides: dict[str, int] = {}
        for criterion_id, value in overrides_raw.items():
            if isinstance(value, bool) or not isinstance(value, int):
                raise analytics.AnalyticsError(
                    f"override {criterion_id}={value!r} must be an integer")
            overrides[criterion_id] = value
        assessment, _ = state.load(ref)
        result = analytics.what_if(state.rubric, assessment, overrides)
        self._send_json(200, analytics.whatif_to_json(result))


def make_server(data_dir: str | Path, host: str = "127.0.0.1",
                port: int = 0) -> ThreadingHTTPServer:
    state = ServiceState(data_dir)
    handler = type("BoundApiHandler", (ApiHandler,), {"state": state})
    return ThreadingHTTPServer((host, port), handler)


def serve(data_dir: str | Path, host: str = "127.0.0.1", port: int = 8321) -> None:
    server = make_server(data_dir, host, port)
    bound_host, bound_port = server.server_address[:2]
    print(f"serving {data_dir} on http://{bound_host}:{bound_port}", flush=True)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
