"""Local HTTP review service.

Serves detection candidates and rule proposals to a browser UI, accepts
verdicts, and persists every state change as one line of the append-only
decision log. The in-memory state is always a pure fold of (original corpus,
proposals, log): restarting the service on the same inputs reconstructs it
exactly, and the working corpus is replay(original, log) by construction.

Endpoints (JSON over HTTP, all under /api/v1):

    GET  /candidates?status=&source=&offset=&limit=
    GET  /candidates/{id}
    POST /candidates/{id}/decision   {verdict, actor, replacement?}
    GET  /proposals?rule=&status=
    GET  /stats
    POST /export
    GET  /sentences/{doc_id}/{sent_index}?window=N

Static files from `ui_dir` (the built frontend) are served at /.
"""
from __future__ import annotations

import json
import mimetypes
import re
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from urllib.parse import parse_qs, urlparse

from .corpus import Corpus, serialize_corpus
from .detector import Candidate
from .diffstats import diff_corpora
from .rules import (
    Decision,
    EditProposal,
    append_decision,
    decide,
    load_decisions,
    replay,
)

__all__ = ["ReviewSession", "make_server"]

VERDICT_TO_STATUS = {
    "accept": "confirmed_error",
    "modify": "confirmed_error",
    "reject": "dismissed",
    "ambiguous": "ambiguous",
}


class ReviewSession:
    """All review state, derived from (corpus, candidates, proposals, log)."""

    def __init__(
        self,
        corpus: Corpus,
        candidates: list[Candidate],
        proposals: list[EditProposal],
        log_path: str | Path,
        actor: str = "reviewer",
        out_dir: str | Path | None = None,
    ):
        self.original = corpus
        self.log_path = Path(log_path)
        self.default_actor = actor
        self.out_dir = Path(out_dir) if out_dir else self.log_path.parent
        self.proposals: dict[str, EditProposal] = {p.id: p for p in proposals}

        self.candidates: dict[str, Candidate] = {}
        self.order: list[str] = []
        for c in candidates:
            self._add_candidate(c)
        for p in proposals:  # each proposal is reviewable as a rule candidate
            if p.id in self.candidates:
                continue
            sentence = corpus.locate(p.target.doc_id, p.target.sent_index)
            context = sentence.texts() if sentence else ()
            self._add_candidate(
                Candidate(
                    id=p.id,
                    mention=p.target,
                    flags=(),
                    source="rule",
                    context=context,
                    occurrences=(p.target,),
                    rule_id=p.rule_id,
                )
            )
        # highest-impact first, stable under status updates
        self.order.sort(
            key=lambda cid: (
                -len(self.candidates[cid].occurrences),
                self.candidates[cid].mention.surface,
                cid,
            )
        )

        self._lock = threading.Lock()
        self._decisions: list[Decision] = []
        self._working: tuple[int, Corpus] | None = None
        for d in load_decisions(self.log_path):
            self._fold(d)

    def _add_candidate(self, c: Candidate) -> None:
        self.candidates[c.id] = c
        self.order.append(c.id)

    def _fold(self, d: Decision) -> None:
        self._decisions.append(d)
        c = self.candidates.get(d.proposal_id)
        if c is not None:
            status = VERDICT_TO_STATUS.get(d.verdict)
            if status:
                self.candidates[c.id] = c.with_status(status)

    def post_decision(
        self,
        candidate_id: str,
        verdict: str,
        actor: str | None = None,
        replacement: dict | None = None,
    ) -> Candidate:
        """Validate, append to the log, then fold into memory. Raises
        KeyError for unknown ids and ValueError for malformed verdicts.
        """
        with self._lock:
            if candidate_id not in self.candidates:
                raise KeyError(candidate_id)
            rep = EditProposal.from_json(replacement) if replacement else None
            d = decide(
                candidate_id, verdict, actor or self.default_actor, replacement=rep
            )
            append_decision(self.log_path, d)  # the log line is the commit point
            self._fold(d)
            return self.candidates[candidate_id]

    def decisions(self) -> list[Decision]:
        with self._lock:
            return list(self._decisions)

    def _replay_inputs(self) -> tuple[list[Decision], list[EditProposal]]:
        relevant = [
            d
            for d in self._decisions
            if d.proposal_id in self.proposals or d.verdict == "modify"
        ]
        return relevant, list(self.proposals.values())

    def working_corpus(self) -> Corpus:
        """replay(original, log); cached until the log grows."""
        with self._lock:
            n = len(self._decisions)
            if self._working and self._working[0] == n:
                return self._working[1]
            relevant, proposals = self._replay_inputs()
            corpus, _ = replay(self.original, relevant, proposals)
            self._working = (n, corpus)
            return corpus

    def stats(self) -> dict:
        by_status: dict[str, int] = {}
        by_source: dict[str, int] = {}
        for c in self.candidates.values():
            by_status[c.status] = by_status.get(c.status, 0) + 1
            by_source[c.source] = by_source.get(c.source, 0) + 1
        proposal_status: dict[str, int] = {"pending": 0}
        decided = {}
        for d in self.decisions():
            if d.proposal_id in self.proposals:
                decided[d.proposal_id] = d.verdict
        for verdict in decided.values():
            proposal_status[verdict] = proposal_status.get(verdict, 0) + 1
        proposal_status["pending"] = len(self.proposals) - len(decided)
        report = diff_corpora(self.original, self.working_corpus())
        return {
            "candidates": by_status,
            "by_source": by_source,
            "proposals": proposal_status,
            "decisions": len(self.decisions()),
            "diff": report.to_json(),
        }

    def export(self) -> dict:
        """Write the corrected corpus and its diff report; repeatable."""
        corrected = self.working_corpus()
        self.out_dir.mkdir(parents=True, exist_ok=True)
        corpus_path = self.out_dir / "corrected.conll"
        report_path = self.out_dir / "diff_report.json"
        corpus_path.write_text(serialize_corpus(corrected), encoding="utf-8")
        report = diff_corpora(self.original, corrected)
        report_path.write_text(
            json.dumps(report.to_json(), indent=2) + "\n", encoding="utf-8"
        )
        return {"corpus": str(corpus_path), "report": str(report_path)}

    # ---- read views ------------------------------------------------------

    def candidate_view(self, c: Candidate) -> dict:
        out = c.to_json()
        p = self.proposals.get(c.id)
        if p is not None:
            out["proposal"] = p.to_json()
        return out

    def list_candidates(
        self,
        status: str | None = None,
        source: str | None = None,
        rule: str | None = None,
        offset: int = 0,
        limit: int = 50,
    ) -> dict:
        ids = [
            cid
            for cid in self.order
            if (status is None or self.candidates[cid].status == status)
            and (source is None or self.candidates[cid].source == source)
            and (rule is None or self.candidates[cid].rule_id == rule)
        ]
        page = ids[offset : offset + limit]
        return {
            "total": len(ids),
            "offset": offset,
            "limit": limit,
            "items": [self.candidate_view(self.candidates[cid]) for cid in page],
        }

    def list_proposals(self, rule: str | None = None, status: str | None = None) -> dict:
        decided: dict[str, str] = {}
        for d in self.decisions():
            if d.proposal_id in self.proposals:
                decided[d.proposal_id] = d.verdict
        items = []
        for p in self.proposals.values():
            verdict = decided.get(p.id, "pending")
            if rule and p.rule_id != rule:
                continue
            if status and verdict != status:
                continue
            obj = p.to_json()
            obj["status"] = verdict
            items.append(obj)
        return {"total": len(items), "items": items}

    def sentence_view(self, doc_id: str, sent_index: int, window: int = 0) -> dict | None:
        corpus = self.working_corpus()
        sentence = corpus.locate(doc_id, sent_index)
        if sentence is None:
            return None

        def render(s) -> dict:
            return {
                "doc_id": s.doc_id,
                "sent_index": s.sent_index,
                "tokens": list(s.texts()),
                "tags": list(s.tags()),
            }

        out = render(sentence)
        if window:
            around = []
            for k in range(sent_index - window, sent_index + window + 1):
                if k == sent_index:
                    continue
                other = corpus.locate(doc_id, k)
                if other is not None:
                    around.append(render(other))
            out["window"] = around
        return out


_ROUTES = [
    ("GET", re.compile(r"^/api/v1/candidates$"), "candidates"),
    ("GET", re.compile(r"^/api/v1/candidates/([0-9a-f]+)$"), "candidate"),
    ("POST", re.compile(r"^/api/v1/candidates/([0-9a-f]+)/decision$"), "decision"),
    ("GET", re.compile(r"^/api/v1/proposals$"), "proposals"),
    ("GET", re.compile(r"^/api/v1/stats$"), "stats"),
    ("POST", re.compile(r"^/api/v1/export$"), "export"),
    ("GET", re.compile(r"^/api/v1/sentences/(.+)/(\d+)$"), "sentence"),
    # reserved for adding overlooked mentions in a later version
    ("POST", re.compile(r"^/api/v1/mentions$"), "mentions_reserved"),
]


class _Handler(BaseHTTPRequestHandler):
    server_version = "neraudit-review/0.1"

    @property
    def session(self) -> ReviewSession:
        return self.server.session  # type: ignore[attr-defined]

    def log_message(self, fmt, *args):  # quiet by default
        if self.server.verbose:  # type: ignore[attr-defined]
            super().log_message(fmt, *args)

    def _json(self, payload, status: int = 200) -> None:
        body = json.dumps(payload).encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(body)))
        self.send_header("Access-Control-Allow-Origin", "*")
        self.end_headers()
        self.wfile.write(body)

    def _error(self, status: int, message: str) -> None:
        self._json({"error": message}, status=status)

    def do_OPTIONS(self):  # CORS preflight for dev servers
        self.send_response(204)
        self.send_header("Access-Control-Allow-Origin", "*")
        self.send_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS")
        self.send_header("Access-Control-Allow-Headers", "Content-Type")
        self.end_headers()

    def do_GET(self):
        self._dispatch("GET")

    def do_POST(self):
        self._dispatch("POST")

    def _dispatch(self, method: str) -> None:
        url = urlparse(self.path)
        query = {k: v[0] for k, v in parse_qs(url.query).items()}
        for verb, pattern, name in _ROUTES:
            if verb != method:
                continue
            match = pattern.match(url.path)
            if match:
                try:
                    getattr(self, f"_route_{name}")(*match.groups(), **query)
                except BrokenPipeError:
                    pass
                except ValueError as exc:
                    self._error(400, f"bad parameter: {exc}")
                return
        if method == "GET":
            self._static(url.path)
        else:
            self._error(404, f"no such endpoint: {url.path}")

    def _read_body(self) -> dict:
        length = int(self.headers.get("Content-Length") or 0)
        if not length:
            return {}
        return json.loads(self.rfile.read(length).decode("utf-8"))

    # ---- routes ----------------------------------------------------------

    def _route_candidates(
        self, status=None, source=None, rule=None, offset="0", limit="50", **_
    ):
        self._json(
            self.session.list_candidates(
                status=status or None,
                source=source or None,
                rule=rule or None,
                offset=int(offset),
                limit=int(limit),
            )
        )

    def _route_candidate(self, cid, window="0", **_):
        c = self.session.candidates.get(cid)
        if c is None:
            self._error(404, f"unknown candidate {cid}")
            return
        out = self.session.candidate_view(c)
        m = c.mention
        out["sentence"] = self.session.sentence_view(
            m.doc_id, m.sent_index, window=int(window)
        )
        self._json(out)

    def _route_decision(self, cid, **_):
        try:
            body = self._read_body()
        except (ValueError, json.JSONDecodeError):
            self._error(400, "request body is not valid JSON")
            return
        verdict = body.get("verdict", "")
        try:
            c = self.session.post_decision(
                cid,
                verdict,
                actor=body.get("actor"),
                replacement=body.get("replacement"),
            )
        except KeyError:
            self._error(404, f"unknown candidate {cid}")
            return
        except ValueError as exc:
            self._error(400, str(exc))
            return
        self._json({"candidate": self.session.candidate_view(c)})

    def _route_proposals(self, rule=None, status=None, **_):
        self._json(self.session.list_proposals(rule=rule or None, status=status or None))

    def _route_stats(self, **_):
        self._json(self.session.stats())

    def _route_export(self, **_):
        self._json(self.session.export())

    def _route_sentence(self, doc_id, sent_index, window="0", **_):
        out = self.session.sentence_view(doc_id, int(sent_index), window=int(window))
        if out is None:
            self._error(404, f"no sentence {doc_id}[{sent_index}]")
            return
        self._json(out)

    def _route_mentions_reserved(self, **_):
        self._error(501, "adding new mentions is reserved for a future version")

    # ---- static UI -------------------------------------------------------

    def _static(self, path: str) -> None:
        ui_dir = self.server.ui_dir  # type: ignore[attr-defined]
        if ui_dir is None:
            self._error(404, "no UI bundle configured (start with --ui-dir)")
            return
        rel = path.lstrip("/") or "index.html"
        target = (ui_dir / rel).resolve()
        if not str(target).startswith(str(ui_dir.resolve())) or not target.is_file():
            self._error(404, f"not found: {path}")
            return
        ctype = mimetypes.guess_type(str(target))[0] or "application/octet-stream"
        body = target.read_bytes()
        self.send_response(200)
        self.send_header("Content-Type", ctype)
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)


def make_server(
    session: ReviewSession,
    port: int = 8400,
    host: str = "127.0.0.1",
    ui_dir: str | Path | None = None,
    verbose: bool = False,
) -> ThreadingHTTPServer:
    """Build (but do not start) the threaded HTTP server; port 0 picks a
    free port, reachable afterwards via server.server_address.
    """
    server = ThreadingHTTPServer((host, port), _Handler)
    server.session = session  # type: ignore[attr-defined]
    server.ui_dir = Path(ui_dir) if ui_dir else None  # type: ignore[attr-defined]
    server.verbose = verbose  # type: ignore[attr-defined]
    return server
