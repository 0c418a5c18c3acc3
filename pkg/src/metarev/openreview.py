"""Best-effort OpenReview notes-API fetcher.

Pages through /notes for a venue, writes raw response bodies plus a
note-id manifest when an archive directory is given, and emits records in
the unified corpus line format. The emitted lines are never trusted
directly: downstream code must run them through corpus.parse_corpus.
Venue schemas drift constantly, so notes missing the expected fields are
logged and skipped rather than treated as fatal.
"""

from __future__ import annotations

import json
import logging
import re
import threading
from pathlib import Path
from typing import Optional

import requests

logger = logging.getLogger(__name__)

_VENUE_LOCKS: dict[str, threading.Lock] = {}
_VENUE_LOCKS_GUARD = threading.Lock()


class NetworkError(Exception):
    """Endpoint unreachable or returned a server error."""


class AuthRequired(Exception):
    """Endpoint answered 401/403."""


class SchemaDrift(Exception):
    """A note is missing fields this client expects; callers skip it."""


def _venue_lock(venue_id: str) -> threading.Lock:
    with _VENUE_LOCKS_GUARD:
        return _VENUE_LOCKS.setdefault(venue_id, threading.Lock())


def _content_value(content: dict, key: str):
    value = content.get(key)
    if isinstance(value, dict) and "value" in value:
        return value["value"]
    return value


def _leading_number(text) -> Optional[float]:
    # Ratings often arrive as "8: accept, good paper"; keep the number.
    if isinstance(text, (int, float)) and not isinstance(text, bool):
        return float(text)
    if isinstance(text, str):
        match = re.match(r"\s*(-?\d+(?:\.\d+)?)", text)
        if match:
            return float(match.group(1))
    return None


def _reply_text(content: dict) -> str:
    parts = []
    for key in ("review", "summary", "strengths", "weaknesses", "comment", "questions"):
        value = _content_value(content, key)
        if isinstance(value, str) and value.strip():
            parts.append(value.strip())
    return "\n\n".join(parts)


def _reply_to_review(reply: dict) -> Optional[dict]:
    invitation = reply.get("invitation") or " ".join(reply.get("invitations", []) or [])
    if "review" not in invitation.lower():
        return None
    content = reply.get("content")
    if not isinstance(content, dict):
        return None
    text = _reply_text(content)
    if not text:
        return None
    signatures = reply.get("signatures") or []
    reviewer = signatures[0].rsplit("/", 1)[-1] if signatures else ""
    ratings = {}
    for key in ("rating", "confidence", "soundness", "presentation", "contribution"):
        number = _leading_number(_content_value(content, key))
        if number is not None:
            ratings[key] = number
    return {
        "reviewer": reviewer,
        "text": text,
        "ratings": ratings or None,
        "official": "official_review" in invitation.lower(),
    }


def note_to_record(note: dict, venue_id: str) -> dict:
    """Convert one forum note (with details.replies) to a corpus record.

    Raises SchemaDrift when the note lacks an id or content block.
    """
    note_id = note.get("id") or note.get("forum")
    content = note.get("content")
    if not note_id or not isinstance(content, dict):
        raise SchemaDrift(f"note missing id or content: {str(note)[:120]}")
    replies = (note.get("details") or {}).get("replies") or []
    reviews = []
    metareview = None
    decision = ""
    for reply in replies:
        invitation = (reply.get("invitation") or " ".join(reply.get("invitations", []) or [])).lower()
        reply_content = reply.get("content") or {}
        if "meta_review" in invitation or "meta-review" in invitation:
            metareview = _content_value(reply_content, "metareview") or _reply_text(reply_content) or metareview
            continue
        if "decision" in invitation:
            decision = _content_value(reply_content, "decision") or decision
            continue
        review = _reply_to_review(reply)
        if review is not None:
            reviews.append(review)
    if metareview is None:
        value = _content_value(content, "metareview")
        if isinstance(value, str) and value.strip():
            metareview = value
    return {
        "id": str(note_id),
        "url": f"https://openreview.net/forum?id={note_id}",
        "title": _content_value(content, "title") or "",
        "abstract": _content_value(content, "abstract") or "",
        "venue": venue_id,
        "decision": decision or "",
        "metareview": metareview,
        "reviews": reviews,
        "split": "unassigned",
    }


def fetch_openreview(
    venue_id: str,
    endpoint: str,
    page_size: int = 100,
    transport=None,
    archive_dir: Optional[Path] = None,
    timeout: float = 30.0,
    max_pages: int = 10_000,
) -> list[str]:
    """Fetch all notes for a venue and return unified record lines.

    One fetch runs per venue at a time. When archive_dir is given, every
    raw page body is written under archive_dir plus a manifest.json mapping
    note id to the page file that contained it.
    """
    session = transport if transport is not None else requests.Session()
    url = endpoint.rstrip("/") + "/notes"
    manifest: dict[str, str] = {}
    lines: list[str] = []
    with _venue_lock(venue_id):
        if archive_dir is not None:
            archive_dir = Path(archive_dir)
            archive_dir.mkdir(parents=True, exist_ok=True)
        offset = 0
        for page_index in range(max_pages):
            params = {
                "invitation": f"{venue_id}/-/Blind_Submission",
                "details": "replies",
                "limit": page_size,
                "offset": offset,
            }
            try:
                response = session.get(url, params=params, timeout=timeout)
            except requests.RequestException as exc:
                raise NetworkError(f"GET {url} failed: {exc}") from exc
            status = getattr(response, "status_code", 200)
            if status in (401, 403):
                raise AuthRequired(f"endpoint {url} returned {status}")
            if status >= 400:
                raise NetworkError(f"endpoint {url} returned {status}")
            try:
                body = response.json()
            except ValueError as exc:
                raise NetworkError(f"endpoint {url} returned non-JSON body") from exc
            notes = body.get("notes") or []
            page_file = f"page_{page_index:04d}.json"
            if archive_dir is not None:
                (archive_dir / page_file).write_text(
                    json.dumps(body, ensure_ascii=False, indent=2), encoding="utf-8"
                )
            for note in notes:
                try:
                    record = note_to_record(note, venue_id)
                except SchemaDrift as exc:
                    logger.warning("skipping note: %s", exc)
                    continue
                manifest[record["id"]] = page_file
                lines.append(json.dumps(record, ensure_ascii=False))
            if len(notes) < page_size:
                break
            offset += page_size
        if archive_dir is not None:
            (archive_dir / "manifest.json").write_text(
                json.dumps(manifest, ensure_ascii=False, indent=2, sort_keys=True),
                encoding="utf-8",
            )
    return lines
