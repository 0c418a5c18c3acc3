"""Unified paper/review/meta-review records.

One record per line of UTF-8 JSON with keys
``id, url, title, abstract, venue, decision, metareview, reviews, split``;
``reviews`` is an array of ``{reviewer, text, ratings, official}`` objects.
Unknown keys are preserved on round-trip. Parsing collects per-line
diagnostics instead of aborting, so one bad line never loses the rest of
the file.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import IO, Iterable, Union

import numpy as np

SPLITS = ("train", "validation", "test", "unassigned")

_RECORD_KEYS = ("id", "url", "title", "abstract", "venue", "decision", "metareview", "reviews", "split")
_REVIEW_KEYS = ("reviewer", "text", "ratings", "official")


class EmptyInput(ValueError):
    """The input stream contained no record lines."""


class InvalidRatios(ValueError):
    """Split ratios must be three non-negative fractions summing to 1."""


@dataclass(frozen=True)
class MalformedRecord:
    """One rejected input line: 1-based line number plus the reason."""

    line: int
    cause: str


@dataclass(frozen=True)
class Decision:
    """Recorded outcome. kind is 'accept', 'reject', or 'other'."""

    kind: str
    label: str

    @classmethod
    def from_label(cls, label: str) -> "Decision":
        norm = label.strip().lower()
        if norm == "accept":
            return cls("accept", label)
        if norm == "reject":
            return cls("reject", label)
        return cls("other", label)

    @property
    def word(self) -> str:
        """Word to substitute into decision-aware prompts."""
        if self.kind == "accept" or "accept" in self.label.lower():
            return "acceptance"
        if self.kind == "reject" or "reject" in self.label.lower():
            return "rejection"
        return self.label or "decision"


@dataclass(frozen=True)
class Review:
    reviewer_id: str
    text: str
    ratings: dict | None = None
    is_official: bool = True
    extra: dict = field(default_factory=dict)


@dataclass(frozen=True)
class PaperRecord:
    id: str
    url: str = ""
    title: str = ""
    abstract: str = ""
    venue: str = ""
    decision: Decision = Decision("other", "")
    reviews: tuple[Review, ...] = ()
    metareview: str | None = None
    split: str = "unassigned"
    extra: dict = field(default_factory=dict)


@dataclass(frozen=True)
class Corpus:
    records: tuple[PaperRecord, ...]
    provenance: str = ""
    malformed: tuple[MalformedRecord, ...] = ()

    def __len__(self) -> int:
        return len(self.records)

    def by_id(self) -> dict[str, PaperRecord]:
        return {rec.id: rec for rec in self.records}

    def split_sizes(self) -> dict[str, int]:
        sizes = {name: 0 for name in SPLITS}
        for rec in self.records:
            sizes[rec.split] += 1
        return sizes


def _parse_review(obj, index: int) -> Review:
    if not isinstance(obj, dict):
        raise ValueError(f"reviews[{index}] is not an object")
    text = obj.get("text")
    if not isinstance(text, str) or not text.strip():
        raise ValueError(f"reviews[{index}] has empty or missing text")
    reviewer = obj.get("reviewer", "")
    if not isinstance(reviewer, str):
        raise ValueError(f"reviews[{index}] reviewer is not a string")
    ratings = obj.get("ratings")
    if ratings is not None:
        if not isinstance(ratings, dict):
            raise ValueError(f"reviews[{index}] ratings is not a map")
        for key, value in ratings.items():
            if not isinstance(value, (int, float)) or isinstance(value, bool):
                raise ValueError(f"reviews[{index}] rating {key!r} is not numeric")
    official = obj.get("official", True)
    if not isinstance(official, bool):
        raise ValueError(f"reviews[{index}] official is not a boolean")
    extra = {k: obj[k] for k in obj if k not in _REVIEW_KEYS}
    return Review(reviewer_id=reviewer, text=text, ratings=ratings, is_official=official, extra=extra)


def _parse_record(obj) -> PaperRecord:
    if not isinstance(obj, dict):
        raise ValueError("line is not a JSON object")
    rec_id = obj.get("id")
    if not isinstance(rec_id, str) or not rec_id.strip():
        raise ValueError("missing or empty id")
    raw_reviews = obj.get("reviews")
    if not isinstance(raw_reviews, list):
        raise ValueError("missing or invalid reviews field")
    reviews = tuple(_parse_review(rv, i) for i, rv in enumerate(raw_reviews))
    for key in ("url", "title", "abstract", "venue"):
        if key in obj and obj[key] is not None and not isinstance(obj[key], str):
            raise ValueError(f"{key} is not a string")
    metareview = obj.get("metareview")
    if metareview is not None and not isinstance(metareview, str):
        raise ValueError("metareview is not a string")
    if isinstance(metareview, str) and not metareview.strip():
        metareview = None
    split = obj.get("split") or "unassigned"
    if not isinstance(split, str) or split.lower() not in SPLITS:
        raise ValueError(f"unknown split {split!r}")
    decision_label = obj.get("decision") or ""
    if not isinstance(decision_label, str):
        raise ValueError("decision is not a string")
    extra = {k: obj[k] for k in obj if k not in _RECORD_KEYS}
    return PaperRecord(
        id=rec_id,
        url=obj.get("url") or "",
        title=obj.get("title") or "",
        abstract=obj.get("abstract") or "",
        venue=obj.get("venue") or "",
        decision=Decision.from_label(decision_label),
        reviews=reviews,
        metareview=metareview,
        split=split.lower(),
        extra=extra,
    )


def _iter_lines(stream: Union[str, bytes, IO, Iterable[str]]) -> Iterable[str]:
    if isinstance(stream, bytes):
        stream = stream.decode("utf-8")
    if isinstance(stream, str):
        return stream.splitlines()
    return (line.rstrip("\n") for line in stream)


def parse_corpus(stream: Union[str, bytes, IO, Iterable[str]], provenance: str = "") -> Corpus:
    """Parse line-delimited records into a Corpus.

    Every syntactically valid record is returned; schema violations are
    collected per line (with 1-based line numbers) on ``Corpus.malformed``.
    Raises EmptyInput when the stream has no non-blank lines.
    """
    records: list[PaperRecord] = []
    malformed: list[MalformedRecord] = []
    seen_ids: set[str] = set()
    saw_line = False
    for lineno, line in enumerate(_iter_lines(stream), start=1):
        if not line.strip():
            continue
        saw_line = True
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            malformed.append(MalformedRecord(lineno, f"invalid JSON: {exc.msg}"))
            continue
        try:
            rec = _parse_record(obj)
        except ValueError as exc:
            malformed.append(MalformedRecord(lineno, str(exc)))
            continue
        if rec.id in seen_ids:
            malformed.append(MalformedRecord(lineno, f"duplicate id {rec.id!r}"))
            continue
        seen_ids.add(rec.id)
        records.append(rec)
    if not saw_line:
        raise EmptyInput("no record lines in input")
    return Corpus(records=tuple(records), provenance=provenance, malformed=tuple(malformed))


def parse_corpus_file(path: Union[str, Path]) -> Corpus:
    path = Path(path)
    with path.open("r", encoding="utf-8") as fh:
        return parse_corpus(fh, provenance=str(path))


def record_to_dict(rec: PaperRecord) -> dict:
    reviews = []
    for rv in rec.reviews:
        rv_obj = {
            "reviewer": rv.reviewer_id,
            "text": rv.text,
            "ratings": rv.ratings,
            "official": rv.is_official,
        }
        for key in sorted(rv.extra):
            rv_obj[key] = rv.extra[key]
        reviews.append(rv_obj)
    obj = {
        "id": rec.id,
        "url": rec.url,
        "title": rec.title,
        "abstract": rec.abstract,
        "venue": rec.venue,
        "decision": rec.decision.label,
        "metareview": rec.metareview,
        "reviews": reviews,
        "split": rec.split,
    }
    for key in sorted(rec.extra):
        obj[key] = rec.extra[key]
    return obj


def serialize_corpus(corpus: Corpus) -> str:
    """Canonical line-delimited form: fixed key order, one record per line."""
    lines = [json.dumps(record_to_dict(rec), ensure_ascii=False) for rec in corpus.records]
    return "\n".join(lines) + ("\n" if lines else "")


def write_corpus(corpus: Corpus, path: Union[str, Path]) -> None:
    Path(path).write_text(serialize_corpus(corpus), encoding="utf-8")


def metareview_token_count(rec: PaperRecord) -> int:
    return len(rec.metareview.split()) if rec.metareview else 0


def filter_records(corpus: Corpus) -> Corpus:
    """Keep records whose meta-review exceeds 20 whitespace tokens and that
    retain at least one official review; unofficial reviews are dropped from
    the survivors. Idempotent."""
    kept: list[PaperRecord] = []
    for rec in corpus.records:
        if metareview_token_count(rec) <= 20:
            continue
        official = tuple(rv for rv in rec.reviews if rv.is_official)
        if not official:
            continue
        kept.append(replace(rec, reviews=official))
    return Corpus(records=tuple(kept), provenance=corpus.provenance, malformed=corpus.malformed)


def filter_report(corpus: Corpus) -> list[dict]:
    """Reasons for every record the filter would drop."""
    dropped = []
    for rec in corpus.records:
        count = metareview_token_count(rec)
        if count <= 20:
            dropped.append({"id": rec.id, "reason": f"metareview has {count} tokens (needs > 20)"})
        elif not any(rv.is_official for rv in rec.reviews):
            dropped.append({"id": rec.id, "reason": "no official reviews"})
    return dropped


def split_sizes(n: int, ratios: tuple[float, float, float]) -> tuple[int, ...]:
    """Largest-remainder apportionment of n records over three ratios."""
    if len(ratios) != 3 or any(r < 0 for r in ratios):
        raise InvalidRatios(f"need three non-negative ratios, got {ratios!r}")
    if abs(sum(ratios) - 1.0) > 1e-9:
        raise InvalidRatios(f"ratios sum to {sum(ratios)!r}, expected 1")
    quotas = [r * n for r in ratios]
    sizes = [math.floor(q) for q in quotas]
    remainder = n - sum(sizes)
    by_frac = sorted(range(3), key=lambda i: (-(quotas[i] - sizes[i]), i))
    for i in range(remainder):
        sizes[by_frac[i]] += 1
    return tuple(sizes)


def assign_splits(corpus: Corpus, seed: int, ratios: tuple[float, float, float]) -> Corpus:
    """Assign every record to train/validation/test, deterministically.

    Records are ordered by id, shuffled with the seed, and cut into sizes
    from largest-remainder apportionment, so assignment is independent of
    input order and byte-stable across runs.
    """
    sizes = split_sizes(len(corpus.records), ratios)
    for rec in corpus.records:
        if not rec.reviews:
            raise ValueError(f"record {rec.id!r} has no reviews; filter before splitting")
        if rec.metareview is not None and metareview_token_count(rec) <= 20:
            raise ValueError(f"record {rec.id!r} has a <=20-token metareview; filter before splitting")
    ordered = sorted(rec.id for rec in corpus.records)
    perm = np.random.default_rng(seed).permutation(len(ordered))
    shuffled = [ordered[i] for i in perm]
    assignment: dict[str, str] = {}
    cursor = 0
    for name, size in zip(("train", "validation", "test"), sizes):
        for rec_id in shuffled[cursor : cursor + size]:
            assignment[rec_id] = name
        cursor += size
    records = tuple(replace(rec, split=assignment[rec.id]) for rec in corpus.records)
    return Corpus(records=records, provenance=corpus.provenance, malformed=corpus.malformed)
