"""Shared data model: corpus records, span conventions, and line-delimited IO.

All character offsets are unicode scalar values (Python string indices),
half-open [start, end). Corpus files are JSON-lines with a required sidecar
manifest recording the format version and the offset convention.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field, replace
from enum import Enum
from pathlib import Path
from typing import Iterable, Mapping, NamedTuple

FORMAT_VERSION = "1"
OFFSET_CONVENTION = "unicode_scalar_values"

SCHEMAS = ("messages", "annotations", "gold", "predictions")


class Lang(Enum):
    EN = "EN"
    ES = "ES"


class Category(Enum):
    """Narrative-element categories, serialized as single letters."""

    AGENT = "A"
    FACILITATOR = "F"
    CAMPAIGNER = "C"
    VICTIM = "V"
    OBJECTIVE = "O"
    NEGATIVE_EFFECT = "E"


class Klass(Enum):
    CONSPIRACY = "conspiracy"
    CRITICAL = "critical"


class CorpusError(ValueError):
    """Malformed corpus file or record-invariant violation."""

    def __init__(self, message: str, line: int | None = None, path=None):
        self.line = line
        self.path = path
        prefix = ""
        if path is not None:
            prefix = f"{path}: "
        if line is not None:
            prefix += f"line {line}: "
        super().__init__(prefix + message)


class DegenerateStatistic(ArithmeticError):
    """A statistic is undefined on this input (e.g. zero expected disagreement)."""


class Token(NamedTuple):
    text: str
    start: int
    end: int


_TOKEN_RE = re.compile(r"\S+")


def tokenize(text: str) -> list[Token]:
    """Split text into maximal non-whitespace runs with character offsets."""
    return [Token(m.group(), m.start(), m.end()) for m in _TOKEN_RE.finditer(text)]


@dataclass(frozen=True)
class Message:
    """One corpus text with channel metadata. token_count is derived from text."""

    id: str
    lang: Lang
    text: str
    channel_id: str
    author_id: str | None = None
    token_count: int = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "token_count", len(tokenize(self.text)))


@dataclass(frozen=True)
class Span:
    category: Category
    start: int
    end: int

    def __post_init__(self):
        if not (0 <= self.start < self.end):
            raise CorpusError(f"invalid span offsets [{self.start}, {self.end})")

    @property
    def length(self) -> int:
        return self.end - self.start

    def overlap(self, other: "Span") -> int:
        """Number of shared characters, ignoring category."""
        return max(0, min(self.end, other.end) - max(self.start, other.start))


def span_sort_key(span: Span) -> tuple:
    return (span.category.value, span.start, span.end)


def normalize_spans(spans: Iterable[Span]) -> frozenset[Span]:
    """Drop same-category spans contained in a larger span of that category.

    Same-category nesting never comes from a deliberate annotation; it only
    appears transiently (e.g. from unions), so the outer span wins.
    """
    spans = set(spans)
    by_cat: dict[Category, list[Span]] = {}
    for s in spans:
        by_cat.setdefault(s.category, []).append(s)
    drop = set()
    for group in by_cat.values():
        for s in group:
            for t in group:
                if s != t and t.start <= s.start and s.end <= t.end:
                    drop.add(s)
    return frozenset(spans - drop)


@dataclass(frozen=True)
class AnnotationRecord:
    """One annotator's judgment of one document: two binary class labels
    (never both 1) plus a set of categorized character spans."""

    doc_id: str
    annotator: str
    conspiracy: int
    critical: int
    spans: frozenset[Span] = frozenset()

    def __post_init__(self):
        if self.conspiracy not in (0, 1) or self.critical not in (0, 1):
            raise CorpusError("class labels must be 0 or 1")
        if self.conspiracy == 1 and self.critical == 1:
            raise CorpusError(
                "mutually exclusive labels: conspiracy and critical cannot both be 1"
            )
        object.__setattr__(self, "spans", frozenset(self.spans))


@dataclass(frozen=True)
class GoldDocument:
    doc_id: str
    klass: Klass
    spans: frozenset[Span] = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "spans", frozenset(self.spans))

    def categories(self) -> frozenset[Category]:
        return frozenset(s.category for s in self.spans)


@dataclass(frozen=True)
class PredictionSet:
    """System output for one document, in gold shape. At least one of klass,
    spans, category_flags must be present (spans may be present but empty)."""

    doc_id: str
    klass: Klass | None = None
    spans: frozenset[Span] | None = None
    category_flags: Mapping[Category, int] | None = None

    def __post_init__(self):
        if self.klass is None and self.spans is None and self.category_flags is None:
            raise CorpusError(
                f"prediction for {self.doc_id!r} carries no klass, spans, or category_flags"
            )
        if self.spans is not None:
            object.__setattr__(self, "spans", frozenset(self.spans))
        if self.category_flags is not None:
            bad = [v for v in self.category_flags.values() if v not in (0, 1)]
            if bad:
                raise CorpusError(f"category_flags must be 0/1, got {bad[0]!r}")

    def present_categories(self) -> frozenset[Category]:
        """Categories this prediction marks as present, from flags or spans."""
        if self.category_flags is not None:
            return frozenset(c for c, v in self.category_flags.items() if v == 1)
        if self.spans is not None:
            return frozenset(s.category for s in self.spans)
        raise CorpusError(
            f"prediction for {self.doc_id!r} has no category information"
        )


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------


def manifest_path(path) -> Path:
    return Path(str(path) + ".manifest.json")


def _spans_to_json(spans: Iterable[Span]) -> list[list]:
    return [[s.category.value, s.start, s.end] for s in sorted(spans, key=span_sort_key)]


def _spans_from_json(raw, line_no, path) -> frozenset[Span]:
    if not isinstance(raw, list):
        raise CorpusError("spans must be a list", line=line_no, path=path)
    spans = []
    for item in raw:
        if not (isinstance(item, list) and len(item) == 3):
            raise CorpusError(f"bad span entry {item!r}", line=line_no, path=path)
        cat, start, end = item
        try:
            category = Category(cat)
        except ValueError:
            raise CorpusError(f"unknown category {cat!r}", line=line_no, path=path)
        if not isinstance(start, int) or not isinstance(end, int):
            raise CorpusError(f"span offsets must be integers: {item!r}", line=line_no, path=path)
        try:
            spans.append(Span(category, start, end))
        except CorpusError as exc:
            raise CorpusError(str(exc), line=line_no, path=path)
    return frozenset(spans)


def _require(raw: dict, key: str, line_no, path):
    if key not in raw:
        raise CorpusError(f"missing field {key!r}", line=line_no, path=path)
    return raw[key]


def _parse_message(raw, line_no, path) -> Message:
    lang_raw = _require(raw, "lang", line_no, path)
    try:
        lang = Lang(lang_raw)
    except ValueError:
        raise CorpusError(f"unknown lang {lang_raw!r}", line=line_no, path=path)
    msg = Message(
        id=str(_require(raw, "id", line_no, path)),
        lang=lang,
        text=str(_require(raw, "text", line_no, path)),
        channel_id=str(_require(raw, "channel_id", line_no, path)),
        author_id=raw.get("author_id"),
    )
    if "token_count" in raw and raw["token_count"] != msg.token_count:
        raise CorpusError(
            f"token_count {raw['token_count']} does not match text ({msg.token_count} tokens)",
            line=line_no,
            path=path,
        )
    return msg


def _parse_annotation(raw, line_no, path) -> AnnotationRecord:
    try:
        return AnnotationRecord(
            doc_id=str(_require(raw, "doc_id", line_no, path)),
            annotator=str(_require(raw, "annotator", line_no, path)),
            conspiracy=_require(raw, "conspiracy", line_no, path),
            critical=_require(raw, "critical", line_no, path),
            spans=_spans_from_json(raw.get("spans", []), line_no, path),
        )
    except CorpusError as exc:
        if exc.line is None:
            raise CorpusError(str(exc), line=line_no, path=path)
        raise


def _parse_gold(raw, line_no, path) -> GoldDocument:
    klass_raw = _require(raw, "klass", line_no, path)
    try:
        klass = Klass(klass_raw)
    except ValueError:
        raise CorpusError(f"unknown klass {klass_raw!r}", line=line_no, path=path)
    return GoldDocument(
        doc_id=str(_require(raw, "doc_id", line_no, path)),
        klass=klass,
        spans=_spans_from_json(raw.get("spans", []), line_no, path),
    )


def _parse_prediction(raw, line_no, path) -> PredictionSet:
    klass = None
    if raw.get("klass") is not None:
        try:
            klass = Klass(raw["klass"])
        except ValueError:
            raise CorpusError(f"unknown klass {raw['klass']!r}", line=line_no, path=path)
    flags = None
    if "category_flags" in raw:
        flags = {}
        for cat, v in raw["category_flags"].items():
            try:
                flags[Category(cat)] = v
            except ValueError:
                raise CorpusError(f"unknown category {cat!r}", line=line_no, path=path)
    spans = _spans_from_json(raw["spans"], line_no, path) if "spans" in raw else None
    try:
        return PredictionSet(
            doc_id=str(_require(raw, "doc_id", line_no, path)),
            klass=klass,
            spans=spans,
            category_flags=flags,
        )
    except CorpusError as exc:
        if exc.line is None:
            raise CorpusError(str(exc), line=line_no, path=path)
        raise


_PARSERS = {
    "messages": _parse_message,
    "annotations": _parse_annotation,
    "gold": _parse_gold,
    "predictions": _parse_prediction,
}


def _record_key(record, schema):
    if schema == "messages":
        return record.id
    if schema == "annotations":
        return (record.doc_id, record.annotator)
    return record.doc_id


def _read_manifest(path, schema):
    mpath = manifest_path(path)
    if not mpath.exists():
        raise CorpusError(f"missing sidecar manifest {mpath}", path=path)
    try:
        manifest = json.loads(mpath.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise CorpusError(f"malformed manifest: {exc.msg}", path=mpath)
    if manifest.get("format_version") != FORMAT_VERSION:
        raise CorpusError(
            f"unsupported format_version {manifest.get('format_version')!r}", path=mpath
        )
    if manifest.get("offsets") != OFFSET_CONVENTION:
        raise CorpusError(
            f"unsupported offset convention {manifest.get('offsets')!r}", path=mpath
        )
    declared = manifest.get("schema")
    if declared is not None and declared != schema:
        raise CorpusError(
            f"manifest declares schema {declared!r}, expected {schema!r}", path=mpath
        )
    return manifest


def parse_corpus(path, schema: str, documents: Mapping[str, Message] | None = None) -> list:
    """Parse one corpus file into validated records.

    The whole file is rejected on the first structural violation, with the
    offending line number. When `documents` (doc_id -> Message) is given,
    span offsets are validated against the referenced texts.
    """
    if schema not in SCHEMAS:
        raise ValueError(f"unknown schema {schema!r}; expected one of {SCHEMAS}")
    path = Path(path)
    if not path.exists():
        raise CorpusError("file not found", path=path)
    _read_manifest(path, schema)
    parser = _PARSERS[schema]
    records = []
    seen = set()
    with path.open(encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                raw = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorpusError(f"malformed line: {exc.msg}", line=line_no, path=path)
            if not isinstance(raw, dict):
                raise CorpusError("record must be a JSON object", line=line_no, path=path)
            record = parser(raw, line_no, path)
            key = _record_key(record, schema)
            if key in seen:
                raise CorpusError(f"duplicate id {key!r}", line=line_no, path=path)
            seen.add(key)
            if documents is not None:
                _check_offsets(record, documents, line_no, path)
            records.append(record)
    return records


def _record_spans(record) -> frozenset[Span]:
    spans = getattr(record, "spans", None)
    return spans if spans is not None else frozenset()


def _check_offsets(record, documents, line_no, path):
    doc_id = getattr(record, "doc_id", None)
    if doc_id is None:
        return
    spans = _record_spans(record)
    if not spans:
        return
    doc = documents.get(doc_id)
    if doc is None:
        raise CorpusError(f"unknown doc id {doc_id!r}", line=line_no, path=path)
    text = doc.text if isinstance(doc, Message) else str(doc)
    for s in spans:
        if s.end > len(text):
            raise CorpusError(
                f"span end {s.end} out of range for doc {doc_id!r} of length {len(text)}",
                line=line_no,
                path=path,
            )


def _message_to_json(msg: Message) -> dict:
    raw = {"id": msg.id, "lang": msg.lang.value, "text": msg.text, "channel_id": msg.channel_id}
    if msg.author_id is not None:
        raw["author_id"] = msg.author_id
    return raw


def _annotation_to_json(rec: AnnotationRecord) -> dict:
    return {
        "doc_id": rec.doc_id,
        "annotator": rec.annotator,
        "conspiracy": rec.conspiracy,
        "critical": rec.critical,
        "spans": _spans_to_json(rec.spans),
    }


def _gold_to_json(doc: GoldDocument) -> dict:
    return {"doc_id": doc.doc_id, "klass": doc.klass.value, "spans": _spans_to_json(doc.spans)}


def _prediction_to_json(pred: PredictionSet) -> dict:
    raw: dict = {"doc_id": pred.doc_id}
    if pred.klass is not None:
        raw["klass"] = pred.klass.value
    if pred.spans is not None:
        raw["spans"] = _spans_to_json(pred.spans)
    if pred.category_flags is not None:
        raw["category_flags"] = {
            c.value: int(v) for c, v in sorted(pred.category_flags.items(), key=lambda kv: kv[0].value)
        }
    return raw


_SERIALIZERS = {
    "messages": _message_to_json,
    "annotations": _annotation_to_json,
    "gold": _gold_to_json,
    "predictions": _prediction_to_json,
}


def write_corpus(path, records: Iterable, schema: str) -> Path:
    """Write records as JSON lines plus the sidecar manifest. Returns the path."""
    if schema not in SCHEMAS:
        raise ValueError(f"unknown schema {schema!r}; expected one of {SCHEMAS}")
    path = Path(path)
    serializer = _SERIALIZERS[schema]
    with path.open("w", encoding="utf-8") as fh:
        for record in records:
            fh.write(json.dumps(serializer(record), ensure_ascii=False, sort_keys=True))
            fh.write("\n")
    manifest = {"format_version": FORMAT_VERSION, "offsets": OFFSET_CONVENTION, "schema": schema}
    manifest_path(path).write_text(
        json.dumps(manifest, sort_keys=True) + "\n", encoding="utf-8"
    )
    return path


def whitespace_only_spans(records: Iterable, documents: Mapping[str, Message]) -> list[tuple[str, Span]]:
    """Flag spans whose surface is entirely whitespace.

    Offsets are taken over raw text; a span landing on whitespace-only content
    usually means it was recorded over a normalized copy of the text.
    """
    flagged = []
    for record in records:
        doc = documents.get(record.doc_id)
        if doc is None:
            continue
        text = doc.text if isinstance(doc, Message) else str(doc)
        for s in sorted(_record_spans(record), key=span_sort_key):
            if s.end <= len(text) and not text[s.start : s.end].strip():
                flagged.append((record.doc_id, s))
    return flagged


def remap_span(span: Span, start: int, end: int) -> Span:
    return replace(span, start=start, end=end)
