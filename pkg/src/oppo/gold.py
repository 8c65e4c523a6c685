"""Gold-standard construction.

Three stages: strict-majority class vote per document, merging of the two
annotators' span sets into union hulls, and derivation of the four-way
intergroup-conflict (IGC) variable from the presence of CAMPAIGNER and
FACILITATOR spans.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Mapping, Sequence

from .model import (
    AnnotationRecord,
    Category,
    GoldDocument,
    Klass,
    Span,
    normalize_spans,
    span_sort_key,
)

DEFAULT_ANNOTATORS = 3
DEFAULT_CONFLICT_OVERLAP = 1


# ---------------------------------------------------------------------------
# Class labels by majority vote
# ---------------------------------------------------------------------------


class VoteLabel(Enum):
    CONSPIRACY = "CONSPIRACY"
    CRITICAL = "CRITICAL"
    NEITHER = "NEITHER"
    UNRESOLVED = "UNRESOLVED"  # outcome only, never an individual vote


def vote_label(record: AnnotationRecord) -> VoteLabel:
    if record.conspiracy == 1:
        return VoteLabel.CONSPIRACY
    if record.critical == 1:
        return VoteLabel.CRITICAL
    return VoteLabel.NEITHER


@dataclass(frozen=True)
class VoteOutcome:
    doc_id: str
    klass: VoteLabel
    votes: tuple[tuple[str, VoteLabel], ...]  # (annotator, vote), sorted

    @property
    def needs_adjudication(self) -> bool:
        return self.klass is VoteLabel.UNRESOLVED

    @property
    def excluded(self) -> bool:
        """True when the document stays out of the gold corpus."""
        return self.klass in (VoteLabel.NEITHER, VoteLabel.UNRESOLVED)

    def gold_klass(self) -> Klass:
        if self.klass is VoteLabel.CONSPIRACY:
            return Klass.CONSPIRACY
        if self.klass is VoteLabel.CRITICAL:
            return Klass.CRITICAL
        raise ValueError(f"document {self.doc_id!r} has no gold class ({self.klass.value})")


def majority_vote(
    records: Sequence[AnnotationRecord], annotators: int = DEFAULT_ANNOTATORS
) -> VoteOutcome:
    """Strict majority over per-annotator labels; three-way splits stay open.

    The majority threshold is floor(n/2)+1. With the default three annotators
    a (CONSPIRACY, CRITICAL, NEITHER) split has no majority and the outcome is
    UNRESOLVED, which routes the document to human adjudication.
    """
    if len(records) != annotators:
        raise ValueError(
            f"expected {annotators} annotation records, got {len(records)}"
        )
    doc_ids = sorted({r.doc_id for r in records})
    if len(doc_ids) != 1:
        raise ValueError(f"records span multiple documents: {doc_ids}")
    names = sorted(r.annotator for r in records)
    if len(set(names)) != len(names):
        raise ValueError(f"duplicate annotator ids for document {doc_ids[0]!r}")
    votes = tuple(sorted((r.annotator, vote_label(r)) for r in records))
    counts = Counter(v for _, v in votes)
    label, top = counts.most_common(1)[0]
    threshold = annotators // 2 + 1
    klass = label if top >= threshold else VoteLabel.UNRESOLVED
    return VoteOutcome(doc_id=doc_ids[0], klass=klass, votes=votes)


# ---------------------------------------------------------------------------
# Span merging
# ---------------------------------------------------------------------------


class RejectionReason(Enum):
    SINGLE_ANNOTATOR = "SINGLE_ANNOTATOR"
    LABEL_CONFLICT = "LABEL_CONFLICT"


@dataclass(frozen=True)
class Rejection:
    side: str  # "a" or "b"
    span: Span
    reason: RejectionReason


@dataclass(frozen=True)
class MergeResult:
    gold: frozenset[Span]
    rejections: tuple[Rejection, ...]
    conflict_regions: tuple[tuple[int, int], ...]
    conflict_adjacent: frozenset[Span]  # gold spans touching a conflict region

    def symmetric_view(self) -> tuple:
        """Side-agnostic content, equal under swapping the two annotators."""
        rej = frozenset((r.span, r.reason) for r in self.rejections)
        return (self.gold, rej, self.conflict_regions, self.conflict_adjacent)


def _components(
    left: Sequence[Span], right: Sequence[Span]
) -> list[tuple[list[Span], list[Span]]]:
    """Connected components of the bipartite overlap graph (>=1 shared char)."""
    n, m = len(left), len(right)
    parent = list(range(n + m))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(x: int, y: int):
        parent[find(x)] = find(y)

    for i, s in enumerate(left):
        for j, t in enumerate(right):
            if s.overlap(t) >= 1:
                union(i, n + j)
    groups: dict[int, tuple[list[Span], list[Span]]] = {}
    for i, s in enumerate(left):
        groups.setdefault(find(i), ([], []))[0].append(s)
    for j, t in enumerate(right):
        groups.setdefault(find(n + j), ([], []))[1].append(t)
    return list(groups.values())


def merge_spans(
    a: Iterable[Span],
    b: Iterable[Span],
    conflict_overlap: int = DEFAULT_CONFLICT_OVERLAP,
) -> MergeResult:
    """Merge two annotators' spans into gold spans with a rejection log.

    Cross-category pairs overlapping by at least `conflict_overlap` characters
    are label conflicts: both spans are rejected before any merging. Within
    each category, overlap components supported by both annotators become one
    gold span covering the component hull; single-annotator components are
    rejected. Gold spans that overlap a conflict region are flagged but kept,
    since their own-category support stands on its own.
    """
    if conflict_overlap < 1:
        raise ValueError("conflict_overlap must be >= 1")
    a_spans = sorted(normalize_spans(a), key=span_sort_key)
    b_spans = sorted(normalize_spans(b), key=span_sort_key)

    conflicted_a: set[Span] = set()
    conflicted_b: set[Span] = set()
    regions: list[tuple[int, int]] = []
    for s in a_spans:
        for t in b_spans:
            if s.category is not t.category and s.overlap(t) >= conflict_overlap:
                conflicted_a.add(s)
                conflicted_b.add(t)
                regions.append((max(s.start, t.start), min(s.end, t.end)))

    rejections = [Rejection("a", s, RejectionReason.LABEL_CONFLICT) for s in conflicted_a]
    rejections += [Rejection("b", t, RejectionReason.LABEL_CONFLICT) for t in conflicted_b]

    gold: set[Span] = set()
    for cat in Category:
        left = [s for s in a_spans if s.category is cat and s not in conflicted_a]
        right = [t for t in b_spans if t.category is cat and t not in conflicted_b]
        for comp_a, comp_b in _components(left, right):
            if comp_a and comp_b:
                start = min(s.start for s in comp_a + comp_b)
                end = max(s.end for s in comp_a + comp_b)
                gold.add(Span(cat, start, end))
            else:
                rejections += [
                    Rejection("a", s, RejectionReason.SINGLE_ANNOTATOR) for s in comp_a
                ]
                rejections += [
                    Rejection("b", t, RejectionReason.SINGLE_ANNOTATOR) for t in comp_b
                ]

    adjacent = frozenset(
        g
        for g in gold
        if any(max(g.start, rs) < min(g.end, re_) for rs, re_ in regions)
    )
    rejections.sort(key=lambda r: (span_sort_key(r.span), r.side, r.reason.value))
    return MergeResult(
        gold=frozenset(gold),
        rejections=tuple(rejections),
        conflict_regions=tuple(sorted(set(regions))),
        conflict_adjacent=adjacent,
    )


# ---------------------------------------------------------------------------
# IGC derivation
# ---------------------------------------------------------------------------


class IGC(Enum):
    C1 = "C1"  # neither campaigners nor facilitators
    C2 = "C2"  # campaigners only
    C3 = "C3"  # facilitators only
    C4 = "C4"  # both present


@dataclass(frozen=True)
class IGCCategory:
    doc_id: str
    value: IGC


def derive_igc(gold: GoldDocument) -> IGCCategory:
    cats = gold.categories()
    has_campaigner = Category.CAMPAIGNER in cats
    has_facilitator = Category.FACILITATOR in cats
    if has_campaigner and has_facilitator:
        value = IGC.C4
    elif has_campaigner:
        value = IGC.C2
    elif has_facilitator:
        value = IGC.C3
    else:
        value = IGC.C1
    return IGCCategory(doc_id=gold.doc_id, value=value)


def igc_distribution(docs: Iterable[GoldDocument]) -> dict[str, int]:
    counts = {level.value: 0 for level in IGC}
    for doc in docs:
        counts[derive_igc(doc).value.value] += 1
    return counts


# ---------------------------------------------------------------------------
# Corpus-level span statistics
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SpanStatistics:
    """Counts and row-normalized percentages per class and category.

    Rows are the two gold classes plus "all". Percentages of an empty row are
    reported as zero with `has_empty_row` set rather than raising.
    """

    counts: Mapping[str, Mapping[str, int]]
    percentages: Mapping[str, Mapping[str, float]]
    totals: Mapping[str, int]
    has_empty_row: bool

    def to_report(self) -> dict:
        return {
            "counts": {k: dict(v) for k, v in self.counts.items()},
            "percentages": {k: dict(v) for k, v in self.percentages.items()},
            "totals": dict(self.totals),
            "has_empty_row": self.has_empty_row,
        }


def span_statistics(docs: Iterable[GoldDocument]) -> SpanStatistics:
    rows = [k.value for k in Klass] + ["all"]
    counts = {row: {c.value: 0 for c in Category} for row in rows}
    for doc in docs:
        for span in doc.spans:
            counts[doc.klass.value][span.category.value] += 1
            counts["all"][span.category.value] += 1
    totals = {row: sum(cat_counts.values()) for row, cat_counts in counts.items()}
    percentages = {}
    for row in rows:
        total = totals[row]
        percentages[row] = {
            c: (100.0 * n / total if total else 0.0) for c, n in counts[row].items()
        }
    return SpanStatistics(
        counts=counts,
        percentages=percentages,
        totals=totals,
        has_empty_row=any(t == 0 for t in totals.values()),
    )


# ---------------------------------------------------------------------------
# End-to-end assembly
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GoldBuild:
    documents: tuple[GoldDocument, ...]
    outcomes: tuple[VoteOutcome, ...]
    adjudication_queue: tuple[str, ...]  # doc_ids with unresolved votes
    excluded_neither: tuple[str, ...]
    merges: Mapping[str, MergeResult]
    span_annotators: Mapping[str, tuple[str, str]]  # doc_id -> (side a, side b)


def span_annotator_pair(records: Sequence[AnnotationRecord]) -> tuple[AnnotationRecord, AnnotationRecord]:
    """Pick the two records whose spans feed the merge.

    Span annotation is a two-annotator task. When more records exist (extra
    class-only votes), prefer the ones that actually carry spans; break the
    remaining ties by annotator id so the choice is reproducible.
    """
    if len(records) < 2:
        raise ValueError("span merging needs two annotators")
    ranked = sorted(records, key=lambda r: (0 if r.spans else 1, r.annotator))
    return ranked[0], ranked[1]


def build_gold(
    records: Iterable[AnnotationRecord],
    annotators: int = DEFAULT_ANNOTATORS,
    conflict_overlap: int = DEFAULT_CONFLICT_OVERLAP,
) -> GoldBuild:
    by_doc: dict[str, list[AnnotationRecord]] = {}
    for rec in records:
        by_doc.setdefault(rec.doc_id, []).append(rec)

    documents: list[GoldDocument] = []
    outcomes: list[VoteOutcome] = []
    queue: list[str] = []
    excluded: list[str] = []
    merges: dict[str, MergeResult] = {}
    sides: dict[str, tuple[str, str]] = {}
    for doc_id in sorted(by_doc):
        recs = by_doc[doc_id]
        outcome = majority_vote(recs, annotators=annotators)
        outcomes.append(outcome)
        if outcome.klass is VoteLabel.UNRESOLVED:
            queue.append(doc_id)
            continue
        if outcome.klass is VoteLabel.NEITHER:
            excluded.append(doc_id)
            continue
        first, second = span_annotator_pair(recs)
        merged = merge_spans(first.spans, second.spans, conflict_overlap=conflict_overlap)
        merges[doc_id] = merged
        sides[doc_id] = (first.annotator, second.annotator)
        documents.append(
            GoldDocument(doc_id=doc_id, klass=outcome.gold_klass(), spans=merged.gold)
        )
    return GoldBuild(
        documents=tuple(documents),
        outcomes=tuple(outcomes),
        adjudication_queue=tuple(queue),
        excluded_neither=tuple(excluded),
        merges=merges,
        span_annotators=sides,
    )
