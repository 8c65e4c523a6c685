"""Evaluation of system predictions against the gold standard.

Covers binary classification metrics, partial-overlap span F1 (character
units by default, token units behind a flag), text-level category presence,
and the outcome-variable crosstab with adjusted residuals used for error
analysis.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Mapping, Sequence

import numpy as np

from .analysis import chi_square_independence, ChiSquareResult
from .model import (
    Category,
    GoldDocument,
    Klass,
    PredictionSet,
    Span,
    tokenize,
)


@dataclass(frozen=True)
class PRF:
    precision: float
    recall: float
    f1: float

    @classmethod
    def from_pr(cls, precision: float, recall: float) -> "PRF":
        if precision + recall == 0.0:
            return cls(precision, recall, 0.0)
        return cls(precision, recall, 2.0 * precision * recall / (precision + recall))

    @classmethod
    def from_counts(cls, tp: float, fp: float, fn: float) -> "PRF":
        p = tp / (tp + fp) if tp + fp else 0.0
        r = tp / (tp + fn) if tp + fn else 0.0
        return cls.from_pr(p, r)


# ---------------------------------------------------------------------------
# Binary classification
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ConfusionMatrix:
    """Rows are predicted classes, columns actual. Real-valued cells so that
    fold-averaged matrices remain representable."""

    classes: tuple[str, ...]
    counts: tuple[tuple[float, ...], ...]

    def __post_init__(self):
        if len(self.counts) != len(self.classes):
            raise ValueError("confusion matrix must be square over classes")
        for row in self.counts:
            if len(row) != len(self.classes):
                raise ValueError("confusion matrix must be square over classes")
            if any(c < 0 for c in row):
                raise ValueError("confusion counts must be non-negative")

    def as_array(self) -> np.ndarray:
        return np.asarray(self.counts, dtype=float)

    @classmethod
    def average(cls, matrices: Sequence["ConfusionMatrix"]) -> "ConfusionMatrix":
        if not matrices:
            raise ValueError("nothing to average")
        classes = matrices[0].classes
        if any(m.classes != classes for m in matrices):
            raise ValueError("class order differs between folds")
        mean = np.mean([m.as_array() for m in matrices], axis=0)
        return cls(classes, tuple(tuple(row) for row in mean))


def _klass_of(value) -> Klass:
    if isinstance(value, Klass):
        return value
    if isinstance(value, GoldDocument):
        return value.klass
    if isinstance(value, PredictionSet):
        if value.klass is None:
            raise ValueError(f"prediction for {value.doc_id!r} carries no class label")
        return value.klass
    raise TypeError(f"cannot extract a class label from {type(value).__name__}")


@dataclass(frozen=True)
class BinaryEvalResult:
    per_class: Mapping[Klass, PRF]
    confusion: ConfusionMatrix
    accuracy: float


def binary_eval(
    predictions: Mapping[str, object], gold: Mapping[str, object]
) -> BinaryEvalResult:
    """Standard two-class metrics; CONSPIRACY is the nominal positive class,
    but both classes are always reported."""
    if not gold:
        raise ValueError("empty gold corpus")
    missing = sorted(set(gold) - set(predictions))
    if missing:
        raise ValueError(f"missing prediction for document {missing[0]!r}")
    unknown = sorted(set(predictions) - set(gold))
    if unknown:
        raise ValueError(f"prediction for unknown document {unknown[0]!r}")
    order = (Klass.CONSPIRACY, Klass.CRITICAL)
    index = {k: i for i, k in enumerate(order)}
    table = np.zeros((2, 2))
    for doc_id in gold:
        p = _klass_of(predictions[doc_id])
        t = _klass_of(gold[doc_id])
        table[index[p], index[t]] += 1
    per_class = {}
    for k in order:
        i = index[k]
        tp = float(table[i, i])
        fp = float(table[i].sum()) - tp
        fn = float(table[:, i].sum()) - tp
        per_class[k] = PRF.from_counts(tp, fp, fn)
    accuracy = float(np.trace(table) / table.sum())
    confusion = ConfusionMatrix(
        classes=tuple(k.value for k in order),
        counts=tuple(tuple(float(x) for x in row) for row in table),
    )
    return BinaryEvalResult(per_class=per_class, confusion=confusion, accuracy=accuracy)


# ---------------------------------------------------------------------------
# Partial-overlap span F1
# ---------------------------------------------------------------------------


class Unit(Enum):
    CHAR = "char"
    TOKEN = "token"


@dataclass(frozen=True)
class SpanEvalResult:
    per_category: Mapping[Category, PRF]
    macro: PRF
    categories_scored: tuple[Category, ...]


def _token_cover(span: Span, token_bounds: Sequence[tuple[int, int]]) -> frozenset[int]:
    return frozenset(
        i
        for i, (ts, te) in enumerate(token_bounds)
        if max(span.start, ts) < min(span.end, te)
    )


class _SpanSums:
    """Per-category accumulators for the micro-aggregated fractions."""

    __slots__ = ("p_num", "n_pred", "r_num", "n_gold")

    def __init__(self):
        self.p_num = 0.0
        self.n_pred = 0
        self.r_num = 0.0
        self.n_gold = 0


def _accumulate(
    sums: dict[Category, _SpanSums],
    predicted: Iterable[Span],
    gold: Iterable[Span],
    unit: Unit,
    text: str | None,
):
    predicted = list(predicted)
    gold = list(gold)
    if unit is Unit.TOKEN:
        if text is None:
            raise ValueError("token-unit span F1 requires the document text")
        bounds = [(t.start, t.end) for t in tokenize(text)]
        cover = {s: _token_cover(s, bounds) for s in set(predicted) | set(gold)}

        def size(s: Span) -> int:
            return len(cover[s])

        def inter(s: Span, t: Span) -> int:
            return len(cover[s] & cover[t])

    else:

        def size(s: Span) -> int:
            return s.length

        def inter(s: Span, t: Span) -> int:
            return s.overlap(t)

    for cat in {s.category for s in predicted} | {t.category for t in gold}:
        S = [s for s in predicted if s.category is cat]
        T = [t for t in gold if t.category is cat]
        acc = sums.setdefault(cat, _SpanSums())
        acc.n_pred += len(S)
        acc.n_gold += len(T)
        for s in S:
            if size(s):
                acc.p_num += sum(inter(s, t) for t in T) / size(s)
        for t in T:
            if size(t):
                acc.r_num += sum(inter(s, t) for s in S) / size(t)


def _finalize(sums: Mapping[Category, _SpanSums]) -> SpanEvalResult:
    per_category = {}
    for cat in sorted(sums, key=lambda c: c.value):
        acc = sums[cat]
        if acc.n_pred == 0 and acc.n_gold == 0:
            continue
        p = acc.p_num / acc.n_pred if acc.n_pred else 0.0
        r = acc.r_num / acc.n_gold if acc.n_gold else 0.0
        per_category[cat] = PRF.from_pr(p, r)
    scored = tuple(per_category)
    if per_category:
        macro = PRF(
            precision=float(np.mean([v.precision for v in per_category.values()])),
            recall=float(np.mean([v.recall for v in per_category.values()])),
            f1=float(np.mean([v.f1 for v in per_category.values()])),
        )
    else:
        macro = PRF(0.0, 0.0, 0.0)
    return SpanEvalResult(per_category=per_category, macro=macro, categories_scored=scored)


def span_f1(
    predicted: Iterable[Span],
    gold: Iterable[Span],
    unit: Unit = Unit.CHAR,
    text: str | None = None,
) -> SpanEvalResult:
    """Partial-overlap span F1 for one document.

    Per category, precision credits each predicted span with the fraction of
    its extent covered by gold spans, recall mirrors this on the gold side.
    Categories with neither predicted nor gold spans stay out of the macro
    average.
    """
    sums: dict[Category, _SpanSums] = {}
    _accumulate(sums, predicted, gold, unit, text)
    return _finalize(sums)


def span_f1_corpus(
    predictions: Mapping[str, Iterable[Span]],
    gold: Mapping[str, Iterable[Span]],
    unit: Unit = Unit.CHAR,
    texts: Mapping[str, str] | None = None,
) -> SpanEvalResult:
    """Micro aggregation: per-category numerators and denominators are summed
    over documents before the division, so span-free documents are neutral."""
    missing = sorted(set(gold) - set(predictions))
    if missing:
        raise ValueError(f"missing prediction for document {missing[0]!r}")
    sums: dict[Category, _SpanSums] = {}
    for doc_id in sorted(gold):
        text = texts.get(doc_id) if texts is not None else None
        _accumulate(sums, predictions[doc_id], gold[doc_id], unit, text)
    return _finalize(sums)


# ---------------------------------------------------------------------------
# Text-level category presence
# ---------------------------------------------------------------------------


def _present(value) -> frozenset[Category]:
    if isinstance(value, PredictionSet):
        return value.present_categories()
    if isinstance(value, GoldDocument):
        return value.categories()
    if isinstance(value, (set, frozenset)):
        return frozenset(value)
    raise TypeError(f"cannot extract category presence from {type(value).__name__}")


def category_presence_eval(
    predictions: Mapping[str, object], gold: Mapping[str, object]
) -> dict[Category, PRF]:
    """Binary F1 per category, presence as positive class."""
    missing = sorted(set(gold) - set(predictions))
    if missing:
        raise ValueError(f"missing prediction for document {missing[0]!r}")
    result = {}
    for cat in Category:
        tp = fp = fn = 0
        for doc_id in gold:
            in_pred = cat in _present(predictions[doc_id])
            in_gold = cat in _present(gold[doc_id])
            if in_pred and in_gold:
                tp += 1
            elif in_pred:
                fp += 1
            elif in_gold:
                fn += 1
        result[cat] = PRF.from_counts(tp, fp, fn)
    return result


# ---------------------------------------------------------------------------
# Outcome variables and the error crosstab
# ---------------------------------------------------------------------------


class Outcome(Enum):
    FALSE_NEGATIVE = "FALSE_NEGATIVE"
    CORRECT = "CORRECT"
    FALSE_POSITIVE = "FALSE_POSITIVE"


OUTCOME_ORDER = (Outcome.FALSE_NEGATIVE, Outcome.CORRECT, Outcome.FALSE_POSITIVE)


@dataclass(frozen=True)
class OutcomeVariable:
    doc_id: str
    category: Category
    outcome: Outcome


def outcome_variables(
    predictions: Mapping[str, object],
    gold: Mapping[str, object],
    category: Category,
) -> list[OutcomeVariable]:
    """Per-document presence outcome for one category.

    CORRECT covers both true positives and true negatives; the two error
    directions stay distinct because over- and under-prediction have
    different downstream interpretations.
    """
    missing = sorted(set(gold) - set(predictions))
    if missing:
        raise ValueError(f"missing prediction for document {missing[0]!r}")
    out = []
    for doc_id in sorted(gold):
        in_pred = category in _present(predictions[doc_id])
        in_gold = category in _present(gold[doc_id])
        if in_gold and not in_pred:
            outcome = Outcome.FALSE_NEGATIVE
        elif in_pred and not in_gold:
            outcome = Outcome.FALSE_POSITIVE
        else:
            outcome = Outcome.CORRECT
        out.append(OutcomeVariable(doc_id=doc_id, category=category, outcome=outcome))
    return out


@dataclass(frozen=True)
class CrosstabResult:
    row_category: Category
    col_category: Category
    outcomes: tuple[Outcome, ...]
    table: tuple[tuple[int, ...], ...]
    chi2: ChiSquareResult


def crosstab_residuals(
    outcomes_row: Sequence[OutcomeVariable],
    outcomes_col: Sequence[OutcomeVariable],
) -> CrosstabResult:
    """3x3 outcome crosstab between two categories with adjusted residuals."""
    rows = {o.doc_id: o for o in outcomes_row}
    cols = {o.doc_id: o for o in outcomes_col}
    if set(rows) != set(cols):
        raise ValueError("outcome sets cover different documents")
    if not rows:
        raise ValueError("empty outcome sets")
    idx = {o: i for i, o in enumerate(OUTCOME_ORDER)}
    table = np.zeros((3, 3), dtype=int)
    for doc_id, row_var in rows.items():
        table[idx[row_var.outcome], idx[cols[doc_id].outcome]] += 1
    chi2 = chi_square_independence(table)
    return CrosstabResult(
        row_category=outcomes_row[0].category,
        col_category=outcomes_col[0].category,
        outcomes=OUTCOME_ORDER,
        table=tuple(tuple(int(x) for x in r) for r in table),
        chi2=chi2,
    )
