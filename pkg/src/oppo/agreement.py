"""Inter-annotator agreement: nominal alpha, observed agreement, the gamma
unitizing measure for span annotations, and pairwise-F1 human baselines.

Alpha uses the coincidence-matrix formulation with pairable-values handling
of missing judgments. Gamma compares the observed minimum-cost alignment of
two annotators' units against the mean cost under random repositioning of
the same units, so chance-level annotation scores near zero.
"""

from __future__ import annotations

import hashlib
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from typing import Hashable, Iterable, Mapping, Sequence

import numpy as np
from scipy.optimize import linear_sum_assignment

from .model import AnnotationRecord, DegenerateStatistic, Klass, Span, span_sort_key

DEFAULT_RESAMPLES = 30


# ---------------------------------------------------------------------------
# Nominal agreement on class labels
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ReliabilityMatrix:
    """Items x annotators table of nominal labels; None marks a missing cell."""

    items: tuple[str, ...]
    annotators: tuple[str, ...]
    values: tuple[tuple[Hashable, ...], ...]

    def __post_init__(self):
        if len(self.annotators) < 2:
            raise ValueError("reliability data needs at least two annotators")
        if len(self.values) != len(self.items):
            raise ValueError("one value row per item required")
        for row in self.values:
            if len(row) != len(self.annotators):
                raise ValueError("row width must equal the annotator count")
        if not any(self._pairable(row) for row in self.values):
            raise ValueError("no item carries two or more judgments")

    @staticmethod
    def _pairable(row: Sequence) -> bool:
        return sum(1 for v in row if v is not None) >= 2

    @classmethod
    def from_records(cls, records: Iterable[AnnotationRecord]) -> "ReliabilityMatrix":
        """Class-label matrix (CONSPIRACY/CRITICAL/NEITHER) from annotations."""
        cells: dict[str, dict[str, str]] = {}
        annotators: set[str] = set()
        for rec in records:
            if rec.conspiracy == 1:
                label = "CONSPIRACY"
            elif rec.critical == 1:
                label = "CRITICAL"
            else:
                label = "NEITHER"
            cells.setdefault(rec.doc_id, {})[rec.annotator] = label
            annotators.add(rec.annotator)
        items = tuple(sorted(cells))
        anns = tuple(sorted(annotators))
        rows = tuple(
            tuple(cells[item].get(a) for a in anns) for item in items
        )
        return cls(items=items, annotators=anns, values=rows)


def krippendorff_alpha(matrix: ReliabilityMatrix) -> float:
    """Nominal-scale alpha via the coincidence matrix.

    Each item with m >= 2 pairable values contributes 1/(m-1) per ordered
    value pair. Raises DegenerateStatistic when expected disagreement is
    zero (every pairable judgment carries the same label).
    """
    coincidence: Counter = Counter()
    for row in matrix.values:
        vals = [v for v in row if v is not None]
        m = len(vals)
        if m < 2:
            continue
        w = 1.0 / (m - 1)
        for i, c in enumerate(vals):
            for j, k in enumerate(vals):
                if i != j:
                    coincidence[(c, k)] += w
    margins: Counter = Counter()
    for (c, _), w in coincidence.items():
        margins[c] += w
    n = sum(margins.values())
    d_obs = sum(w for (c, k), w in coincidence.items() if c != k) / n
    d_exp = sum(
        margins[c] * margins[k] for c in margins for k in margins if c != k
    ) / (n * (n - 1.0))
    if d_exp == 0.0:
        raise DegenerateStatistic(
            "expected disagreement is zero: all pairable judgments are identical"
        )
    return 1.0 - d_obs / d_exp


def observed_agreement(matrix: ReliabilityMatrix) -> float:
    """Mean over items of (agreeing annotator pairs / co-present pairs)."""
    fractions = []
    for row in matrix.values:
        vals = [v for v in row if v is not None]
        m = len(vals)
        if m < 2:
            continue
        agree = sum(
            1 for i in range(m) for j in range(i + 1, m) if vals[i] == vals[j]
        )
        fractions.append(agree / (m * (m - 1) / 2))
    return float(np.mean(fractions))


# ---------------------------------------------------------------------------
# Gamma unitizing agreement
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Continuum:
    """One document's span annotations, per annotator, plus the text length."""

    doc_id: str
    length: int
    units: Mapping[str, tuple[Span, ...]]

    def __post_init__(self):
        if self.length <= 0:
            raise ValueError(f"zero-length document {self.doc_id!r}")
        if len(self.units) < 2:
            raise ValueError(f"continuum {self.doc_id!r} needs at least two annotators")
        for annotator, spans in self.units.items():
            for s in spans:
                if s.end > self.length:
                    raise ValueError(
                        f"span [{s.start}, {s.end}) of {annotator!r} exceeds "
                        f"document length {self.length}"
                    )


def positional_dissimilarity(u: Span, v: Span) -> float:
    d = (abs(u.start - v.start) + abs(u.end - v.end)) / (u.length + v.length)
    return min(1.0, d * d)


def _alignment_cost(units_a: Sequence[Span], units_b: Sequence[Span]) -> float:
    """Minimum total cost of aligning two unit sets.

    Square assignment problem: real-vs-real cells cost d_pos + d_cat, leaving
    a unit unaligned costs 1 (pairing it with a dummy), dummy-dummy cells are
    free. The dummy padding makes partial alignments expressible exactly.
    """
    n_a, n_b = len(units_a), len(units_b)
    if n_a == 0 and n_b == 0:
        return 0.0
    size = n_a + n_b
    cost = np.ones((size, size))
    cost[n_a:, n_b:] = 0.0
    for i, u in enumerate(units_a):
        for j, v in enumerate(units_b):
            d_cat = 0.0 if u.category is v.category else 1.0
            cost[i, j] = positional_dissimilarity(u, v) + d_cat
    rows, cols = linear_sum_assignment(cost)
    return float(cost[rows, cols].sum())


def _continuum_rng(seed: int, doc_id: str) -> np.random.Generator:
    # independent stream per document so parallel scheduling cannot reorder draws
    digest = int(hashlib.sha256(doc_id.encode("utf-8")).hexdigest()[:8], 16)
    return np.random.default_rng(np.random.SeedSequence([seed, digest]))


def _reposition(units: Sequence[Span], length: int, rng: np.random.Generator) -> list[Span]:
    out = []
    for s in units:
        slack = length - s.length
        if slack < 0:
            raise ValueError(f"unit of length {s.length} exceeds document length {length}")
        start = int(rng.integers(0, slack + 1))
        out.append(Span(s.category, start, start + s.length))
    return out


def gamma_components(
    continuum: Continuum, resamples: int = DEFAULT_RESAMPLES, seed: int = 0
) -> tuple[float, float]:
    """(observed disorder, expected disorder) for one continuum.

    Expected disorder is the mean alignment cost over `resamples` random
    continua that keep each unit's length and category but draw its position
    uniformly over the document.
    """
    annotators = sorted(continuum.units)
    if len(annotators) != 2:
        raise ValueError("gamma alignment is defined for exactly two annotators")
    units_a = sorted(continuum.units[annotators[0]], key=span_sort_key)
    units_b = sorted(continuum.units[annotators[1]], key=span_sort_key)
    delta_obs = _alignment_cost(units_a, units_b)
    rng = _continuum_rng(seed, continuum.doc_id)
    total = 0.0
    for _ in range(resamples):
        shuffled_a = _reposition(units_a, continuum.length, rng)
        shuffled_b = _reposition(units_b, continuum.length, rng)
        total += _alignment_cost(shuffled_a, shuffled_b)
    return delta_obs, total / resamples


def gamma_agreement(
    continua: Iterable[Continuum],
    resamples: int = DEFAULT_RESAMPLES,
    seed: int = 0,
    jobs: int = 1,
) -> float:
    """Pooled gamma over a collection: 1 - sum(obs) / sum(exp).

    Pooling keeps documents with empty annotation sets from producing 0/0
    terms; they simply contribute nothing to either sum.
    """
    continua = list(continua)
    if not continua:
        raise ValueError("gamma requires at least one continuum")
    if resamples < 10:
        raise ValueError("resamples must be >= 10")
    if seed < 0:
        raise ValueError("seed must be non-negative")
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            components = list(
                pool.map(lambda c: gamma_components(c, resamples, seed), continua)
            )
    else:
        components = [gamma_components(c, resamples, seed) for c in continua]
    sum_obs = sum(obs for obs, _ in components)
    sum_exp = sum(exp for _, exp in components)
    if sum_exp == 0.0:
        raise DegenerateStatistic("expected disorder is zero: no units to align")
    return 1.0 - sum_obs / sum_exp


@dataclass(frozen=True)
class BatchGamma:
    batches: tuple[float, ...]
    mean: float


def gamma_batches(
    continua: Sequence[Continuum],
    batch_size: int,
    resamples: int = DEFAULT_RESAMPLES,
    seed: int = 0,
    jobs: int = 1,
) -> BatchGamma:
    """Per-batch gamma in corpus order, mirroring batched quality control."""
    if batch_size < 1:
        raise ValueError("batch_size must be >= 1")
    values = []
    for i in range(0, len(continua), batch_size):
        chunk = continua[i : i + batch_size]
        values.append(gamma_agreement(chunk, resamples=resamples, seed=seed, jobs=jobs))
    return BatchGamma(batches=tuple(values), mean=float(np.mean(values)))


# ---------------------------------------------------------------------------
# Pairwise F1 baselines
# ---------------------------------------------------------------------------


class PairwiseMode(Enum):
    HUMAN_VS_HUMAN = "human_vs_human"
    HUMAN_VS_GOLD = "human_vs_gold"


def _binary_f1(
    pred: Mapping[str, Hashable], truth: Mapping[str, Hashable], positive: Hashable
) -> float | None:
    tp = fp = fn = 0
    for doc_id, t in truth.items():
        if doc_id not in pred:
            continue
        p = pred[doc_id]
        if p == positive and t == positive:
            tp += 1
        elif p == positive:
            fp += 1
        elif t == positive:
            fn += 1
    denom = 2 * tp + fp + fn
    if denom == 0:
        return None
    return 2.0 * tp / denom


def pairwise_f1_agreement(
    labels: Mapping[str, Mapping[str, Hashable]],
    mode: PairwiseMode = PairwiseMode.HUMAN_VS_HUMAN,
    gold: Mapping[str, Hashable] | None = None,
    classes: Sequence[Hashable] = (Klass.CONSPIRACY, Klass.CRITICAL),
) -> dict[Hashable, float | None]:
    """Per-class F1 averaged over annotator pairings.

    human_vs_human averages every ordered (prediction, truth) pair of
    distinct annotators; human_vs_gold scores each annotator against the
    supplied reference labels. A class with no defined F1 in any pairing is
    reported as None.
    """
    if len(labels) < 2 and mode is PairwiseMode.HUMAN_VS_HUMAN:
        raise ValueError("human_vs_human needs at least two annotators")
    if (gold is None) != (mode is PairwiseMode.HUMAN_VS_HUMAN):
        raise ValueError("gold labels are required exactly when mode is human_vs_gold")
    annotators = sorted(labels)
    if mode is PairwiseMode.HUMAN_VS_HUMAN:
        pairs = [
            (labels[i], labels[j]) for i in annotators for j in annotators if i != j
        ]
    else:
        pairs = [(labels[i], gold) for i in annotators]
    result: dict[Hashable, float | None] = {}
    for cls in classes:
        scores = [
            f1
            for pred, truth in pairs
            if (f1 := _binary_f1(pred, truth, cls)) is not None
        ]
        result[cls] = float(np.mean(scores)) if scores else None
    return result
