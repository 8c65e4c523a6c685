"""Lexicon scoring and the statistical analysis layer.

Rank tests are computed from first principles (midranks, tie corrections)
with p-values taken from the asymptotic reference distributions; scipy is
used only for distribution functions and nothing else, so every statistic
here can be cross-checked against an independent implementation.
"""

from __future__ import annotations

import unicodedata
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Hashable, Iterable, Mapping, Sequence

import numpy as np
from scipy import special
from scipy.stats import chi2 as chi2_dist
from scipy.stats import norm, t as t_dist

from .gold import IGC, derive_igc
from .model import (
    DegenerateStatistic,
    GoldDocument,
    Klass,
    Lang,
    Message,
    tokenize,
)


# ---------------------------------------------------------------------------
# Lexicons and percentage scoring
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Lexicon:
    """Word list with optional trailing-wildcard prefix patterns."""

    name: str
    literals: frozenset[str]
    prefixes: tuple[str, ...]
    language: Lang | None = None

    def __post_init__(self):
        if not self.literals and not self.prefixes:
            raise ValueError(f"lexicon {self.name!r} is empty")
        bad = [w for w in list(self.literals) + list(self.prefixes) if w != w.lower()]
        if bad:
            raise ValueError(f"lexicon entries must be lowercase: {bad[0]!r}")

    def matches(self, token: str) -> bool:
        if token in self.literals:
            return True
        return bool(self.prefixes) and token.startswith(self.prefixes)


def parse_lexicon(path: str | Path, name: str, language: Lang | None = None) -> Lexicon:
    """One entry per line; trailing '*' marks a prefix; '#' starts a comment."""
    literals: set[str] = set()
    prefixes: set[str] = set()
    seen: set[str] = set()
    for line_no, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        entry = raw.split("#", 1)[0].strip()
        if not entry:
            continue
        key = entry.lower()
        if key in seen:
            raise ValueError(f"{path}: line {line_no}: duplicate entry {entry!r}")
        seen.add(key)
        if key.endswith("*"):
            stem = key[:-1]
            if not stem:
                raise ValueError(f"{path}: line {line_no}: bare wildcard")
            prefixes.add(stem)
        else:
            literals.add(key)
    return Lexicon(
        name=name,
        literals=frozenset(literals),
        prefixes=tuple(sorted(prefixes)),
        language=language,
    )


def _strip_punct(token: str) -> str:
    start, end = 0, len(token)
    while start < end and unicodedata.category(token[start]).startswith("P"):
        start += 1
    while end > start and unicodedata.category(token[end - 1]).startswith("P"):
        end -= 1
    return token[start:end]


def normalize_token(token: str) -> str:
    return _strip_punct(token.lower())


def lexicon_score(
    message: Message,
    lexicon: Lexicon,
    lemma_map: Mapping[str, str] | None = None,
) -> float:
    """100 x (matching tokens / all tokens), after lowercasing and stripping
    edge punctuation. An optional surface-to-lemma map is applied before
    matching."""
    if message.token_count == 0:
        raise ValueError(f"empty text in document {message.id!r}")
    matches = 0
    for token in tokenize(message.text):
        norm_tok = normalize_token(token.text)
        if lemma_map is not None:
            norm_tok = lemma_map.get(norm_tok, norm_tok)
        if norm_tok and lexicon.matches(norm_tok):
            matches += 1
    return 100.0 * matches / message.token_count


def parse_lemma_map(path: str | Path) -> dict[str, str]:
    """Tab- or whitespace-separated surface/lemma pairs, '#' comments."""
    table: dict[str, str] = {}
    for line_no, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        entry = raw.split("#", 1)[0].strip()
        if not entry:
            continue
        parts = entry.split()
        if len(parts) != 2:
            raise ValueError(f"{path}: line {line_no}: expected 'surface lemma'")
        table[parts[0].lower()] = parts[1].lower()
    return table


@dataclass(frozen=True)
class ScoreRecord:
    doc_id: str
    anger_pct: float
    violence_pct: float
    igc: IGC
    klass: Klass

    def __post_init__(self):
        for value in (self.anger_pct, self.violence_pct):
            if not 0.0 <= value <= 100.0:
                raise ValueError(f"percentage out of range: {value}")


def score_corpus(
    messages: Mapping[str, Message],
    gold: Iterable[GoldDocument],
    anger: Lexicon,
    violence: Lexicon,
    lemma_map: Mapping[str, str] | None = None,
) -> list[ScoreRecord]:
    records = []
    for doc in sorted(gold, key=lambda d: d.doc_id):
        msg = messages.get(doc.doc_id)
        if msg is None:
            raise ValueError(f"no message text for gold document {doc.doc_id!r}")
        records.append(
            ScoreRecord(
                doc_id=doc.doc_id,
                anger_pct=lexicon_score(msg, anger, lemma_map),
                violence_pct=lexicon_score(msg, violence, lemma_map),
                igc=derive_igc(doc).value,
                klass=doc.klass,
            )
        )
    return records


# ---------------------------------------------------------------------------
# Test reports
# ---------------------------------------------------------------------------


class TestKind(Enum):
    MANN_WHITNEY = "MANN_WHITNEY"
    KRUSKAL_WALLIS = "KRUSKAL_WALLIS"
    CHI_SQUARE = "CHI_SQUARE"
    KS_NORMALITY = "KS_NORMALITY"
    PEARSON = "PEARSON"


@dataclass(frozen=True)
class TestReport:
    test: TestKind
    statistic: float
    p: float
    df: float | None = None
    groups: Mapping[str, object] = field(default_factory=dict)

    def to_jsonable(self) -> dict:
        return {
            "test": self.test.value,
            "statistic": self.statistic,
            "df": self.df,
            "p": self.p,
            "groups": dict(self.groups),
        }


def _describe(values: np.ndarray) -> dict:
    return {
        "n": int(len(values)),
        "mean": float(np.mean(values)),
        "median": float(np.median(values)),
    }


# ---------------------------------------------------------------------------
# Rank tests
# ---------------------------------------------------------------------------


def _midranks(values: np.ndarray) -> np.ndarray:
    """Average ranks for ties, 1-based."""
    order = np.argsort(values, kind="mergesort")
    ranks = np.empty(len(values), dtype=float)
    sorted_vals = values[order]
    i = 0
    n = len(values)
    while i < n:
        j = i
        while j + 1 < n and sorted_vals[j + 1] == sorted_vals[i]:
            j += 1
        ranks[order[i : j + 1]] = (i + j) / 2.0 + 1.0
        i = j + 1
    return ranks


def _tie_term(values: np.ndarray) -> float:
    """Sum of t^3 - t over tie groups of the pooled sample."""
    _, counts = np.unique(values, return_counts=True)
    return float(np.sum(counts.astype(float) ** 3 - counts))


def mann_whitney_u(
    group_a: Sequence[float], group_b: Sequence[float]
) -> TestReport:
    """Two-sided Mann-Whitney U with midranks, tie and continuity correction.

    The reported statistic is U for the first group; the p-value comes from
    the normal approximation on the larger of the two U values.
    """
    a = np.asarray(group_a, dtype=float)
    b = np.asarray(group_b, dtype=float)
    if len(a) == 0 or len(b) == 0:
        raise ValueError("both groups must be non-empty")
    n1, n2 = len(a), len(b)
    n = n1 + n2
    pooled = np.concatenate([a, b])
    ranks = _midranks(pooled)
    r1 = float(ranks[:n1].sum())
    u1 = r1 - n1 * (n1 + 1) / 2.0
    u2 = n1 * n2 - u1
    var = n1 * n2 / 12.0 * ((n + 1) - _tie_term(pooled) / (n * (n - 1.0)))
    if var <= 0.0:
        raise DegenerateStatistic("all pooled values are identical")
    z = (max(u1, u2) - n1 * n2 / 2.0 - 0.5) / np.sqrt(var)
    p = min(1.0, 2.0 * float(norm.sf(z)))
    return TestReport(
        test=TestKind.MANN_WHITNEY,
        statistic=u1,
        p=p,
        df=None,
        groups={"a": _describe(a), "b": _describe(b)},
    )


def kruskal_wallis(groups: Sequence[Sequence[float]]) -> TestReport:
    """H with tie correction; p from chi-square with k-1 degrees of freedom.

    A pooled sample with every value identical has H = 0 by convention (the
    0/0 tie correction is resolved toward no effect)."""
    if len(groups) < 2:
        raise ValueError("kruskal_wallis needs at least two groups")
    arrays = [np.asarray(g, dtype=float) for g in groups]
    if any(len(g) == 0 for g in arrays):
        raise ValueError("every group must be non-empty")
    pooled = np.concatenate(arrays)
    n = len(pooled)
    if n < 5:
        raise ValueError("total sample size must be at least 5")
    ranks = _midranks(pooled)
    h = 0.0
    offset = 0
    for g in arrays:
        r = ranks[offset : offset + len(g)].sum()
        h += r * r / len(g)
        offset += len(g)
    h = 12.0 / (n * (n + 1)) * h - 3.0 * (n + 1)
    correction = 1.0 - _tie_term(pooled) / (n**3 - n)
    statistic = 0.0 if correction == 0.0 else h / correction
    df = len(groups) - 1
    p = float(chi2_dist.sf(statistic, df))
    return TestReport(
        test=TestKind.KRUSKAL_WALLIS,
        statistic=float(statistic),
        p=p,
        df=float(df),
        groups={f"g{i}": _describe(g) for i, g in enumerate(arrays)},
    )


# ---------------------------------------------------------------------------
# Chi-square with adjusted residuals
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ChiSquareResult:
    statistic: float
    df: int
    p: float
    expected: tuple[tuple[float, ...], ...]
    adjusted_residuals: tuple[tuple[float, ...], ...]

    def to_report(self) -> TestReport:
        return TestReport(
            test=TestKind.CHI_SQUARE,
            statistic=self.statistic,
            p=self.p,
            df=float(self.df),
            groups={
                "expected": [list(r) for r in self.expected],
                "adjusted_residuals": [list(r) for r in self.adjusted_residuals],
            },
        )


def chi_square_independence(table: Sequence[Sequence[float]]) -> ChiSquareResult:
    """Pearson chi-square on an r x c count table plus adjusted residuals.

    Residuals are (O - E) / sqrt(E (1 - row share)(1 - column share)), which
    is approximately standard normal cell-wise under independence.
    """
    observed = np.asarray(table, dtype=float)
    if observed.ndim != 2 or min(observed.shape) < 2:
        raise ValueError("contingency table must be at least 2x2")
    if np.any(observed < 0):
        raise ValueError("counts must be non-negative")
    row = observed.sum(axis=1)
    col = observed.sum(axis=0)
    total = observed.sum()
    if np.any(row == 0) or np.any(col == 0):
        raise DegenerateStatistic("a margin of the contingency table is zero")
    expected = np.outer(row, col) / total
    statistic = float(np.sum((observed - expected) ** 2 / expected))
    r, c = observed.shape
    df = (r - 1) * (c - 1)
    p = float(special.gammaincc(df / 2.0, statistic / 2.0))
    denom = expected * np.outer(1.0 - row / total, 1.0 - col / total)
    residuals = (observed - expected) / np.sqrt(denom)
    return ChiSquareResult(
        statistic=statistic,
        df=df,
        p=p,
        expected=tuple(tuple(float(x) for x in rrow) for rrow in expected),
        adjusted_residuals=tuple(tuple(float(x) for x in rrow) for rrow in residuals),
    )


# ---------------------------------------------------------------------------
# Normality and correlation
# ---------------------------------------------------------------------------


def ks_normality(sample: Sequence[float]) -> TestReport:
    """Kolmogorov-Smirnov D against a normal fitted by sample mean and
    (ddof=1) standard deviation; asymptotic Kolmogorov p-value."""
    x = np.sort(np.asarray(sample, dtype=float))
    n = len(x)
    if n < 5:
        raise ValueError("sample too small for the KS test (need n >= 5)")
    std = float(np.std(x, ddof=1))
    if std == 0.0:
        raise DegenerateStatistic("zero variance sample")
    cdf = norm.cdf(x, loc=float(np.mean(x)), scale=std)
    grid = np.arange(1.0, n + 1) / n
    d_plus = float(np.max(grid - cdf))
    d_minus = float(np.max(cdf - (grid - 1.0 / n)))
    d = max(d_plus, d_minus)
    p = float(np.clip(special.kolmogorov(np.sqrt(n) * d), 0.0, 1.0))
    return TestReport(
        test=TestKind.KS_NORMALITY,
        statistic=d,
        p=p,
        df=None,
        groups={"sample": _describe(x), "std": std},
    )


def pearson_r(x: Sequence[float], y: Sequence[float]) -> TestReport:
    xs = np.asarray(x, dtype=float)
    ys = np.asarray(y, dtype=float)
    if len(xs) != len(ys):
        raise ValueError("samples must have equal length")
    n = len(xs)
    if n < 3:
        raise ValueError("need at least 3 paired observations")
    xc = xs - xs.mean()
    yc = ys - ys.mean()
    denom = np.sqrt(np.sum(xc * xc) * np.sum(yc * yc))
    if denom == 0.0:
        raise DegenerateStatistic("zero variance in one of the samples")
    r = float(np.clip(np.sum(xc * yc) / denom, -1.0, 1.0))
    df = n - 2
    if abs(r) == 1.0:
        p = 0.0
    else:
        t_stat = r * np.sqrt(df / (1.0 - r * r))
        p = 2.0 * float(t_dist.sf(abs(t_stat), df))
    return TestReport(
        test=TestKind.PEARSON,
        statistic=r,
        p=p,
        df=float(df),
        groups={"n": n},
    )


# ---------------------------------------------------------------------------
# Hypothesis suite
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SuiteConfig:
    alpha: float = 0.05


def _split_by_klass(scores: Sequence[ScoreRecord], attr: str) -> tuple[list, list]:
    cn = [getattr(s, attr) for s in scores if s.klass is Klass.CONSPIRACY]
    cr = [getattr(s, attr) for s in scores if s.klass is Klass.CRITICAL]
    return cn, cr


def _split_by_igc(scores: Sequence[ScoreRecord], attr: str) -> dict[str, list]:
    out: dict[str, list] = {level.value: [] for level in IGC}
    for s in scores:
        out[s.igc.value].append(getattr(s, attr))
    return out


def run_hypothesis_suite(
    scores: Sequence[ScoreRecord], config: SuiteConfig = SuiteConfig()
) -> dict:
    """The four preregistered comparisons over one scored corpus.

    H1/H2: anger resp. violence percentages differ between the two classes
    (Mann-Whitney). H3: the IGC distribution depends on the class
    (chi-square with adjusted residuals). H4: anger and violence differ
    across IGC levels (Kruskal-Wallis). The report is a plain nested dict,
    deterministic for a given input.
    """
    if not scores:
        raise ValueError("no score records")
    report: dict = {"config": {"alpha": config.alpha}, "n": len(scores)}

    for hyp, attr in (("h1_anger_by_class", "anger_pct"), ("h2_violence_by_class", "violence_pct")):
        cn, cr = _split_by_klass(scores, attr)
        if not cn or not cr:
            raise DegenerateStatistic("a class has no documents")
        mw = mann_whitney_u(cn, cr)
        report[hyp] = mw.to_jsonable()
        report[hyp]["significant"] = bool(mw.p < config.alpha)

    igc_order = [level.value for level in IGC]
    klass_order = [k.value for k in Klass]
    table = np.zeros((len(igc_order), len(klass_order)), dtype=int)
    for s in scores:
        table[igc_order.index(s.igc.value), klass_order.index(s.klass.value)] += 1
    chi = chi_square_independence(table)
    shares = table.sum(axis=1) / table.sum() * 100.0
    report["h3_igc_by_class"] = {
        **chi.to_report().to_jsonable(),
        "significant": bool(chi.p < config.alpha),
        "igc_order": igc_order,
        "klass_order": klass_order,
        "table": [[int(x) for x in row] for row in table],
        "igc_shares_pct": {lvl: float(sh) for lvl, sh in zip(igc_order, shares)},
    }

    report["h4_by_igc"] = {}
    for attr, key in (("anger_pct", "anger"), ("violence_pct", "violence")):
        groups = _split_by_igc(scores, attr)
        present = [groups[lvl] for lvl in igc_order if groups[lvl]]
        if len(present) < 2:
            raise DegenerateStatistic("fewer than two IGC levels present")
        kw = kruskal_wallis(present)
        entry = kw.to_jsonable()
        entry["significant"] = bool(kw.p < config.alpha)
        entry["group_medians"] = {
            lvl: (float(np.median(groups[lvl])) if groups[lvl] else None)
            for lvl in igc_order
        }
        report["h4_by_igc"][key] = entry

    descriptives = {}
    for attr, key in (("anger_pct", "anger"), ("violence_pct", "violence")):
        cn, cr = _split_by_klass(scores, attr)
        descriptives[key] = {
            "conspiracy": _describe(np.asarray(cn)),
            "critical": _describe(np.asarray(cr)),
        }
    report["descriptives"] = descriptives
    return report
