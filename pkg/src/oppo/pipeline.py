"""Message filtering, six-criterion quality scoring, and top-k selection.

Each candidate message is scored by summing the empirical percentile ranks of
six raw criteria (five channel-activity figures plus the message word count),
giving a scale-free total in [0, 6].
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from .model import Message, tokenize

DEFAULT_MIN_TOKENS = 12

CRITERIA = (
    "audience",
    "author_count",
    "messages_per_author_mean",
    "messages_per_author_std",
    "message_count",
    "token_count",
)

LINK_PREFIXES = ("http://", "https://", "www.", "t.me/")
_MENTION_TOKEN_RE = re.compile(r"@\w")


class DropReason(Enum):
    DUPLICATE = "DUPLICATE"
    SHORT = "SHORT"
    LINK_HEAVY = "LINK_HEAVY"


@dataclass(frozen=True)
class ChannelStats:
    channel_id: str
    audience: int
    author_count: int
    messages_per_author_mean: float
    messages_per_author_std: float
    message_count: int

    def __post_init__(self):
        if min(self.audience, self.author_count, self.message_count) < 0:
            raise ValueError(f"negative channel counts for {self.channel_id!r}")
        if self.messages_per_author_mean < 0 or self.messages_per_author_std < 0:
            raise ValueError(f"negative per-author statistics for {self.channel_id!r}")
        if self.message_count > 0 and self.author_count > self.message_count:
            raise ValueError(
                f"channel {self.channel_id!r} has more authors than messages"
            )


def load_channel_stats(path: str | Path) -> dict[str, ChannelStats]:
    """JSON array of channel records keyed by channel_id."""
    raw = json.loads(Path(path).read_text(encoding="utf-8"))
    if not isinstance(raw, list):
        raise ValueError(f"{path}: expected a JSON array of channel records")
    stats: dict[str, ChannelStats] = {}
    for i, entry in enumerate(raw):
        try:
            cs = ChannelStats(
                channel_id=entry["channel_id"],
                audience=int(entry["audience"]),
                author_count=int(entry["author_count"]),
                messages_per_author_mean=float(entry["messages_per_author_mean"]),
                messages_per_author_std=float(entry["messages_per_author_std"]),
                message_count=int(entry["message_count"]),
            )
        except (KeyError, TypeError) as exc:
            raise ValueError(f"{path}: entry {i}: {exc}") from exc
        if cs.channel_id in stats:
            raise ValueError(f"{path}: duplicate channel_id {cs.channel_id!r}")
        stats[cs.channel_id] = cs
    return stats


@dataclass(frozen=True)
class QualityScore:
    doc_id: str
    per_criterion: tuple[float, ...]
    total: float


@dataclass(frozen=True)
class Dropped:
    message: Message
    reason: DropReason


def is_link_token(token: str) -> bool:
    return token.lower().startswith(LINK_PREFIXES)


def is_mention_token(token: str) -> bool:
    return _MENTION_TOKEN_RE.match(token) is not None


def _dedup_key(text: str) -> str:
    return " ".join(text.split()).lower()


def filter_messages(
    messages: Iterable[Message],
    min_tokens: int = DEFAULT_MIN_TOKENS,
    max_link_ratio: float = 0.5,
) -> tuple[list[Message], list[Dropped]]:
    """Drop duplicates, short messages, and link/mention-heavy messages.

    Duplicates are detected after whitespace normalization and lowercasing,
    against messages already kept. Every drop carries a machine-readable
    reason. Filtering is total and idempotent.
    """
    if min_tokens < 1:
        raise ValueError("min_tokens must be >= 1")
    if not 0 <= max_link_ratio <= 1:
        raise ValueError("max_link_ratio must be in [0, 1]")
    kept: list[Message] = []
    dropped: list[Dropped] = []
    seen: set[str] = set()
    for msg in messages:
        key = _dedup_key(msg.text)
        if key in seen:
            dropped.append(Dropped(msg, DropReason.DUPLICATE))
            continue
        if msg.token_count < min_tokens:
            dropped.append(Dropped(msg, DropReason.SHORT))
            continue
        tokens = tokenize(msg.text)
        linky = sum(1 for t in tokens if is_link_token(t.text) or is_mention_token(t.text))
        if tokens and linky / len(tokens) > max_link_ratio:
            dropped.append(Dropped(msg, DropReason.LINK_HEAVY))
            continue
        seen.add(key)
        kept.append(msg)
    return kept, dropped


def criterion_values(message: Message, stats: ChannelStats) -> tuple[float, ...]:
    """Raw values of the six quality criteria for one message."""
    return (
        float(stats.audience),
        float(stats.author_count),
        float(stats.messages_per_author_mean),
        float(stats.messages_per_author_std),
        float(stats.message_count),
        float(message.token_count),
    )


@dataclass(frozen=True)
class CriterionDistributions:
    """Sorted per-criterion value arrays over one corpus snapshot."""

    values: tuple[np.ndarray, ...]

    @property
    def size(self) -> int:
        return len(self.values[0])

    def percentile(self, criterion: int, value: float) -> float:
        """Fraction of corpus values <= value; the minimum maps to 1/N."""
        vals = self.values[criterion]
        if len(vals) == 0:
            raise ValueError("empty criterion distribution")
        return float(np.searchsorted(vals, value, side="right")) / len(vals)


def build_distributions(
    messages: Sequence[Message], channel_stats: Mapping[str, ChannelStats]
) -> CriterionDistributions:
    if not messages:
        raise ValueError("cannot build distributions from an empty corpus")
    cols: list[list[float]] = [[] for _ in CRITERIA]
    for msg in messages:
        stats = channel_stats.get(msg.channel_id)
        if stats is None:
            raise ValueError(f"unknown channel_id {msg.channel_id!r}")
        for i, v in enumerate(criterion_values(msg, stats)):
            cols[i].append(v)
    return CriterionDistributions(tuple(np.sort(np.asarray(c, dtype=float)) for c in cols))


def quality_score(
    message: Message, stats: ChannelStats, distributions: CriterionDistributions
) -> QualityScore:
    """Sum of the six per-criterion percentile ranks, each in [0, 1]."""
    if stats.channel_id != message.channel_id:
        raise ValueError(
            f"channel stats {stats.channel_id!r} do not match message channel "
            f"{message.channel_id!r}"
        )
    per = tuple(
        distributions.percentile(i, v)
        for i, v in enumerate(criterion_values(message, stats))
    )
    return QualityScore(message.id, per, float(sum(per)))


def score_corpus(
    messages: Sequence[Message],
    channel_stats: Mapping[str, ChannelStats],
    distributions: CriterionDistributions | None = None,
) -> dict[str, QualityScore]:
    if distributions is None:
        distributions = build_distributions(messages, channel_stats)
    scores = {}
    for msg in messages:
        stats = channel_stats.get(msg.channel_id)
        if stats is None:
            raise ValueError(f"unknown channel_id {msg.channel_id!r}")
        scores[msg.id] = quality_score(msg, stats, distributions)
    return scores


def rank_and_select(
    messages: Iterable[Message], scores: Mapping[str, QualityScore], k: int
) -> list[Message]:
    """Top-k messages by descending total score, ties broken by id ascending."""
    messages = list(messages)
    missing = [m.id for m in messages if m.id not in scores]
    if missing:
        raise ValueError(f"no quality score for message {missing[0]!r}")
    ranked = sorted(messages, key=lambda m: (-scores[m.id].total, m.id))
    return ranked[: max(k, 0)]
