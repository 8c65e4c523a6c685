import pytest
from hypothesis import given, strategies as st

from oppo.model import Lang
from oppo.pipeline import (
    ChannelStats,
    CriterionDistributions,
    DropReason,
    build_distributions,
    criterion_values,
    filter_messages,
    is_link_token,
    load_channel_stats,
    quality_score,
    rank_and_select,
    score_corpus,
)

from conftest import make_message


WORDS = "uno dos tres cuatro cinco seis siete ocho nueve diez once doce".split()


def _msg(doc_id, n_tokens=12, channel="ch1", prefix=""):
    text = (prefix + " " if prefix else "") + " ".join(
        WORDS[i % len(WORDS)] + str(i) for i in range(n_tokens - (1 if prefix else 0))
    )
    return make_message(doc_id, text, channel=channel)


def _stats(channel="ch1", **kw):
    base = dict(
        channel_id=channel,
        audience=100,
        author_count=10,
        messages_per_author_mean=3.0,
        messages_per_author_std=1.0,
        message_count=30,
    )
    base.update(kw)
    return ChannelStats(**base)


# ---------------------------------------------------------------------------
# Filtering
# ---------------------------------------------------------------------------


def test_short_messages_dropped():
    kept, dropped = filter_messages([_msg("a", 11), _msg("b", 12)])
    assert [m.id for m in kept] == ["b"]
    assert [(d.message.id, d.reason) for d in dropped] == [("a", DropReason.SHORT)]


def test_duplicate_detection_is_case_and_whitespace_insensitive():
    m1 = make_message("a", "Alpha   beta\tgamma delta " + " ".join(WORDS))
    m2 = make_message("b", "alpha beta gamma delta " + " ".join(WORDS))
    kept, dropped = filter_messages([m1, m2])
    assert [m.id for m in kept] == ["a"]
    assert dropped[0].reason is DropReason.DUPLICATE


def test_duplicate_of_dropped_message_is_not_a_duplicate():
    # dedup compares against kept messages, not against everything seen
    short = make_message("a", "tiny text")
    short_again = make_message("b", "tiny  TEXT")
    kept, dropped = filter_messages([short, short_again])
    assert kept == []
    assert [d.reason for d in dropped] == [DropReason.SHORT, DropReason.SHORT]


def test_duplicate_takes_precedence_over_short():
    m1 = _msg("a", 12)
    m2 = make_message("b", m1.text)
    kept, dropped = filter_messages([m1, m2, make_message("c", "x")])
    reasons = {d.message.id: d.reason for d in dropped}
    assert reasons["b"] is DropReason.DUPLICATE
    assert reasons["c"] is DropReason.SHORT


def test_link_heavy_dropped():
    linky = make_message(
        "a",
        "https://a.io http://b.io www.c.io t.me/chan @user1 @user2 @user3 one two three four five",
    )
    # 7 link/mention tokens of 12 > 0.5
    kept, dropped = filter_messages([linky])
    assert dropped[0].reason is DropReason.LINK_HEAVY
    kept, dropped = filter_messages([linky], max_link_ratio=0.7)
    assert kept == [linky]


def test_is_link_token():
    assert is_link_token("HTTPS://x")
    assert is_link_token("t.me/chan")
    assert not is_link_token("me/chan")


def test_filter_is_idempotent():
    msgs = [_msg("a"), _msg("b", 5), _msg("a2", prefix="x")]
    kept, _ = filter_messages(msgs)
    kept2, dropped2 = filter_messages(kept)
    assert kept2 == kept and dropped2 == []


def test_filter_validates_arguments():
    with pytest.raises(ValueError):
        filter_messages([], min_tokens=0)
    with pytest.raises(ValueError):
        filter_messages([], max_link_ratio=1.5)


# ---------------------------------------------------------------------------
# Quality scoring
# ---------------------------------------------------------------------------


def test_percentile_of_minimum_is_one_over_n():
    msgs = [_msg(f"d{i}", 12 + i) for i in range(4)]
    stats = {"ch1": _stats()}
    dist = build_distributions(msgs, stats)
    # token_count is criterion index 5; the smallest value ranks 1/N
    assert dist.percentile(5, msgs[0].token_count) == pytest.approx(0.25)
    assert dist.percentile(5, msgs[3].token_count) == pytest.approx(1.0)


def test_quality_score_sums_six_percentiles():
    msgs = [_msg(f"d{i}", 12 + i) for i in range(4)]
    stats = {"ch1": _stats()}
    dist = build_distributions(msgs, stats)
    score = quality_score(msgs[0], stats["ch1"], dist)
    assert len(score.per_criterion) == 6
    # channel criteria are constant across the corpus -> percentile 1.0 each
    assert score.per_criterion[:5] == (1.0,) * 5
    assert score.total == pytest.approx(5.0 + 0.25)
    assert all(0 < p <= 1 for p in score.per_criterion)


def test_quality_score_rejects_mismatched_channel():
    msgs = [_msg("d0")]
    stats = {"ch1": _stats(), "ch2": _stats("ch2")}
    dist = build_distributions(msgs, stats)
    with pytest.raises(ValueError, match="do not match"):
        quality_score(msgs[0], stats["ch2"], dist)


def test_ranking_orders_by_total_then_id():
    msgs = [
        _msg("b", 20, channel="big"),
        _msg("a", 20, channel="big"),
        _msg("c", 12, channel="small"),
    ]
    stats = {
        "big": _stats("big", audience=1000, author_count=50, message_count=500),
        "small": _stats("small", audience=10, author_count=2, message_count=5),
    }
    scores = score_corpus(msgs, stats)
    ranked = rank_and_select(msgs, scores, 3)
    assert [m.id for m in ranked] == ["a", "b", "c"]
    assert rank_and_select(msgs, scores, 1)[0].id == "a"
    assert rank_and_select(msgs, scores, 0) == []


def test_rank_requires_scores():
    msgs = [_msg("a")]
    with pytest.raises(ValueError, match="no quality score"):
        rank_and_select(msgs, {}, 1)


def test_score_corpus_unknown_channel():
    with pytest.raises(ValueError, match="unknown channel"):
        build_distributions([_msg("a", channel="nope")], {"ch1": _stats()})


def test_channel_stats_validation():
    with pytest.raises(ValueError):
        _stats(audience=-1)
    with pytest.raises(ValueError):
        _stats(author_count=50, message_count=10)


def test_load_channel_stats(tmp_path):
    path = tmp_path / "channels.json"
    path.write_text(
        '[{"channel_id": "ch1", "audience": 5, "author_count": 2,'
        ' "messages_per_author_mean": 1.5, "messages_per_author_std": 0.5,'
        ' "message_count": 3}]'
    )
    stats = load_channel_stats(path)
    assert stats["ch1"].audience == 5
    path.write_text("{}")
    with pytest.raises(ValueError, match="JSON array"):
        load_channel_stats(path)


@given(st.lists(st.integers(12, 40), min_size=1, max_size=30))
def test_percentiles_in_unit_interval_and_monotone(token_counts):
    msgs = [_msg(f"d{i}", n) for i, n in enumerate(token_counts)]
    stats = {"ch1": _stats()}
    dist = build_distributions(msgs, stats)
    scores = [quality_score(m, stats["ch1"], dist) for m in msgs]
    for s in scores:
        assert 0 < s.total <= 6.0
    # larger token count never scores lower on the token criterion
    by_tokens = sorted(zip(token_counts, scores), key=lambda p: p[0])
    for (n1, s1), (n2, s2) in zip(by_tokens, by_tokens[1:]):
        assert s1.per_criterion[5] <= s2.per_criterion[5]
