import itertools

import pytest
from hypothesis import given, settings, strategies as st

from oppo.gold import (
    IGC,
    MergeResult,
    RejectionReason,
    VoteLabel,
    build_gold,
    derive_igc,
    igc_distribution,
    majority_vote,
    merge_spans,
    span_annotator_pair,
    span_statistics,
)
from oppo.model import AnnotationRecord, Category, GoldDocument, Klass, Span


def _rec(doc, ann, label, spans=frozenset()):
    cn = 1 if label == "CN" else 0
    cr = 1 if label == "CR" else 0
    return AnnotationRecord(doc_id=doc, annotator=ann, conspiracy=cn, critical=cr, spans=spans)


def _vote(labels):
    recs = [_rec("d1", f"ann{i}", lab) for i, lab in enumerate(labels)]
    return majority_vote(recs)


# ---------------------------------------------------------------------------
# Majority vote
# ---------------------------------------------------------------------------


def test_majority_two_of_three():
    assert _vote(["CN", "CN", "CR"]).klass is VoteLabel.CONSPIRACY
    assert _vote(["CR", "NE", "CR"]).klass is VoteLabel.CRITICAL


def test_all_neither_excluded():
    outcome = _vote(["NE", "NE", "NE"])
    assert outcome.klass is VoteLabel.NEITHER
    assert outcome.excluded and not outcome.needs_adjudication


def test_three_way_split_unresolved():
    outcome = _vote(["CN", "CR", "NE"])
    assert outcome.klass is VoteLabel.UNRESOLVED
    assert outcome.needs_adjudication and outcome.excluded
    with pytest.raises(ValueError):
        outcome.gold_klass()


def test_exactly_six_of_27_triples_unresolved():
    labels = ["CN", "CR", "NE"]
    unresolved = sum(
        1
        for triple in itertools.product(labels, repeat=3)
        if _vote(list(triple)).klass is VoteLabel.UNRESOLVED
    )
    assert unresolved == 6  # the permutations of (CN, CR, NE)


def test_vote_input_validation():
    with pytest.raises(ValueError, match="expected 3"):
        majority_vote([_rec("d", "a", "CN")])
    with pytest.raises(ValueError, match="duplicate annotator"):
        majority_vote([_rec("d", "a", "CN"), _rec("d", "a", "CN"), _rec("d", "b", "CR")])
    with pytest.raises(ValueError, match="multiple documents"):
        majority_vote([_rec("d1", "a", "CN"), _rec("d2", "b", "CN"), _rec("d1", "c", "CN")])


def test_vote_with_five_annotators():
    recs = [_rec("d", f"a{i}", lab) for i, lab in enumerate(["CN", "CN", "CN", "CR", "NE"])]
    assert majority_vote(recs, annotators=5).klass is VoteLabel.CONSPIRACY
    recs = [_rec("d", f"a{i}", lab) for i, lab in enumerate(["CN", "CN", "CR", "CR", "NE"])]
    assert majority_vote(recs, annotators=5).klass is VoteLabel.UNRESOLVED


# ---------------------------------------------------------------------------
# Span merging
# ---------------------------------------------------------------------------


def A(start, end, cat=Category.FACILITATOR):
    return Span(cat, start, end)


def test_overlapping_same_category_yields_union_hull():
    result = merge_spans({A(4, 30)}, {A(20, 78)})
    assert result.gold == frozenset({A(4, 78)})
    assert result.rejections == ()


def test_single_annotator_span_rejected():
    result = merge_spans({A(0, 10)}, set())
    assert result.gold == frozenset()
    (rej,) = result.rejections
    assert rej.reason is RejectionReason.SINGLE_ANNOTATOR and rej.side == "a"


def test_touching_spans_do_not_overlap():
    # half-open intervals: [0,10) and [10,20) share no character
    result = merge_spans({A(0, 10)}, {A(10, 20)})
    assert result.gold == frozenset()
    assert {r.reason for r in result.rejections} == {RejectionReason.SINGLE_ANNOTATOR}


def test_label_conflict_rejects_both():
    result = merge_spans({Span(Category.AGENT, 0, 10)}, {Span(Category.FACILITATOR, 0, 10)})
    assert result.gold == frozenset()
    assert {(r.side, r.reason) for r in result.rejections} == {
        ("a", RejectionReason.LABEL_CONFLICT),
        ("b", RejectionReason.LABEL_CONFLICT),
    }
    assert result.conflict_regions == ((0, 10),)


def test_conflict_overlap_threshold():
    a = {Span(Category.AGENT, 0, 10)}
    b = {Span(Category.FACILITATOR, 9, 20)}
    strict = merge_spans(a, b, conflict_overlap=1)
    assert {r.reason for r in strict.rejections} == {RejectionReason.LABEL_CONFLICT}
    lax = merge_spans(a, b, conflict_overlap=2)
    assert {r.reason for r in lax.rejections} == {RejectionReason.SINGLE_ANNOTATOR}


def test_chained_overlap_merges_transitively():
    # a1-b1 and b1-a2 overlap; a1-a2 do not; still one component
    a = {A(0, 10), A(18, 30)}
    b = {A(8, 20)}
    result = merge_spans(a, b)
    assert result.gold == frozenset({A(0, 30)})


def test_conflict_adjacent_gold_logged_but_kept():
    # At threshold 3 the FACILITATOR spans tolerate small cross-category
    # overlaps, while the AGENT/VICTIM pair conflicts inside the hull.
    a = {A(0, 11), Span(Category.AGENT, 10, 14)}
    b = {A(5, 12), Span(Category.VICTIM, 10, 13)}
    result = merge_spans(a, b, conflict_overlap=3)
    assert result.gold == frozenset({A(0, 12)})
    assert result.conflict_regions == ((10, 13),)
    assert result.conflict_adjacent == frozenset({A(0, 12)})
    conflict_rejected = {r.span.category for r in result.rejections if r.reason is RejectionReason.LABEL_CONFLICT}
    assert conflict_rejected == {Category.AGENT, Category.VICTIM}


def test_same_category_nesting_normalized_before_merge():
    a = {A(0, 20), A(5, 10)}  # inner span dropped by normalization
    b = {A(3, 8)}
    result = merge_spans(a, b)
    assert result.gold == frozenset({A(0, 20)})
    assert result.rejections == ()


spans_strategy = st.lists(
    st.tuples(
        st.sampled_from([Category.AGENT, Category.FACILITATOR, Category.VICTIM]),
        st.integers(0, 40),
        st.integers(1, 10),
    ).map(lambda t: Span(t[0], t[1], t[1] + t[2])),
    max_size=5,
).map(frozenset)


@settings(max_examples=150, deadline=None)
@given(a=spans_strategy, b=spans_strategy)
def test_merge_symmetry_and_hull_bounds(a, b):
    res_ab = merge_spans(a, b)
    res_ba = merge_spans(b, a)
    assert res_ab.symmetric_view() == res_ba.symmetric_view()
    # a surviving gold span never overlaps a conflict region at threshold 1:
    # the covering span would itself have conflicted and been rejected
    assert res_ab.conflict_adjacent == frozenset()
    if not a and not b:
        assert res_ab.gold == frozenset()
        return
    all_spans = list(a) + list(b)
    lo = min(s.start for s in all_spans)
    hi = max(s.end for s in all_spans)
    for g in res_ab.gold:
        assert lo <= g.start < g.end <= hi
        # at least one character carries the gold category from both sides
        assert any(
            any(s.category is g.category and s.start <= p < s.end for s in a)
            and any(t.category is g.category and t.start <= p < t.end for t in b)
            for p in range(g.start, g.end)
        )


@settings(max_examples=150, deadline=None)
@given(a=spans_strategy, b=spans_strategy)
def test_merge_gold_count_bounded(a, b):
    res = merge_spans(a, b)
    for cat in Category:
        n_gold = sum(1 for g in res.gold if g.category is cat)
        n_a = sum(1 for s in a if s.category is cat)
        n_b = sum(1 for s in b if s.category is cat)
        assert n_gold <= min(n_a, n_b) or n_gold == 0


# ---------------------------------------------------------------------------
# IGC derivation
# ---------------------------------------------------------------------------


def _gold_doc(cats, doc_id="d1", klass=Klass.CONSPIRACY):
    spans = frozenset(Span(c, i * 10, i * 10 + 5) for i, c in enumerate(cats, start=1))
    return GoldDocument(doc_id=doc_id, klass=klass, spans=spans)


@pytest.mark.parametrize(
    "cats,expected",
    [
        ([Category.VICTIM, Category.AGENT], IGC.C1),
        ([Category.CAMPAIGNER], IGC.C2),
        ([Category.FACILITATOR, Category.OBJECTIVE], IGC.C3),
        ([Category.CAMPAIGNER, Category.FACILITATOR, Category.AGENT], IGC.C4),
        ([], IGC.C1),
    ],
)
def test_derive_igc(cats, expected):
    igc = derive_igc(_gold_doc(cats))
    assert igc.value is expected
    assert igc.doc_id == "d1"


def test_igc_distribution_partitions_corpus():
    docs = [
        _gold_doc([], "d1"),
        _gold_doc([Category.CAMPAIGNER], "d2"),
        _gold_doc([Category.FACILITATOR], "d3"),
        _gold_doc([Category.CAMPAIGNER, Category.FACILITATOR], "d4"),
        _gold_doc([Category.AGENT], "d5"),
    ]
    dist = igc_distribution(docs)
    assert dist == {"C1": 2, "C2": 1, "C3": 1, "C4": 1}
    assert sum(dist.values()) == len(docs)


# ---------------------------------------------------------------------------
# Span statistics
# ---------------------------------------------------------------------------


def test_span_statistics_single_doc():
    doc = GoldDocument(
        doc_id="d1",
        klass=Klass.CONSPIRACY,
        spans=frozenset(
            {
                Span(Category.AGENT, 0, 5),
                Span(Category.AGENT, 10, 15),
                Span(Category.VICTIM, 20, 25),
                Span(Category.VICTIM, 30, 35),
            }
        ),
    )
    stats = span_statistics([doc])
    assert stats.counts["conspiracy"]["A"] == 2
    assert stats.percentages["conspiracy"]["A"] == pytest.approx(50.0)
    assert stats.percentages["conspiracy"]["V"] == pytest.approx(50.0)
    assert stats.percentages["all"]["A"] == pytest.approx(50.0)
    assert stats.has_empty_row  # the critical row is empty


def test_span_statistics_empty_corpus():
    stats = span_statistics([])
    assert stats.totals == {"conspiracy": 0, "critical": 0, "all": 0}
    assert all(v == 0.0 for row in stats.percentages.values() for v in row.values())
    assert stats.has_empty_row


# ---------------------------------------------------------------------------
# End-to-end gold build
# ---------------------------------------------------------------------------


def test_span_annotator_pair_prefers_span_carriers():
    recs = [
        _rec("d", "z_with_spans", "CN", frozenset({A(0, 5)})),
        _rec("d", "a_no_spans", "CN"),
        _rec("d", "b_with_spans", "CN", frozenset({A(2, 8)})),
    ]
    first, second = span_annotator_pair(recs)
    assert {first.annotator, second.annotator} == {"z_with_spans", "b_with_spans"}
    assert first.annotator == "b_with_spans"  # id order breaks the tie


def test_build_gold_routes_documents(triple_annotation):
    records = list(triple_annotation("keep"))
    records += [_rec("neither", f"ann{i}", "NE") for i in range(3)]
    records += [_rec("split", "ann1", "CN"), _rec("split", "ann2", "CR"), _rec("split", "ann3", "NE")]
    build = build_gold(records)
    assert [d.doc_id for d in build.documents] == ["keep"]
    assert build.documents[0].klass is Klass.CONSPIRACY
    assert build.documents[0].spans == frozenset({Span(Category.AGENT, 0, 16)})
    assert build.adjudication_queue == ("split",)
    assert build.excluded_neither == ("neither",)
    assert build.span_annotators["keep"] == ("ann1", "ann2")
    assert isinstance(build.merges["keep"], MergeResult)


def test_build_gold_propagates_vote_errors(triple_annotation):
    records = triple_annotation("d1")[:2]  # only two annotators
    with pytest.raises(ValueError, match="expected 3"):
        build_gold(records)
