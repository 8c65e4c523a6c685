import json

import pytest
from hypothesis import given, strategies as st

from oppo.model import (
    AnnotationRecord,
    Category,
    CorpusError,
    GoldDocument,
    Klass,
    Lang,
    Message,
    PredictionSet,
    Span,
    manifest_path,
    normalize_spans,
    parse_corpus,
    tokenize,
    whitespace_only_spans,
    write_corpus,
)

from conftest import make_message


def test_token_count_is_derived():
    msg = make_message("m1", "one  two\nthree\t four ")
    assert msg.token_count == 4


def test_token_count_ignores_passed_value_shape():
    # token_count is not an init argument at all
    with pytest.raises(TypeError):
        Message(id="x", lang=Lang.EN, text="a", channel_id="c", token_count=7)


def test_tokenize_offsets():
    toks = tokenize("ab  cd\ne")
    assert [(t.text, t.start, t.end) for t in toks] == [
        ("ab", 0, 2),
        ("cd", 4, 6),
        ("e", 7, 8),
    ]


@pytest.mark.parametrize("start,end", [(-1, 3), (3, 3), (5, 2)])
def test_span_rejects_bad_offsets(start, end):
    with pytest.raises(CorpusError):
        Span(Category.AGENT, start, end)


def test_span_overlap():
    a = Span(Category.AGENT, 0, 10)
    assert a.overlap(Span(Category.VICTIM, 10, 12)) == 0
    assert a.overlap(Span(Category.VICTIM, 8, 12)) == 2
    assert a.overlap(Span(Category.AGENT, 2, 4)) == 2
    assert a.length == 10


def test_normalize_spans_drops_nested_same_category_only():
    outer = Span(Category.AGENT, 0, 20)
    inner = Span(Category.AGENT, 5, 10)
    other = Span(Category.VICTIM, 5, 10)
    out = normalize_spans({outer, inner, other})
    assert out == frozenset({outer, other})


def test_annotation_record_mutual_exclusion():
    with pytest.raises(CorpusError, match="mutually exclusive"):
        AnnotationRecord(doc_id="d", annotator="a", conspiracy=1, critical=1)
    with pytest.raises(CorpusError):
        AnnotationRecord(doc_id="d", annotator="a", conspiracy=2, critical=0)


def test_prediction_set_requires_content_and_flag_priority():
    with pytest.raises(CorpusError):
        PredictionSet(doc_id="d")
    p = PredictionSet(
        doc_id="d",
        spans=frozenset({Span(Category.AGENT, 0, 3)}),
        category_flags={Category.VICTIM: 1, Category.AGENT: 0},
    )
    # explicit flags win over span-implied presence
    assert p.present_categories() == frozenset({Category.VICTIM})
    q = PredictionSet(doc_id="d", spans=frozenset({Span(Category.AGENT, 0, 3)}))
    assert q.present_categories() == frozenset({Category.AGENT})


def test_gold_document_categories():
    g = GoldDocument(
        doc_id="d",
        klass=Klass.CONSPIRACY,
        spans=frozenset({Span(Category.AGENT, 0, 3), Span(Category.AGENT, 5, 8)}),
    )
    assert g.categories() == frozenset({Category.AGENT})


# ---------------------------------------------------------------------------
# IO
# ---------------------------------------------------------------------------


def _roundtrip(tmp_path, records, schema):
    path = tmp_path / f"{schema}.jsonl"
    write_corpus(path, records, schema)
    return parse_corpus(path, schema)


def test_roundtrip_all_schemas(tmp_path):
    messages = [make_message("m1", "alpha beta gamma"), make_message("m2", "uno dos", lang=Lang.ES)]
    annotations = [
        AnnotationRecord(
            doc_id="m1",
            annotator="a1",
            conspiracy=1,
            critical=0,
            spans=frozenset({Span(Category.FACILITATOR, 0, 5)}),
        )
    ]
    gold = [GoldDocument(doc_id="m1", klass=Klass.CRITICAL, spans=frozenset({Span(Category.AGENT, 0, 5)}))]
    preds = [
        PredictionSet(doc_id="m1", klass=Klass.CONSPIRACY),
        PredictionSet(doc_id="m2", spans=frozenset(), category_flags={Category.AGENT: 1}),
    ]
    assert _roundtrip(tmp_path, messages, "messages") == messages
    assert _roundtrip(tmp_path, annotations, "annotations") == annotations
    assert _roundtrip(tmp_path, gold, "gold") == gold
    assert _roundtrip(tmp_path, preds, "predictions") == preds


def test_missing_manifest_rejected(tmp_path):
    path = tmp_path / "messages.jsonl"
    write_corpus(path, [make_message("m1", "a b c")], "messages")
    manifest_path(path).unlink()
    with pytest.raises(CorpusError, match="manifest"):
        parse_corpus(path, "messages")


@pytest.mark.parametrize(
    "patch,needle",
    [
        ({"format_version": "2"}, "format_version"),
        ({"offsets": "utf8_bytes"}, "offset convention"),
        ({"schema": "gold"}, "schema"),
    ],
)
def test_manifest_mismatches_rejected(tmp_path, patch, needle):
    path = tmp_path / "messages.jsonl"
    write_corpus(path, [make_message("m1", "a b c")], "messages")
    manifest = json.loads(manifest_path(path).read_text())
    manifest.update(patch)
    manifest_path(path).write_text(json.dumps(manifest))
    with pytest.raises(CorpusError, match=needle):
        parse_corpus(path, "messages")


def test_duplicate_ids_carry_line_numbers(tmp_path):
    path = tmp_path / "messages.jsonl"
    write_corpus(path, [make_message("m1", "a b"), make_message("m1", "c d")], "messages")
    with pytest.raises(CorpusError) as exc:
        parse_corpus(path, "messages")
    assert exc.value.line == 2
    assert "duplicate" in str(exc.value)


def test_malformed_line_number(tmp_path):
    path = tmp_path / "messages.jsonl"
    write_corpus(path, [make_message("m1", "a b")], "messages")
    with path.open("a", encoding="utf-8") as fh:
        fh.write("{not json\n")
    with pytest.raises(CorpusError) as exc:
        parse_corpus(path, "messages")
    assert exc.value.line == 2


def test_span_offsets_validated_against_documents(tmp_path):
    docs = {"m1": make_message("m1", "short text")}
    path = tmp_path / "annotations.jsonl"
    rec = AnnotationRecord(
        doc_id="m1",
        annotator="a1",
        conspiracy=0,
        critical=1,
        spans=frozenset({Span(Category.AGENT, 0, 50)}),
    )
    write_corpus(path, [rec], "annotations")
    with pytest.raises(CorpusError, match="out of range"):
        parse_corpus(path, "annotations", documents=docs)
    with pytest.raises(CorpusError, match="unknown doc id"):
        parse_corpus(path, "annotations", documents={})


def test_whitespace_only_span_flagged():
    docs = {"m1": make_message("m1", "ab   cd")}
    rec = GoldDocument(
        doc_id="m1", klass=Klass.CONSPIRACY, spans=frozenset({Span(Category.AGENT, 2, 5)})
    )
    flagged = whitespace_only_spans([rec], docs)
    assert flagged == [("m1", Span(Category.AGENT, 2, 5))]


def test_unicode_offsets_roundtrip(tmp_path):
    # non-BMP characters still count as single positions
    text = "a\U0001f600b cd"
    msg = make_message("m1", text)
    gold = [
        GoldDocument(doc_id="m1", klass=Klass.CRITICAL, spans=frozenset({Span(Category.VICTIM, 0, 3)}))
    ]
    path = tmp_path / "gold.jsonl"
    write_corpus(path, gold, "gold")
    (parsed,) = parse_corpus(path, "gold", documents={"m1": msg})
    (span,) = parsed.spans
    assert text[span.start : span.end] == "a\U0001f600b"


@given(
    st.text(alphabet=st.characters(blacklist_categories=("Cs",)), max_size=80)
)
def test_token_count_matches_split(text):
    assert len(tokenize(text)) == len(text.split())


@given(st.integers(0, 50), st.integers(0, 50), st.integers(0, 50), st.integers(0, 50))
def test_overlap_symmetric_and_bounded(a1, l1, a2, l2):
    s = Span(Category.AGENT, a1, a1 + l1 + 1)
    t = Span(Category.VICTIM, a2, a2 + l2 + 1)
    assert s.overlap(t) == t.overlap(s)
    assert 0 <= s.overlap(t) <= min(s.length, t.length)
