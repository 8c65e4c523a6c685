"""Shared fixtures and corpus builders for the test suite."""

from __future__ import annotations

import json
from pathlib import Path

import pytest

from oppo.model import (
    AnnotationRecord,
    Category,
    Lang,
    Message,
    Span,
    write_corpus,
)


def make_message(doc_id: str, text: str, lang: Lang = Lang.EN, channel: str = "ch1") -> Message:
    return Message(id=doc_id, lang=lang, text=text, channel_id=channel)


def write_messages(path: Path, messages) -> Path:
    return write_corpus(path, messages, "messages")


def write_annotations(path: Path, records) -> Path:
    return write_corpus(path, records, "annotations")


def write_channel_stats(path: Path, stats: list[dict]) -> Path:
    path.write_text(json.dumps(stats), encoding="utf-8")
    return path


def gamma_standard_fixture(jitter: int = 0, docs: int = 12):
    """Evenly spaced 12-char units over a 240-char continuum, categories
    alternating, two annotators; the second annotator's boundaries are
    shifted right by `jitter` characters."""
    from oppo.agreement import Continuum

    continua = []
    for d in range(docs):
        units_a, units_b = [], []
        for i in range(8):
            start = 10 + 25 * i
            cat = Category.AGENT if i % 2 == 0 else Category.FACILITATOR
            units_a.append(Span(cat, start, start + 12))
            units_b.append(Span(cat, start + jitter, start + jitter + 12))
        continua.append(
            Continuum(
                doc_id=f"doc{d}",
                length=240,
                units={"ann1": tuple(units_a), "ann2": tuple(units_b)},
            )
        )
    return continua


@pytest.fixture
def long_text() -> str:
    return (
        "the administrators and superiors who reportedly never intended to "
        "approve them in the first place were named in the leaked thread"
    )


@pytest.fixture
def triple_annotation():
    """Three annotators agreeing on conspiracy, two of them with spans."""

    def build(doc_id: str = "d1") -> list[AnnotationRecord]:
        return [
            AnnotationRecord(
                doc_id=doc_id,
                annotator="ann1",
                conspiracy=1,
                critical=0,
                spans=frozenset({Span(Category.AGENT, 0, 10)}),
            ),
            AnnotationRecord(
                doc_id=doc_id,
                annotator="ann2",
                conspiracy=1,
                critical=0,
                spans=frozenset({Span(Category.AGENT, 5, 16)}),
            ),
            AnnotationRecord(doc_id=doc_id, annotator="ann3", conspiracy=0, critical=1),
        ]

    return build
