#!/usr/bin/env python3
"""Generate a small synthetic corpus for exercising the full toolchain.

Writes messages (with a few pipeline-droppable distractors and some
sensitive surfaces), three annotators' judgments, channel statistics,
anger/violence lexicons, a lemma table, and a proper-noun replacement map
into --out. Everything is deterministic in --seed.
"""

from __future__ import annotations

import argparse
import json
from pathlib import Path

import numpy as np

from oppo.model import AnnotationRecord, Category, Lang, Message, Span, tokenize, write_corpus

FILLER_EN = (
    "the measures were discussed again while officials kept repeating that "
    "everything would be reviewed before any decision about the program"
).split()
FILLER_ES = (
    "las medidas fueron discutidas otra vez mientras los responsables "
    "repetian que todo seria revisado antes de cualquier decision"
).split()
ANGER = ["rage", "fury", "wrath", "loathing"]
VIOLENCE = ["punch", "smash", "destroy", "burn"]
AGENT_WORDS = ["ministry", "board", "committee"]
FACILITATOR_WORDS = ["broadcasters", "editors", "networks"]
CAMPAIGNER_WORDS = ["protesters", "dissenters", "marchers"]


def _compose_text(rng, i: int, klass: str, igc_level: int) -> tuple[str, dict[str, str]]:
    """Return the text plus the word chosen for each markable category."""
    filler = FILLER_EN if i % 2 == 0 else FILLER_ES
    words = list(rng.choice(filler, size=14))
    anger_n = int(rng.integers(2, 5)) if klass == "conspiracy" else int(rng.integers(0, 2))
    violence_n = int(rng.integers(1, 4)) if klass == "conspiracy" else int(rng.integers(0, 2))
    words += list(rng.choice(ANGER, size=anger_n)) + list(rng.choice(VIOLENCE, size=violence_n))
    markables = {"A": str(rng.choice(AGENT_WORDS))}
    if igc_level in (1, 3):
        markables["C"] = str(rng.choice(CAMPAIGNER_WORDS))
    if igc_level in (2, 3):
        markables["F"] = str(rng.choice(FACILITATOR_WORDS))
    words += list(markables.values())
    rng.shuffle(words)
    if i % 9 == 0:
        words.insert(3, f"@member{i:03d}")
    if i % 11 == 0:
        words.insert(5, f"tips{i}@example.org")
    if i % 13 == 0:
        words[7:7] = ["Acme", "Corp"]
    return " ".join(words), markables


def _category_spans(rng, text: str, markables: dict[str, str], jitter: int) -> frozenset[Span]:
    spans = set()
    tokens = {t.text: (t.start, t.end) for t in tokenize(text)}
    for letter, word in markables.items():
        if word not in tokens:
            continue
        start, end = tokens[word]
        start = max(0, start - int(rng.integers(0, jitter + 1)))
        end = min(len(text), end + int(rng.integers(0, jitter + 1)))
        spans.add(Span(Category(letter), start, end))
    return frozenset(spans)


def build_corpus(out: Path, n: int, seed: int) -> dict[str, Path]:
    rng = np.random.default_rng(seed)
    out.mkdir(parents=True, exist_ok=True)
    messages: list[Message] = []
    records: list[AnnotationRecord] = []

    for i in range(n):
        doc_id = f"doc{i:04d}"
        # language, class, and span profile cycle independently so that no
        # per-language or per-class slice ends up degenerate
        klass = "conspiracy" if (i // 2) % 2 == 0 else "critical"
        igc_level = (i // 4) % 4
        text, markables = _compose_text(rng, i, klass, igc_level)
        lang = Lang.EN if i % 2 == 0 else Lang.ES
        channel = f"ch{i % 4}"
        messages.append(Message(id=doc_id, lang=lang, text=text, channel_id=channel))

        cn = 1 if klass == "conspiracy" else 0
        votes = [(cn, 1 - cn), (cn, 1 - cn), (cn, 1 - cn)]
        if i % 17 == 0:
            votes = [(1, 0), (0, 0), (0, 1)]  # unresolved, needs adjudication
        elif i % 19 == 0:
            votes = [(0, 0), (0, 0), (1, 0)]  # majority says neither
        elif i % 7 == 0:
            votes[2] = (1 - cn, cn)  # one dissenting annotator
        span_sets = [
            _category_spans(rng, text, markables, jitter=2),
            _category_spans(rng, text, markables, jitter=2),
            frozenset(),
        ]
        if i % 23 == 0 and span_sets[0]:
            span_sets = [span_sets[0], frozenset(), frozenset()]  # single-annotator spans
        for ann_i, ((c, r), spans) in enumerate(zip(votes, span_sets), start=1):
            records.append(
                AnnotationRecord(
                    doc_id=doc_id,
                    annotator=f"ann{ann_i}",
                    conspiracy=c,
                    critical=r,
                    spans=spans,
                )
            )

    # distractors the pipeline should drop
    messages.append(Message(id="short01", lang=Lang.EN, text="too few words", channel_id="ch0"))
    messages.append(
        Message(
            id="dup01", lang=messages[0].lang,
            text=messages[0].text.upper(), channel_id="ch0",
        )
    )
    messages.append(
        Message(
            id="link01", lang=Lang.EN,
            text="https://a.example www.b.example t.me/chan @m1 @m2 @m3 "
                 "http://c.example one two three four five six",
            channel_id="ch1",
        )
    )

    paths = {
        "messages": write_corpus(out / "messages.jsonl", messages, "messages"),
        "annotations": write_corpus(out / "annotations.jsonl", records, "annotations"),
    }

    channels = [
        {
            "channel_id": f"ch{k}",
            "audience": int(rng.integers(500, 50_000)),
            "author_count": int(rng.integers(5, 80)),
            "messages_per_author_mean": float(np.round(rng.uniform(1.5, 12.0), 2)),
            "messages_per_author_std": float(np.round(rng.uniform(0.2, 4.0), 2)),
            "message_count": int(rng.integers(200, 5_000)),
        }
        for k in range(4)
    ]
    paths["channels"] = out / "channels.json"
    paths["channels"].write_text(json.dumps(channels, indent=2) + "\n", encoding="utf-8")

    paths["anger"] = out / "anger.txt"
    paths["anger"].write_text("".join(w + "\n" for w in ANGER) + "loath*\n", encoding="utf-8")
    paths["violence"] = out / "violence.txt"
    paths["violence"].write_text("".join(w + "\n" for w in VIOLENCE) + "burn*  # burned, burning\n", encoding="utf-8")
    paths["lemmas"] = out / "lemmas.tsv"
    paths["lemmas"].write_text("raging rage\nburns burn\n", encoding="utf-8")
    paths["proper_nouns"] = out / "proper_nouns.json"
    paths["proper_nouns"].write_text(json.dumps({"Acme Corp": "Vantor Group"}) + "\n", encoding="utf-8")
    return paths


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", type=Path, default=Path("synthetic_corpus"))
    parser.add_argument("--messages", type=int, default=80, help="annotated message count")
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args(argv)
    paths = build_corpus(args.out, args.messages, args.seed)
    for name, path in sorted(paths.items()):
        print(f"{name}: {path}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
