#!/usr/bin/env python3
"""Recompute the headline corpus statistics from a local copy of the dataset.

Expected layout under --dataset (or the OPPO_DATASET environment variable):

    gold_EN.jsonl         gold_ES.jsonl          adjudicated gold standard
    messages_EN.jsonl     messages_ES.jsonl      anonymized message texts
    annotations_EN.jsonl  [annotations_ES.jsonl] raw per-annotator judgments
    anger_EN.txt          anger_ES.txt           anger lexicon, one entry per line
    violence_EN.txt       violence_ES.txt        violence lexicon
    [lemmas_EN.tsv]       [lemmas_ES.tsv]        optional "surface lemma" table

Sections whose inputs are missing are skipped with a note, so a partial
dataset still produces the statistics it can support. Everything printed
here is recomputed from the files; nothing is hard-coded.
"""

from __future__ import annotations

import argparse
import os
import sys
from collections import Counter
from pathlib import Path

import numpy as np

from oppo import agreement, analysis
from oppo import gold as gold_mod
from oppo.model import Category, Klass, parse_corpus

LANGS = ("EN", "ES")


def _load(dataset: Path, name: str, schema: str):
    path = dataset / name
    if not path.exists():
        return None
    return list(parse_corpus(path, schema))


def print_span_table(docs) -> None:
    stats = gold_mod.span_statistics(docs)
    letters = [c.value for c in Category]
    print("  spans per category (rows: class, columns: category)")
    print("    " + "".join(f"{c:>8}" for c in letters) + f"{'total':>8}")
    for row in [k.value for k in Klass] + ["all"]:
        cells = "".join(f"{stats.counts[row][c]:>8}" for c in letters)
        print(f"    {cells}{stats.totals[row]:>8}  {row}")


def igc_table(docs) -> dict[str, int]:
    return gold_mod.igc_distribution(docs)


def print_igc(docs, label: str) -> None:
    dist = igc_table(docs)
    total = sum(dist.values())
    shares = ", ".join(f"{lvl}: {100.0 * n / total:.2f}%" for lvl, n in dist.items())
    print(f"  IGC shares ({label}, n={total}): {shares}")


def igc_chi2(docs) -> None:
    igc_order = [lvl.value for lvl in gold_mod.IGC]
    klass_order = [k.value for k in Klass]
    table = np.zeros((4, 2), dtype=int)
    for doc in docs:
        lvl = gold_mod.derive_igc(doc).value.value
        table[igc_order.index(lvl), klass_order.index(doc.klass.value)] += 1
    try:
        res = analysis.chi_square_independence(table)
    except analysis.DegenerateStatistic as exc:
        print(f"  IGC x class chi-square: degenerate ({exc})")
        return
    print(f"  IGC x class chi-square = {res.statistic:.2f}, df = {res.df}, p = {res.p:.3g}")


def annotator_labels(records) -> dict[str, dict[str, str]]:
    out: dict[str, dict[str, str]] = {}
    for rec in records:
        out.setdefault(rec.annotator, {})[rec.doc_id] = gold_mod.vote_label(rec).value
    return out


def majority_labels(records) -> dict[str, str]:
    by_doc: dict[str, list] = {}
    for rec in records:
        by_doc.setdefault(rec.doc_id, []).append(rec)
    labels = {}
    for doc_id, recs in sorted(by_doc.items()):
        counts = Counter(gold_mod.vote_label(r).value for r in recs)
        label, top = counts.most_common(1)[0]
        if len(recs) >= 2 and top >= len(recs) // 2 + 1:
            labels[doc_id] = label
    return labels


def agreement_section(records) -> None:
    matrix = agreement.ReliabilityMatrix.from_records(records)
    print(f"  alpha = {agreement.krippendorff_alpha(matrix):.3f}, "
          f"observed = {agreement.observed_agreement(matrix):.3f} "
          f"({len(matrix.items)} items, {len(matrix.annotators)} annotators)")
    labels = annotator_labels(records)
    for mode, gold_labels in (
        (agreement.PairwiseMode.HUMAN_VS_HUMAN, None),
        (agreement.PairwiseMode.HUMAN_VS_GOLD, majority_labels(records)),
    ):
        f1 = agreement.pairwise_f1_agreement(
            labels, mode=mode, gold=gold_labels, classes=("CONSPIRACY", "CRITICAL")
        )
        shown = {k: (f"{v:.2f}" if v is not None else "n/a") for k, v in f1.items()}
        print(f"  pairwise F1 {mode.value}: {shown}")


def lexicon_section(dataset: Path, lang: str, messages, docs) -> None:
    anger_path = dataset / f"anger_{lang}.txt"
    violence_path = dataset / f"violence_{lang}.txt"
    if not (anger_path.exists() and violence_path.exists()):
        print("  lexicons missing, skipping score correlations")
        return
    anger = analysis.parse_lexicon(anger_path, "anger")
    violence = analysis.parse_lexicon(violence_path, "violence")
    lemmas_path = dataset / f"lemmas_{lang}.tsv"
    lemma_map = analysis.parse_lemma_map(lemmas_path) if lemmas_path.exists() else None
    by_id = {m.id: m for m in messages}
    docs = [d for d in docs if d.doc_id in by_id]
    scores = analysis.score_corpus(by_id, docs, anger, violence, lemma_map)
    anger_pct = [s.anger_pct for s in scores]
    violence_pct = [s.violence_pct for s in scores]
    try:
        res = analysis.pearson_r(anger_pct, violence_pct)
        print(f"  anger-violence Pearson r = {res.statistic:.3f}, p = {res.p:.3g} "
              f"(n = {len(scores)})")
    except (ValueError, analysis.DegenerateStatistic) as exc:
        print(f"  anger-violence correlation: {exc}")
    try:
        suite = analysis.run_hypothesis_suite(scores)
        h1, h2 = suite["h1_anger_by_class"], suite["h2_violence_by_class"]
        print(f"  anger by class: U = {h1['statistic']:.1f}, p = {h1['p']:.3g}; "
              f"violence by class: U = {h2['statistic']:.1f}, p = {h2['p']:.3g}")
    except analysis.DegenerateStatistic as exc:
        print(f"  class comparisons degenerate: {exc}")


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter
    )
    parser.add_argument("--dataset", type=Path,
                        default=os.environ.get("OPPO_DATASET"),
                        help="dataset directory (default: env OPPO_DATASET)")
    args = parser.parse_args(argv)
    if args.dataset is None:
        parser.error("--dataset or OPPO_DATASET is required")
    dataset = Path(args.dataset)
    if not dataset.is_dir():
        print(f"dataset directory not found: {dataset}", file=sys.stderr)
        return 1

    all_gold = []
    for lang in LANGS:
        print(f"\n=== {lang} ===")
        docs = _load(dataset, f"gold_{lang}.jsonl", "gold")
        if docs is None:
            print("  gold file missing, skipping")
            continue
        all_gold.extend(docs)
        print(f"  gold documents: {len(docs)}")
        print_span_table(docs)
        print_igc(docs, lang)
        igc_chi2(docs)
        records = _load(dataset, f"annotations_{lang}.jsonl", "annotations")
        if records is None:
            print("  annotations missing, skipping agreement")
        else:
            agreement_section(records)
        messages = _load(dataset, f"messages_{lang}.jsonl", "messages")
        if messages is None:
            print("  messages missing, skipping lexicon scores")
        else:
            lexicon_section(dataset, lang, messages, docs)

    if all_gold:
        print("\n=== combined ===")
        print_igc(all_gold, "EN+ES")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
