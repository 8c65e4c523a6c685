#!/usr/bin/env python3
"""End-to-end demo: generate a synthetic corpus, then chain every oppo
subcommand over it (pipeline -> anon -> gold -> iaa -> eval -> analyze ->
validate) and print the headline number from each report.

Usage: python3 scripts/demo_workflow.py [--work demo_run] [--seed 7]
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parent))
import make_synthetic_corpus

from oppo.cli import main as oppo
from oppo.model import Category, Klass, PredictionSet, Span, parse_corpus, write_corpus

CATEGORIES = tuple(Category)


def run(argv: list[str]) -> None:
    print("\n$ oppo " + " ".join(argv))
    rc = oppo(argv)
    if rc != 0:
        raise SystemExit(f"step exited with code {rc}")


def load(path: Path) -> dict:
    return json.loads(Path(path).read_text(encoding="utf-8"))


def derive_predictions(gold_path: Path, messages_path: Path, out_path: Path, seed: int) -> Path:
    """Perturb the gold standard into plausible system output: some class
    flips, boundary jitter, dropped spans, category swaps, spurious spans."""
    rng = np.random.default_rng(seed)
    texts = {m.id: m.text for m in parse_corpus(messages_path, "messages")}
    preds = []
    for doc in sorted(parse_corpus(gold_path, "gold"), key=lambda d: d.doc_id):
        klass = doc.klass
        if rng.random() < 0.15:
            klass = Klass.CRITICAL if klass is Klass.CONSPIRACY else Klass.CONSPIRACY
        length = len(texts[doc.doc_id])
        spans = set()
        for span in sorted(doc.spans, key=lambda s: (s.start, s.end, s.category.value)):
            if rng.random() < 0.10:
                continue
            category = span.category
            if rng.random() < 0.15:
                category = CATEGORIES[int(rng.integers(len(CATEGORIES)))]
            start = int(np.clip(span.start + rng.integers(-3, 4), 0, length - 1))
            end = int(np.clip(span.end + rng.integers(-3, 4), start + 1, length))
            spans.add(Span(category, start, end))
        if rng.random() < 0.3:
            category = (Category.FACILITATOR, Category.CAMPAIGNER, Category.VICTIM)[
                int(rng.integers(3))
            ]
            start = int(rng.integers(0, max(1, length - 5)))
            spans.add(Span(category, start, start + 5))
        preds.append(PredictionSet(doc_id=doc.doc_id, klass=klass, spans=frozenset(spans)))
    return write_corpus(out_path, preds, "predictions")


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--work", type=Path, default=Path("demo_run"))
    parser.add_argument("--messages", type=int, default=80)
    parser.add_argument("--seed", type=int, default=7)
    args = parser.parse_args(argv)

    corpus = args.work / "corpus"
    out = args.work / "out"
    seed = ["--seed", str(args.seed), "--out-dir", str(out)]
    print(f"generating corpus under {corpus}")
    paths = make_synthetic_corpus.build_corpus(corpus, args.messages, args.seed)

    run(["pipeline", "--messages", str(paths["messages"]),
         "--channel-stats", str(paths["channels"]), "--select", "40", *seed])
    rep = load(out / "pipeline_report.json")
    print(f"  kept {rep['kept_count']}/{rep['input_count']}, drops {rep['drop_counts']}")

    run(["anon", "--messages", str(out / "kept_messages.jsonl"),
         "--annotations", str(paths["annotations"]),
         "--proper-nouns", str(paths["proper_nouns"]),
         "--salt", "demo-salt", *seed])
    rep = load(out / "anonymization_report.json")
    print(f"  entities {rep['entity_counts']}, residual {rep['residual_detections']}")

    anon_messages = out / "anonymized_messages.jsonl"
    remapped = out / "remapped_annotations.jsonl"
    run(["gold", "--annotations", str(remapped), "--messages", str(anon_messages), *seed])
    rep = load(out / "gold_report.json")
    print(f"  gold docs {rep['document_count']}, adjudication {len(rep['adjudication_queue'])}, "
          f"excluded {len(rep['excluded_neither'])}")

    for metric in ("alpha", "observed"):
        run(["iaa", "--metric", metric, "--annotations", str(remapped),
             "--report", f"iaa_{metric}.json", *seed])
        rep = load(out / f"iaa_{metric}.json")["result"]
        key = "alpha" if metric == "alpha" else "observed_agreement"
        print(f"  {key} = {rep[key]:.4f} over {rep['n_items']} items")
    run(["iaa", "--metric", "gamma", "--annotations", str(remapped),
         "--messages", str(anon_messages), "--resamples", "10",
         "--report", "iaa_gamma.json", *seed])
    rep = load(out / "iaa_gamma.json")["result"]
    print(f"  gamma = {rep['gamma']:.4f} over {rep['n_continua']} continua")
    run(["iaa", "--metric", "pairwise-f1", "--annotations", str(remapped),
         "--mode", "human_vs_gold", "--report", "iaa_f1.json", *seed])
    print(f"  pairwise F1 {load(out / 'iaa_f1.json')['result']['f1']}")

    gold_file = out / "gold.jsonl"
    pred_file = derive_predictions(gold_file, anon_messages, out / "predictions.jsonl",
                                   args.seed + 1)
    print(f"\nderived predictions at {pred_file}")
    for mode, report in (("binary", "eval_binary.json"), ("spans", "eval_spans.json"),
                         ("categories", "eval_categories.json"),
                         ("error-crosstab", "eval_crosstab.json")):
        extra = ["--row-category", "F", "--col-category", "C"] if mode == "error-crosstab" else []
        run(["eval", mode, "--pred", str(pred_file), "--gold", str(gold_file),
             "--messages", str(anon_messages), "--report", report, *extra, *seed])
        res = load(out / report)["result"]
        if mode == "binary":
            print(f"  accuracy = {res['accuracy']:.4f}")
        elif mode == "spans":
            print(f"  macro span F1 = {res['macro']['f1']:.4f}")
        elif mode == "categories":
            shown = {c: round(v["f1"], 3) for c, v in sorted(res["per_category"].items())}
            print(f"  presence F1 {shown}")
        else:
            print(f"  chi2 = {res['chi2']['statistic']:.3f}, p = {res['chi2']['p']:.4g}")

    run(["analyze", "--gold", str(gold_file), "--messages", str(anon_messages),
         "--anger-lexicon", str(paths["anger"]), "--violence-lexicon", str(paths["violence"]),
         "--lemma-map", str(paths["lemmas"]), *seed])
    combined = load(out / "analysis_report.json")["combined"]
    h1 = combined["h1_anger_by_class"]
    print(f"  n = {combined['n']}; h1 p = {h1['p']:.4g} (significant: {h1['significant']})")
    shares = {k: round(v, 2) for k, v in combined["h3_igc_by_class"]["igc_shares_pct"].items()}
    print(f"  IGC shares {shares}")

    run(["validate", "--messages", str(anon_messages), "--annotations", str(remapped),
         "--gold", str(gold_file), "--predictions", str(pred_file),
         "--report", "validation.json", *seed])
    print(f"\nall reports under {out}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
