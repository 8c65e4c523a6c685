"""Command-line entry point.

Subcommands: pipeline, anon, gold, iaa, eval, analyze, validate. Every
subcommand writes structured JSON reports (no timestamps, provenance block
with version, seed, config hash, and input digests) into --out-dir.

Exit codes: 0 success, 1 input validation failure, 2 degenerate statistic,
64 usage error.
"""

from __future__ import annotations

import argparse
import os
import re
import sys
from collections import Counter
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Mapping, Sequence

from . import agreement, analysis, anonymizer, evaluation, reporting
from . import gold as gold_mod
from . import pipeline as pipeline_mod
from .model import (
    Category,
    CorpusError,
    DegenerateStatistic,
    Message,
    parse_corpus,
    write_corpus,
)

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_DEGENERATE = 2
EXIT_USAGE = 64


class UsageError(Exception):
    def __init__(self, message: str, usage: str):
        super().__init__(message)
        self.usage = usage


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would sys.exit(2); we need 64
        raise UsageError(message, self.format_usage())


@dataclass(frozen=True)
class RunConfig:
    """Everything that determines a run's outputs, for hashing and reports."""

    command: str
    seed: int
    language: str
    paths: Mapping[str, str]
    thresholds: Mapping[str, float]

    def validate_paths(self):
        missing = [
            f"{name} ({path})"
            for name, path in sorted(self.paths.items())
            if not Path(path).exists()
        ]
        if missing:
            raise FileNotFoundError("missing input file: " + ", ".join(missing))

    def to_jsonable(self) -> dict:
        return {
            "command": self.command,
            "seed": self.seed,
            "language": self.language,
            "paths": {k: str(v) for k, v in sorted(self.paths.items())},
            "thresholds": dict(sorted(self.thresholds.items())),
        }

    def provenance(self) -> dict:
        return reporting.provenance(self.to_jsonable(), self.paths, self.seed)


def resolve_seed(value: int | None) -> int:
    if value is not None:
        return value
    env = os.environ.get("OPPO_SEED")
    if env is None:
        return 0
    try:
        return int(env)
    except ValueError:
        raise ValueError(f"OPPO_SEED must be an integer, got {env!r}") from None


def _out_path(args, name: str) -> Path:
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    return out_dir / name


def _report_path(args, default_name: str) -> Path:
    given = getattr(args, "report", None)
    if given:
        p = Path(given)
        return p if p.is_absolute() else Path(args.out_dir) / p
    return _out_path(args, default_name)


def _filter_language(messages: Sequence[Message], language: str) -> list[Message]:
    if language == "all":
        return list(messages)
    return [m for m in messages if m.lang.value == language]


def _load_messages(path, language: str) -> tuple[list[Message], dict[str, Message]]:
    messages = _filter_language(parse_corpus(path, "messages"), language)
    return messages, {m.id: m for m in messages}


# ---------------------------------------------------------------------------
# Subcommand handlers
# ---------------------------------------------------------------------------


def cmd_pipeline(args) -> int:
    config = RunConfig(
        command="pipeline",
        seed=resolve_seed(args.seed),
        language=args.language,
        paths={"messages": args.messages, "channel_stats": args.channel_stats},
        thresholds={
            "min_tokens": args.min_tokens,
            "max_link_ratio": args.max_link_ratio,
            "select": args.select if args.select is not None else -1,
        },
    )
    config.validate_paths()
    messages, _ = _load_messages(args.messages, args.language)
    stats = pipeline_mod.load_channel_stats(args.channel_stats)
    kept, dropped = pipeline_mod.filter_messages(
        messages, min_tokens=args.min_tokens, max_link_ratio=args.max_link_ratio
    )
    report: dict = {
        "provenance": config.provenance(),
        "input_count": len(messages),
        "kept_count": len(kept),
        "dropped": [
            {"id": d.message.id, "reason": d.reason.value} for d in dropped
        ],
        "drop_counts": dict(
            sorted(Counter(d.reason.value for d in dropped).items())
        ),
    }
    write_corpus(_out_path(args, "kept_messages.jsonl"), kept, "messages")
    if kept:
        scores = pipeline_mod.score_corpus(kept, stats)
        ranked = pipeline_mod.rank_and_select(kept, scores, len(kept))
        report["ranking"] = [
            {
                "id": m.id,
                "total": scores[m.id].total,
                "per_criterion": list(scores[m.id].per_criterion),
            }
            for m in ranked
        ]
        if args.select is not None:
            selected = ranked[: args.select]
            write_corpus(_out_path(args, "selected_messages.jsonl"), selected, "messages")
            report["selected_count"] = len(selected)
    reporting.write_report(_out_path(args, "pipeline_report.json"), report)
    if args.pretty:
        print(f"kept {len(kept)}/{len(messages)} messages; drops: {report['drop_counts']}")
    print(f"wrote {_out_path(args, 'pipeline_report.json')}")
    return EXIT_OK


def _proper_noun_entities(text: str, table: Mapping[str, str]) -> list[anonymizer.SensitiveEntity]:
    entities = []
    for surface in sorted(table, key=len, reverse=True):
        for m in re.finditer(re.escape(surface), text):
            ent = anonymizer.SensitiveEntity(
                anonymizer.EntityKind.PROPER_NOUN, m.start(), m.end(), surface
            )
            if all(
                ent.end <= e.start or ent.start >= e.end for e in entities
            ):
                entities.append(ent)
    return sorted(entities, key=lambda e: e.start)


def cmd_anon(args) -> int:
    paths = {"messages": args.messages}
    if args.proper_nouns:
        paths["proper_nouns"] = args.proper_nouns
    if args.annotations:
        paths["annotations"] = args.annotations
    config = RunConfig(
        command="anon",
        seed=resolve_seed(args.seed),
        language=args.language,
        paths=paths,
        thresholds={},
    )
    config.validate_paths()
    messages, by_id = _load_messages(args.messages, args.language)
    table: dict[str, str] = {}
    if args.proper_nouns:
        import json

        table = json.loads(Path(args.proper_nouns).read_text(encoding="utf-8"))
        if not isinstance(table, dict):
            raise ValueError(f"{args.proper_nouns}: expected a JSON object")
    out_messages = []
    offset_maps: dict[str, anonymizer.OffsetMap] = {}
    kind_counts: Counter = Counter()
    residuals = 0
    for msg in messages:
        extra = _proper_noun_entities(msg.text, table)
        result = anonymizer.anonymize(
            msg.text, args.salt, extra_entities=extra, proper_noun_replacements=table
        )
        out_messages.append(replace(msg, text=result.text))
        offset_maps[msg.id] = result.offset_map
        kind_counts.update(ent.kind.value for ent, _ in result.applied)
        residuals += len(anonymizer.residual_surfaces(result))
    write_corpus(_out_path(args, "anonymized_messages.jsonl"), out_messages, "messages")
    report = {
        "provenance": config.provenance(),
        "message_count": len(messages),
        "entity_counts": dict(sorted(kind_counts.items())),
        "residual_detections": residuals,
        "edits": {
            doc_id: [
                {"old_start": e.old_start, "old_end": e.old_end, "new_length": e.new_length}
                for e in om.edits
            ]
            for doc_id, om in sorted(offset_maps.items())
        },
    }
    if args.annotations:
        records = parse_corpus(args.annotations, "annotations", documents=by_id)
        remapped = []
        for rec in records:
            om = offset_maps.get(rec.doc_id)
            if om is None:
                raise CorpusError(
                    f"annotation for unknown or filtered document {rec.doc_id!r}"
                )
            remapped.append(
                replace(rec, spans=frozenset(om.map_span(s) for s in rec.spans))
            )
        write_corpus(_out_path(args, "remapped_annotations.jsonl"), remapped, "annotations")
    reporting.write_report(_out_path(args, "anonymization_report.json"), report)
    if args.pretty:
        print(f"rewrote {sum(kind_counts.values())} entities; residuals: {residuals}")
    print(f"wrote {_out_path(args, 'anonymization_report.json')}")
    return EXIT_OK


def cmd_gold(args) -> int:
    paths = {f"annotations_{i}": p for i, p in enumerate(args.annotations)}
    if args.messages:
        paths["messages"] = args.messages
    config = RunConfig(
        command="gold",
        seed=resolve_seed(args.seed),
        language=args.language,
        paths=paths,
        thresholds={
            "annotators": args.annotators,
            "conflict_overlap": args.conflict_overlap,
        },
    )
    config.validate_paths()
    documents = None
    if args.messages:
        _, documents = _load_messages(args.messages, args.language)
    records = []
    for p in args.annotations:
        records.extend(parse_corpus(p, "annotations", documents=documents))
    build = gold_mod.build_gold(
        records, annotators=args.annotators, conflict_overlap=args.conflict_overlap
    )
    write_corpus(_out_path(args, "gold.jsonl"), build.documents, "gold")
    stats = gold_mod.span_statistics(build.documents)
    rejections = []
    for doc_id in sorted(build.merges):
        merged = build.merges[doc_id]
        side_names = dict(zip(("a", "b"), build.span_annotators[doc_id]))
        for rej in merged.rejections:
            rejections.append(
                {
                    "doc_id": doc_id,
                    "annotator": side_names[rej.side],
                    "category": rej.span.category.value,
                    "start": rej.span.start,
                    "end": rej.span.end,
                    "reason": rej.reason.value,
                }
            )
    report = {
        "provenance": config.provenance(),
        "document_count": len(build.documents),
        "votes": {
            o.doc_id: o.klass.value for o in build.outcomes
        },
        "adjudication_queue": list(build.adjudication_queue),
        "excluded_neither": list(build.excluded_neither),
        "rejections": rejections,
        "conflict_adjacent": {
            doc_id: [
                {"category": s.category.value, "start": s.start, "end": s.end}
                for s in sorted(m.conflict_adjacent, key=lambda s: (s.start, s.end))
            ]
            for doc_id, m in sorted(build.merges.items())
            if m.conflict_adjacent
        },
        "span_statistics": stats.to_report(),
    }
    reporting.write_report(_out_path(args, "gold_report.json"), report)
    if args.pretty:
        print(
            f"gold documents: {len(build.documents)}; unresolved: "
            f"{len(build.adjudication_queue)}; excluded: {len(build.excluded_neither)}"
        )
    print(f"wrote {_out_path(args, 'gold_report.json')}")
    return EXIT_OK


def _annotator_labels(records) -> dict[str, dict[str, str]]:
    out: dict[str, dict[str, str]] = {}
    for rec in records:
        out.setdefault(rec.annotator, {})[rec.doc_id] = gold_mod.vote_label(rec).value
    return out


def _majority_labels(records) -> dict[str, str]:
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


def cmd_iaa(args) -> int:
    paths = {"annotations": args.annotations}
    if args.messages:
        paths["messages"] = args.messages
    config = RunConfig(
        command="iaa",
        seed=resolve_seed(args.seed),
        language=args.language,
        paths=paths,
        thresholds={
            "resamples": args.resamples,
            "batch_size": args.batch_size if args.batch_size else 0,
        },
    )
    config.validate_paths()
    documents = None
    if args.messages:
        _, documents = _load_messages(args.messages, args.language)
    records = parse_corpus(args.annotations, "annotations", documents=documents)
    result: dict = {"metric": args.metric}
    if args.metric in ("alpha", "observed"):
        matrix = agreement.ReliabilityMatrix.from_records(records)
        result["n_items"] = len(matrix.items)
        result["n_annotators"] = len(matrix.annotators)
        if args.metric == "alpha":
            result["alpha"] = agreement.krippendorff_alpha(matrix)
        else:
            result["observed_agreement"] = agreement.observed_agreement(matrix)
    elif args.metric == "gamma":
        if documents is None:
            raise ValueError("gamma needs --messages to know document lengths")
        by_doc: dict[str, list] = {}
        for rec in records:
            by_doc.setdefault(rec.doc_id, []).append(rec)
        continua = []
        for doc_id in sorted(by_doc):
            recs = by_doc[doc_id]
            if len(recs) < 2:
                continue
            first, second = gold_mod.span_annotator_pair(recs)
            length = len(documents[doc_id].text)
            if length == 0:
                continue
            continua.append(
                agreement.Continuum(
                    doc_id=doc_id,
                    length=length,
                    units={
                        first.annotator: tuple(first.spans),
                        second.annotator: tuple(second.spans),
                    },
                )
            )
        if args.batch_size:
            batched = agreement.gamma_batches(
                continua,
                batch_size=args.batch_size,
                resamples=args.resamples,
                seed=config.seed,
                jobs=args.jobs,
            )
            result["gamma_batches"] = list(batched.batches)
            result["gamma_mean"] = batched.mean
        else:
            result["gamma"] = agreement.gamma_agreement(
                continua, resamples=args.resamples, seed=config.seed, jobs=args.jobs
            )
        result["n_continua"] = len(continua)
        result["resamples"] = args.resamples
    else:  # pairwise-f1
        labels = _annotator_labels(records)
        mode = agreement.PairwiseMode(args.mode)
        gold_labels = (
            _majority_labels(records)
            if mode is agreement.PairwiseMode.HUMAN_VS_GOLD
            else None
        )
        f1 = agreement.pairwise_f1_agreement(
            labels, mode=mode, gold=gold_labels, classes=("CONSPIRACY", "CRITICAL")
        )
        result["mode"] = mode.value
        result["f1"] = {k: v for k, v in f1.items()}
    report = {"provenance": config.provenance(), "result": result}
    reporting.write_report(_report_path(args, "iaa_report.json"), report)
    if args.pretty:
        print({k: v for k, v in result.items() if k != "metric"})
    print(f"wrote {_report_path(args, 'iaa_report.json')}")
    return EXIT_OK


def _prf_jsonable(prf: evaluation.PRF) -> dict:
    return {"precision": prf.precision, "recall": prf.recall, "f1": prf.f1}


def cmd_eval(args) -> int:
    paths = {"pred": args.pred, "gold": args.gold}
    if args.messages:
        paths["messages"] = args.messages
    config = RunConfig(
        command=f"eval-{args.mode}",
        seed=resolve_seed(args.seed),
        language=args.language,
        paths=paths,
        thresholds={},
    )
    config.validate_paths()
    documents = None
    if args.messages:
        _, documents = _load_messages(args.messages, args.language)
    gold_docs = {
        d.doc_id: d for d in parse_corpus(args.gold, "gold", documents=documents)
    }
    preds = {
        p.doc_id: p for p in parse_corpus(args.pred, "predictions", documents=documents)
    }
    result: dict = {"mode": args.mode}
    if args.mode == "binary":
        res = evaluation.binary_eval(preds, gold_docs)
        result["per_class"] = {
            k.value: _prf_jsonable(v) for k, v in res.per_class.items()
        }
        result["accuracy"] = res.accuracy
        result["confusion"] = {
            "classes": list(res.confusion.classes),
            "rows_predicted": [list(row) for row in res.confusion.counts],
        }
    elif args.mode == "spans":
        pred_spans = {}
        for doc_id, p in preds.items():
            if p.spans is None:
                raise CorpusError(f"prediction for {doc_id!r} carries no spans")
            pred_spans[doc_id] = p.spans
        texts = None
        unit = evaluation.Unit(args.unit)
        if unit is evaluation.Unit.TOKEN:
            if documents is None:
                raise ValueError("token-unit span F1 needs --messages")
            texts = {doc_id: documents[doc_id].text for doc_id in gold_docs}
        res = evaluation.span_f1_corpus(
            pred_spans, {d: g.spans for d, g in gold_docs.items()}, unit=unit, texts=texts
        )
        result["unit"] = unit.value
        result["per_category"] = {
            c.value: _prf_jsonable(v) for c, v in res.per_category.items()
        }
        result["macro"] = _prf_jsonable(res.macro)
    elif args.mode == "categories":
        per_cat = evaluation.category_presence_eval(preds, gold_docs)
        result["per_category"] = {
            c.value: _prf_jsonable(v) for c, v in per_cat.items()
        }
    else:  # error-crosstab
        row_cat = Category(args.row_category)
        col_cat = Category(args.col_category)
        rows = evaluation.outcome_variables(preds, gold_docs, row_cat)
        cols = evaluation.outcome_variables(preds, gold_docs, col_cat)
        res = evaluation.crosstab_residuals(rows, cols)
        result["row_category"] = row_cat.value
        result["col_category"] = col_cat.value
        result["outcomes"] = [o.value for o in res.outcomes]
        result["table"] = [list(r) for r in res.table]
        result["chi2"] = res.chi2.to_report().to_jsonable()
    report = {"provenance": config.provenance(), "result": result}
    reporting.write_report(_report_path(args, "eval_report.json"), report)
    if args.pretty:
        print(result)
    print(f"wrote {_report_path(args, 'eval_report.json')}")
    return EXIT_OK


def cmd_analyze(args) -> int:
    paths = {
        "gold": args.gold,
        "messages": args.messages,
        "anger_lexicon": args.anger_lexicon,
        "violence_lexicon": args.violence_lexicon,
    }
    if args.lemma_map:
        paths["lemma_map"] = args.lemma_map
    config = RunConfig(
        command="analyze",
        seed=resolve_seed(args.seed),
        language=args.language,
        paths=paths,
        thresholds={"alpha": args.alpha},
    )
    config.validate_paths()
    messages, by_id = _load_messages(args.messages, args.language)
    # the gold file may cover more documents than the language slice; keep
    # the intersection and offset-check only what we keep
    gold_docs = []
    for d in parse_corpus(args.gold, "gold"):
        msg = by_id.get(d.doc_id)
        if msg is None:
            continue
        for span in sorted(d.spans, key=lambda s: (s.start, s.end)):
            if span.end > len(msg.text):
                raise CorpusError(
                    f"{args.gold}: span [{span.start},{span.end}) exceeds "
                    f"text of {d.doc_id!r}"
                )
        gold_docs.append(d)
    anger = analysis.parse_lexicon(args.anger_lexicon, "anger")
    violence = analysis.parse_lexicon(args.violence_lexicon, "violence")
    lemma_map = analysis.parse_lemma_map(args.lemma_map) if args.lemma_map else None
    scores = analysis.score_corpus(by_id, gold_docs, anger, violence, lemma_map)
    suite_config = analysis.SuiteConfig(alpha=args.alpha)
    report: dict = {
        "provenance": config.provenance(),
        "combined": analysis.run_hypothesis_suite(scores, suite_config),
    }
    langs = sorted({by_id[s.doc_id].lang.value for s in scores})
    if len(langs) > 1:
        by_language = {}
        for lang in langs:
            subset = [s for s in scores if by_id[s.doc_id].lang.value == lang]
            try:
                by_language[lang] = analysis.run_hypothesis_suite(subset, suite_config)
            except DegenerateStatistic as exc:
                by_language[lang] = {"degenerate": str(exc)}
        report["by_language"] = by_language
    reporting.write_report(_report_path(args, "analysis_report.json"), report)
    if args.pretty:
        combined = report["combined"]
        for key in ("h1_anger_by_class", "h2_violence_by_class", "h3_igc_by_class"):
            print(f"{key}: p={combined[key]['p']:.4g}")
    print(f"wrote {_report_path(args, 'analysis_report.json')}")
    return EXIT_OK


def cmd_validate(args) -> int:
    inputs = {
        name: getattr(args, name)
        for name in ("messages", "annotations", "gold", "predictions")
        if getattr(args, name)
    }
    if not inputs:
        raise ValueError(
            "nothing to validate: pass --messages, --annotations, --gold, or --predictions"
        )
    config = RunConfig(
        command="validate",
        seed=resolve_seed(args.seed),
        language=args.language,
        paths=inputs,
        thresholds={},
    )
    config.validate_paths()
    documents = None
    summary = {}
    if "messages" in inputs:
        messages, documents = _load_messages(inputs["messages"], args.language)
        summary["messages"] = len(messages)
    from .model import whitespace_only_spans

    warnings: list[str] = []
    for name in ("annotations", "gold", "predictions"):
        if name not in inputs:
            continue
        records = parse_corpus(inputs[name], name, documents=documents)
        summary[name] = len(records)
        if documents is not None and name in ("annotations", "gold"):
            for doc_id, span in whitespace_only_spans(records, documents):
                warnings.append(
                    f"{name}: whitespace-only span [{span.start},{span.end}) in {doc_id}"
                )
    for name, count in summary.items():
        print(f"{name}: {count} records OK")
    for w in warnings:
        print(f"warning: {w}")
    if args.report:
        reporting.write_report(
            _report_path(args, "validation_report.json"),
            {
                "provenance": config.provenance(),
                "counts": summary,
                "warnings": warnings,
            },
        )
    return EXIT_OK


# ---------------------------------------------------------------------------
# Parser assembly
# ---------------------------------------------------------------------------


def build_parser() -> _Parser:
    parser = _Parser(prog="oppo", description=__doc__)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help="RNG seed (or env OPPO_SEED)")
    common.add_argument("--out-dir", default="oppo_out", help="output directory")
    common.add_argument("--jobs", type=int, default=os.cpu_count() or 1)
    common.add_argument("--language", choices=("EN", "ES", "all"), default="all")
    common.add_argument("--pretty", action="store_true", help="print a human summary")

    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("pipeline", parents=[common], help="filter, score, and rank messages")
    p.add_argument("--messages", required=True)
    p.add_argument("--channel-stats", required=True)
    p.add_argument("--min-tokens", type=int, default=pipeline_mod.DEFAULT_MIN_TOKENS)
    p.add_argument("--max-link-ratio", type=float, default=0.5)
    p.add_argument("--select", type=int, default=None, help="also write the top-k messages")
    p.set_defaults(handler=cmd_pipeline)

    p = sub.add_parser("anon", parents=[common], help="pseudonymize sensitive entities")
    p.add_argument("--messages", required=True)
    p.add_argument("--salt", required=True, help="keyed-hash salt for pseudonyms")
    p.add_argument("--proper-nouns", default=None, help="JSON map surface -> replacement")
    p.add_argument("--annotations", default=None, help="annotation file to offset-remap")
    p.set_defaults(handler=cmd_anon)

    p = sub.add_parser("gold", parents=[common], help="build the gold standard")
    p.add_argument("--annotations", nargs="+", required=True)
    p.add_argument("--messages", default=None)
    p.add_argument("--annotators", type=int, default=gold_mod.DEFAULT_ANNOTATORS)
    p.add_argument("--conflict-overlap", type=int, default=gold_mod.DEFAULT_CONFLICT_OVERLAP)
    p.set_defaults(handler=cmd_gold)

    p = sub.add_parser("iaa", parents=[common], help="inter-annotator agreement")
    p.add_argument("--metric", required=True, choices=("alpha", "observed", "gamma", "pairwise-f1"))
    p.add_argument("--annotations", required=True)
    p.add_argument("--messages", default=None)
    p.add_argument("--resamples", type=int, default=agreement.DEFAULT_RESAMPLES)
    p.add_argument("--batch-size", type=int, default=None)
    p.add_argument("--mode", choices=("human_vs_human", "human_vs_gold"), default="human_vs_human")
    p.add_argument("--report", default=None)
    p.set_defaults(handler=cmd_iaa)

    p = sub.add_parser("eval", parents=[common], help="score predictions against gold")
    p.add_argument("mode", choices=("binary", "spans", "categories", "error-crosstab"))
    p.add_argument("--pred", required=True)
    p.add_argument("--gold", required=True)
    p.add_argument("--messages", default=None)
    p.add_argument("--unit", choices=("char", "token"), default="char")
    p.add_argument("--row-category", default="F", help="crosstab row category letter")
    p.add_argument("--col-category", default="A", help="crosstab column category letter")
    p.add_argument("--report", default=None)
    p.set_defaults(handler=cmd_eval)

    p = sub.add_parser("analyze", parents=[common], help="lexicon scores and hypothesis tests")
    p.add_argument("--gold", required=True)
    p.add_argument("--messages", required=True)
    p.add_argument("--anger-lexicon", required=True)
    p.add_argument("--violence-lexicon", required=True)
    p.add_argument("--lemma-map", default=None)
    p.add_argument("--alpha", type=float, default=0.05, help="significance level")
    p.add_argument("--report", default=None)
    p.set_defaults(handler=cmd_analyze)

    p = sub.add_parser("validate", parents=[common], help="check corpus files")
    p.add_argument("--messages", default=None)
    p.add_argument("--annotations", default=None)
    p.add_argument("--gold", default=None)
    p.add_argument("--predictions", default=None)
    p.add_argument("--report", default=None, help="also write a validation report")
    p.set_defaults(handler=cmd_validate)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        print(exc.usage, file=sys.stderr, end="")
        print(f"oppo: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.handler(args)
    except DegenerateStatistic as exc:
        print(f"degenerate statistic: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
