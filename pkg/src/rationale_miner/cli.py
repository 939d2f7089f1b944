"""Command-line interface.

Subcommands: ingest, train, label, eval, graph, infer, query, report, viz,
pipeline.  Global flags --seed, --out and --config apply everywhere; all
JSON output uses sorted keys.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

from . import eval as evaluation
from . import ingest as ingest_mod
from .annotate import Label, load_corpus
from .features import fit_tfidf
from .kgraph import KnowledgeGraph, apply_inference, build_graph, check_consistency
from .models import Dataset, TRAINERS
from .pipeline import (
    GOLD_LABELS,
    TRAINED_MODEL,
    PipelineConfig,
    PipelineError,
    SentenceLabeller,
    clean_commits_jsonl,
    ingest_commits,
    labels_from_predictions_jsonl,
    predict_label_map,
    predictions_jsonl,
    run_pipeline,
    train_labeller,
)
from .query import builtin_rationale_report, evaluate, parse_query
from .viz import export_viz_json

FAMILIES = sorted(TRAINERS)


def _write_json(path: Path, payload) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(payload, sort_keys=True, indent=2) + "\n", encoding="utf-8")


def _write_text(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")


def _load_clean_commits(path: Path) -> list[ingest_mod.CleanCommit]:
    commits = []
    for line in path.read_text(encoding="utf-8").splitlines():
        if line.strip():
            commits.append(ingest_mod.CleanCommit.from_record(json.loads(line)))
    return commits


def _load_label_map(path: Path):
    text = path.read_text(encoding="utf-8")
    return labels_from_predictions_jsonl(text)


def _hyper_from_args(args) -> dict:
    hyper = {}
    if args.hyper:
        for item in args.hyper:
            key, _, value = item.partition("=")
            if not _:
                raise SystemExit(f"bad --set {item!r}, expected key=value")
            try:
                hyper[key] = json.loads(value)
            except json.JSONDecodeError:
                hyper[key] = value
    return hyper


def cmd_ingest(args) -> int:
    commits = ingest_commits(Path(args.input).read_text(encoding="utf-8"))
    _write_text(Path(args.out) / "clean_commits.jsonl", clean_commits_jsonl(commits))
    print(f"wrote {len(commits)} clean commits to {Path(args.out) / 'clean_commits.jsonl'}")
    return 0


def cmd_train(args) -> int:
    records = load_corpus(args.corpus)
    labeller = train_labeller(
        records, family=args.family, hyper=_hyper_from_args(args), seed=args.seed
    )
    out = Path(args.out) / "labeller.json"
    out.parent.mkdir(parents=True, exist_ok=True)
    labeller.save(out)
    print(f"wrote {out}")
    return 0


def cmd_label(args) -> int:
    commits = _load_clean_commits(Path(args.input))
    labeller = SentenceLabeller.load(args.model)
    label_map = predict_label_map(commits, labeller)
    _write_text(Path(args.out) / "predictions.jsonl", predictions_jsonl(label_map))
    print(f"wrote {len(label_map)} predictions to {Path(args.out) / 'predictions.jsonl'}")
    return 0


def _binary_protocol_rows(records, args) -> list[dict]:
    """Single-label pools, optional under-sampling, one CV per target label."""
    single = [r for r in records if len(r.labels) == 1 and Label.INAPPLICABLE not in r.labels]
    tfidf = fit_tfidf([r.text for r in single])
    rows = []
    pool = Dataset(
        X=[tfidf.transform(r.text) for r in single],
        y=[next(iter(r.labels)) for r in single],
    )
    if args.undersample:
        targets = {}
        for item in args.undersample.split(","):
            name, _, count = item.partition("=")
            targets[Label(name)] = int(count)
        pool = evaluation.undersample(pool, targets, seed=args.seed)
    trainer_fn = TRAINERS[args.family]
    hyper = _hyper_from_args(args)
    for target in (Label.DECISION, Label.RATIONALE, Label.SUPPORTING_FACT):
        binary = Dataset(X=pool.X, y=[1 if y == target else 0 for y in pool.y])

        def trainer(d, _fn=trainer_fn):
            if args.family == "knn":
                return _fn(d, **hyper)
            return _fn(d, seed=args.seed, **hyper)

        report = evaluation.kfold_cv(binary, k=args.folds, trainer=trainer, seed=args.seed)
        rows.extend(evaluation.report_rows(args.family, report, label=target.value))
    return rows


def _multilabel_protocol_rows(records, args) -> list[dict]:
    usable = [r for r in records if Label.INAPPLICABLE not in r.labels]
    tfidf = fit_tfidf([r.text for r in usable])
    dataset = Dataset(
        X=[tfidf.transform(r.text) for r in usable],
        Y=[
            tuple(1 if l in r.labels else 0 for l in (Label.DECISION, Label.RATIONALE, Label.SUPPORTING_FACT))
            for r in usable
        ],
    )
    from .models import train_multilabel

    hyper = _hyper_from_args(args)

    def trainer(d):
        return train_multilabel(d, family=args.family, hyper=hyper, seed=args.seed)

    if args.protocol == "cv":
        report = evaluation.kfold_cv(dataset, k=args.folds, trainer=trainer, seed=args.seed)
    else:
        train, test, _rest = evaluation.train_test_split(dataset, seed=args.seed)
        model = trainer(train)
        y_true = [test.Y[i] for i in range(test.n)]
        y_pred = [model.predict_matrix_row(test.X[i]) for i in range(test.n)]
        report = evaluation.micro_metrics(y_true, y_pred)
    return evaluation.report_rows(args.family, report)


def cmd_eval(args) -> int:
    records = load_corpus(args.corpus)
    if args.task == "binary":
        rows = _binary_protocol_rows(records, args)
    else:
        rows = _multilabel_protocol_rows(records, args)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = out_dir / "metrics.csv"
    with open(csv_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(
            fh, fieldnames=["model", "label", "accuracy", "precision", "recall", "f1"]
        )
        writer.writeheader()
        writer.writerows(rows)
    _write_json(out_dir / "metrics.json", rows)
    print(f"wrote {csv_path}")
    return 0


def cmd_graph(args) -> int:
    commits = _load_clean_commits(Path(args.input))
    label_map = _load_label_map(Path(args.labels))
    graph = build_graph(commits, label_map)
    _write_text(Path(args.out) / "graph.json", graph.to_json())
    print(f"wrote {Path(args.out) / 'graph.json'} ({graph.size()} assertions)")
    return 0


def cmd_infer(args) -> int:
    graph = KnowledgeGraph.load(args.graph)
    inferred = apply_inference(graph)
    violations = check_consistency(inferred)
    _write_text(Path(args.out) / "graph_inferred.json", inferred.to_json())
    added = inferred.size() - graph.size()
    print(f"wrote {Path(args.out) / 'graph_inferred.json'} (+{added} inferred assertions)")
    for v in violations:
        print(f"consistency: {v.kind}: {v.message}", file=sys.stderr)
    return 0


def _format_rows(rows: list[dict], fmt: str) -> str:
    if fmt == "json":
        return json.dumps(rows, sort_keys=True, indent=2) + "\n"
    if not rows:
        return "(no rows)\n"
    columns = sorted({key for row in rows for key in row})
    widths = {
        c: max(len(c), *(len(str(row.get(c, ""))) for row in rows)) for c in columns
    }
    lines = ["  ".join(c.ljust(widths[c]) for c in columns)]
    for row in rows:
        lines.append("  ".join(str(row.get(c, "")).ljust(widths[c]) for c in columns))
    return "\n".join(lines) + "\n"


def cmd_query(args) -> int:
    graph = KnowledgeGraph.load(args.graph)
    if not args.query_file and not args.query:
        raise SystemExit("query needs --query or --query-file")
    text = Path(args.query_file).read_text(encoding="utf-8") if args.query_file else args.query
    rows = evaluate(parse_query(text), graph)
    sys.stdout.write(_format_rows(rows, args.format))
    return 0


def cmd_report(args) -> int:
    graph = apply_inference(KnowledgeGraph.load(args.graph))  # idempotent if already inferred
    rows = builtin_rationale_report(graph)
    _write_json(Path(args.out) / "report.json", rows)
    sys.stdout.write(_format_rows(rows, args.format))
    return 0


def cmd_viz(args) -> int:
    graph = KnowledgeGraph.load(args.graph)
    _write_json(Path(args.out) / "viz.json", export_viz_json(graph))
    print(f"wrote {Path(args.out) / 'viz.json'}")
    return 0


def cmd_pipeline(args) -> int:
    if args.config:
        cfg = PipelineConfig.from_json(args.config)
        if args.out != "out":
            cfg.out_dir = Path(args.out)
        if args.seed:
            cfg.seed = args.seed
    else:
        if not args.input:
            raise SystemExit("pipeline needs --config or --input")
        cfg = PipelineConfig(
            input_path=args.input,
            mode=args.mode,
            labels_path=args.labels,
            model_path=args.model,
            seed=args.seed,
            out_dir=Path(args.out),
        )
    written = run_pipeline(cfg)
    for name in sorted(written):
        print(f"wrote {written[name]}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rationale-miner",
        description="Extract and analyze rationale in git commit messages.",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="random seed")
    common.add_argument("--out", default="out", help="output directory")
    common.add_argument("--config", help="pipeline config JSON")

    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", parents=[common], help="parse and clean a git log")
    p.add_argument("--input", required=True)
    p.set_defaults(fn=cmd_ingest)

    p = sub.add_parser("train", parents=[common], help="train a sentence labeller")
    p.add_argument("--corpus", required=True, help="gold corpus JSONL")
    p.add_argument("--family", choices=FAMILIES, default="gbt")
    p.add_argument("--set", dest="hyper", action="append", help="hyper-parameter key=value")
    p.set_defaults(fn=cmd_train)

    p = sub.add_parser("label", parents=[common], help="apply a trained labeller")
    p.add_argument("--input", required=True, help="clean commits JSONL")
    p.add_argument("--model", required=True, help="labeller bundle JSON")
    p.set_defaults(fn=cmd_label)

    p = sub.add_parser("eval", parents=[common], help="run the evaluation protocol")
    p.add_argument("--corpus", required=True)
    p.add_argument("--family", choices=FAMILIES, default="gbt")
    p.add_argument("--task", choices=["binary", "multilabel"], default="multilabel")
    p.add_argument("--protocol", choices=["cv", "split"], default="cv")
    p.add_argument("--folds", type=int, default=10)
    p.add_argument("--undersample", help="e.g. Decision=100,Rationale=100")
    p.add_argument("--set", dest="hyper", action="append", help="hyper-parameter key=value")
    p.set_defaults(fn=cmd_eval)

    p = sub.add_parser("graph", parents=[common], help="build the knowledge graph")
    p.add_argument("--input", required=True, help="clean commits JSONL")
    p.add_argument("--labels", required=True, help="labels JSONL (gold or predicted)")
    p.set_defaults(fn=cmd_graph)

    p = sub.add_parser("infer", parents=[common], help="run rule inference to fixpoint")
    p.add_argument("--graph", required=True)
    p.set_defaults(fn=cmd_infer)

    p = sub.add_parser("query", parents=[common], help="run a SELECT query")
    p.add_argument("--graph", required=True)
    p.add_argument("--query", help="inline query text")
    p.add_argument("--query-file", help="query file")
    p.add_argument("--format", choices=["json", "table"], default="json")
    p.set_defaults(fn=cmd_query)

    p = sub.add_parser("report", parents=[common], help="run the bundled rationale report")
    p.add_argument("--graph", required=True)
    p.add_argument("--format", choices=["json", "table"], default="table")
    p.set_defaults(fn=cmd_report)

    p = sub.add_parser("viz", parents=[common], help="export the viewer tree JSON")
    p.add_argument("--graph", required=True, help="post-inference graph JSON")
    p.set_defaults(fn=cmd_viz)

    p = sub.add_parser("pipeline", parents=[common], help="run all stages end to end")
    p.add_argument("--input", help="git log file")
    p.add_argument("--mode", choices=[GOLD_LABELS, TRAINED_MODEL], default=GOLD_LABELS)
    p.add_argument("--labels", help="gold corpus JSONL")
    p.add_argument("--model", help="labeller bundle JSON")
    p.set_defaults(fn=cmd_pipeline)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except PipelineError as exc:
        print(json.dumps({"error": str(exc), "stage": exc.stage}), file=sys.stderr)
        return 1
    except (ValueError, OSError, LookupError) as exc:
        print(json.dumps({"error": str(exc), "stage": args.command}), file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
