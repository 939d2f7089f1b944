"""End-to-end orchestration: ingest -> label -> graph -> infer -> report -> viz.

All artifacts are JSON with sorted keys so identical inputs and seed yield
byte-identical outputs.  Nothing is written until every stage has finished;
a failing stage therefore leaves no partial artifacts behind.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from . import ingest
from .annotate import Label, SentenceRecord, load_corpus
from .features import TfIdfModel, fit_tfidf
from .kgraph import apply_inference, build_graph
from .models import Dataset, MultiLabelModel, model_from_dict, train_multilabel
from .query import builtin_rationale_report
from .viz import export_viz_json

GOLD_LABELS = "gold-labels"
TRAINED_MODEL = "trained-model"

ARTIFACTS = {
    "clean_commits": "clean_commits.jsonl",
    "predictions": "predictions.jsonl",
    "graph": "graph.json",
    "graph_inferred": "graph_inferred.json",
    "report": "report.json",
    "viz": "viz.json",
}


class PipelineError(RuntimeError):
    def __init__(self, stage: str, message: str):
        super().__init__(message)
        self.stage = stage


@dataclass
class PipelineConfig:
    input_path: Path
    mode: str = GOLD_LABELS
    labels_path: Path | None = None  # gold corpus JSONL
    model_path: Path | None = None  # serialized labeller bundle
    seed: int = 0
    out_dir: Path = Path("out")

    def __post_init__(self):
        self.input_path = Path(self.input_path)
        self.out_dir = Path(self.out_dir)
        if self.labels_path is not None:
            self.labels_path = Path(self.labels_path)
        if self.model_path is not None:
            self.model_path = Path(self.model_path)
        if self.mode == GOLD_LABELS:
            if self.labels_path is None:
                raise ValueError("gold-labels mode needs a labels corpus file")
        elif self.mode == TRAINED_MODEL:
            if self.model_path is None:
                raise ValueError("trained-model mode needs a serialized model")
        else:
            raise ValueError(f"unknown mode {self.mode!r}")

    @classmethod
    def from_json(cls, path: str | Path) -> "PipelineConfig":
        data = json.loads(Path(path).read_text(encoding="utf-8"))
        return cls(
            input_path=data["input"],
            mode=data.get("mode", GOLD_LABELS),
            labels_path=data.get("labels"),
            model_path=data.get("model"),
            seed=int(data.get("seed", 0)),
            out_dir=data.get("out", "out"),
        )


@dataclass
class SentenceLabeller:
    """Serialized bundle: fitted TF-IDF vectorizer + multi-label classifier."""

    tfidf: TfIdfModel
    classifier: MultiLabelModel

    def predict(self, text: str) -> frozenset[Label]:
        return self.classifier.predict_labels(self.tfidf.transform(text))

    def to_dict(self) -> dict:
        return {
            "kind": "sentence-labeller",
            "version": 1,
            "tfidf": self.tfidf.to_dict(),
            "classifier": self.classifier.to_dict(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "SentenceLabeller":
        if data.get("kind") != "sentence-labeller":
            raise ValueError("not a sentence-labeller bundle")
        return cls(
            tfidf=TfIdfModel.from_dict(data["tfidf"]),
            classifier=model_from_dict(data["classifier"]),
        )

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), sort_keys=True), encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> "SentenceLabeller":
        return cls.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


def train_labeller(
    records: list[SentenceRecord],
    family: str = "gbt",
    hyper: dict | None = None,
    seed: int = 0,
) -> SentenceLabeller:
    """Fit vectorizer and binary-relevance classifier on a gold corpus.

    No-consensus rows must already be gone; Inapplicable rows are dropped
    here because they mark pre-processing noise, not classes.
    """
    usable = [r for r in records if Label.INAPPLICABLE not in r.labels]
    if not usable:
        raise ValueError("no trainable sentences in corpus")
    tfidf = fit_tfidf([r.text for r in usable])
    dataset = Dataset(
        X=[tfidf.transform(r.text) for r in usable],
        Y=[
            tuple(
                1 if label in r.labels else 0
                for label in (Label.DECISION, Label.RATIONALE, Label.SUPPORTING_FACT)
            )
            for r in usable
        ],
    )
    classifier = train_multilabel(dataset, family=family, hyper=hyper, seed=seed)
    return SentenceLabeller(tfidf=tfidf, classifier=classifier)


def ingest_commits(log_text: str) -> list[ingest.CleanCommit]:
    cleaned = []
    for raw in ingest.parse_git_log(log_text):
        commit = ingest.preprocess(raw)
        if commit is not None:
            cleaned.append(commit)
    return cleaned


def clean_commits_jsonl(commits: list[ingest.CleanCommit]) -> str:
    return "".join(json.dumps(c.to_record(), sort_keys=True) + "\n" for c in commits)


def gold_label_map(records: list[SentenceRecord]) -> dict[tuple[str, int], frozenset[Label]]:
    return {(r.hash, r.index): r.labels for r in records}


def predict_label_map(
    commits: list[ingest.CleanCommit], labeller: SentenceLabeller
) -> dict[tuple[str, int], frozenset[Label]]:
    out = {}
    for commit in commits:
        for sentence in commit.sentences:
            out[(commit.hash, sentence.index)] = labeller.predict(sentence.text)
    return out


def predictions_jsonl(label_map: dict[tuple[str, int], frozenset[Label]]) -> str:
    lines = []
    for (commit_hash, index) in sorted(label_map):
        labels = sorted(label.value for label in label_map[(commit_hash, index)])
        lines.append(
            json.dumps({"hash": commit_hash, "index": index, "labels": labels}, sort_keys=True)
        )
    return "".join(line + "\n" for line in lines)


def run_pipeline(cfg: PipelineConfig) -> dict[str, Path]:
    """Run every stage and write the artifact set into cfg.out_dir.

    Returns artifact name -> path.  Raises PipelineError naming the failed
    stage; in that case nothing is written.
    """
    artifacts: dict[str, str] = {}

    def stage(name: str, fn):
        try:
            return fn()
        except Exception as exc:
            raise PipelineError(name, str(exc)) from exc

    log_text = stage(
        "read-input", lambda: Path(cfg.input_path).read_text(encoding="utf-8")
    )
    commits = stage("ingest", lambda: ingest_commits(log_text))
    artifacts["clean_commits"] = clean_commits_jsonl(commits)

    if cfg.mode == GOLD_LABELS:
        records = stage("load-labels", lambda: load_corpus(cfg.labels_path))
        label_map = gold_label_map(records)
    else:
        labeller = stage("load-model", lambda: SentenceLabeller.load(cfg.model_path))
        label_map = stage("label", lambda: predict_label_map(commits, labeller))
        artifacts["predictions"] = predictions_jsonl(label_map)

    graph = stage("graph", lambda: build_graph(commits, label_map))
    artifacts["graph"] = graph.to_json()
    inferred = stage("infer", lambda: apply_inference(graph))
    artifacts["graph_inferred"] = inferred.to_json()
    report = stage("report", lambda: builtin_rationale_report(inferred))
    artifacts["report"] = json.dumps(report, sort_keys=True, indent=2) + "\n"
    artifacts["viz"] = (
        json.dumps(stage("viz", lambda: export_viz_json(inferred)), sort_keys=True, indent=2)
        + "\n"
    )

    cfg.out_dir.mkdir(parents=True, exist_ok=True)
    written: dict[str, Path] = {}
    try:
        for name, content in artifacts.items():
            path = cfg.out_dir / ARTIFACTS[name]
            path.write_text(content, encoding="utf-8")
            written[name] = path
    except OSError as exc:
        for path in written.values():
            path.unlink(missing_ok=True)
        raise PipelineError("write-artifacts", str(exc)) from exc
    return written


def labels_from_predictions_jsonl(text: str) -> dict[tuple[str, int], frozenset[Label]]:
    # predicted sets may legitimately be empty, so no LabelSet validation here
    out = {}
    for line in text.splitlines():
        if not line.strip():
            continue
        obj = json.loads(line)
        out[(obj["hash"], int(obj["index"]))] = frozenset(Label(name) for name in obj["labels"])
    return out
