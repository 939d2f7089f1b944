"""Commit-message rationale mining: pre-processing, sentence classification,
decision/rationale knowledge graph, query and reporting."""

__version__ = "0.1.0"

from .annotate import CLASSIFICATION_LABELS, Label  # noqa: F401
from .ingest import CleanCommit, RawCommit, parse_git_log, preprocess  # noqa: F401
from .kgraph import KnowledgeGraph, apply_inference, build_graph  # noqa: F401
from .pipeline import PipelineConfig, run_pipeline  # noqa: F401
from .query import builtin_rationale_report, evaluate, parse_query  # noqa: F401
