"""Bundled end-to-end fixture: one fully labelled OOM-killer commit."""

from __future__ import annotations

from importlib import resources
from pathlib import Path

FIXTURE_LOG = "oom_fixture.log"
FIXTURE_LABELS = "oom_fixture_labels.jsonl"
FIXTURE_HASH = "d46078b288590973868bbbe4e2e1c4b44b0150e1"


def _data_path(name: str) -> Path:
    return Path(resources.files("rationale_miner").joinpath("data", name))


def fixture_log_path() -> Path:
    return _data_path(FIXTURE_LOG)


def fixture_labels_path() -> Path:
    return _data_path(FIXTURE_LABELS)
