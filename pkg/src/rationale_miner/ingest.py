"""Parse raw git commit logs and clean them into sentence-segmented commits.

The input record format is plain text, one record per commit:

    @@COMMIT@@
    <40-char hash>
    <author name>
    <author email>
    <ISO-8601 author date>
    <blank>
    <subject line>
    <blank>
    <body ... until the next @@COMMIT@@ or EOF>

which `git log` can emit directly::

    git log --pretty=format:'@@COMMIT@@%n%H%n%an%n%ae%n%aI%n%n%s%n%n%b' -- <path>

Cleaning drops merge commits, trailer metadata lines, URLs, call-trace
blocks and source-code lines, then splits the remaining prose into
sentences.  The subject line is kept as sentence 0 (the summary phrase).
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

RECORD_DELIMITER = "@@COMMIT@@"

_HASH_RE = re.compile(r"^[0-9a-f]{40}$")
_URL_RE = re.compile(r"https?://\S+")

# Trailer keys stripped from message bodies (first token of the line,
# case-insensitive).
TRAILER_KEYS = frozenset(
    key.lower()
    for key in (
        "Signed-off-by:",
        "Suggested-by:",
        "Acked-by:",
        "Reviewed-by:",
        "Reported-by:",
        "Tested-by:",
        "Cc:",
        "Co-developed-by:",
        "Fixes:",
        "Link:",
        "Debugged-by:",
        "Reviewed-off-by:",
    )
)

# A line that looks like part of a kernel oops / stack dump.  Two or more
# of these in a row form a call-trace block.
_TRACE_LINE_RE = re.compile(
    r"""^\s*(
        \[<[0-9a-fA-F]+>\]            # bracketed return address
      | Call\ Trace:                  # block header
      | \??\s*[\w.?\[\]]+\+0x[0-9a-fA-F]+/0x[0-9a-fA-F]+  # frame symbol+off/len
    )""",
    re.VERBOSE,
)

_CODE_PREFIXES = ("git ", "$cd", "$echo", "$ ", "#define", "#include", "diff --", "+", "-", "@@")
_CODE_SUFFIXES = ("{", "}", ";")

# Sentence boundary: terminal punctuation, whitespace, then an uppercase
# letter starting the next sentence.
_BOUNDARY_RE = re.compile(r"[.!?](?=\s+[A-Z])")
_ABBREV_TAIL_RE = re.compile(r"(\w+)\.$")

MIN_SENTENCE_CHARS = 3  # sentences must be strictly longer than this


class GitLogParseError(ValueError):
    """Malformed git-log record stream."""

    def __init__(self, message: str, record: int, byte_offset: int):
        super().__init__(f"record {record} at byte {byte_offset}: {message}")
        self.record = record
        self.byte_offset = byte_offset


@dataclass(frozen=True)
class RawCommit:
    hash: str
    author_name: str
    author_email: str
    date: str
    subject: str
    body: str

    def __post_init__(self):
        if not _HASH_RE.match(self.hash):
            raise ValueError(f"invalid commit hash: {self.hash!r}")
        if "\n" in self.subject:
            raise ValueError("subject must not contain newlines")


@dataclass(frozen=True)
class Sentence:
    index: int
    text: str

    def __post_init__(self):
        if len(self.text) <= MIN_SENTENCE_CHARS:
            raise ValueError(f"sentence text too short: {self.text!r}")
        if "\n" in self.text:
            raise ValueError("sentence text must not contain newlines")


@dataclass(frozen=True)
class CleanCommit:
    hash: str
    author_name: str
    author_email: str
    date: str
    summary_phrase: str
    sentences: tuple[Sentence, ...] = field(default_factory=tuple)

    def __post_init__(self):
        if not self.sentences:
            raise ValueError("a clean commit keeps at least the summary sentence")
        for i, s in enumerate(self.sentences):
            if s.index != i:
                raise ValueError("sentence indices must be exactly 0..n-1")

    def to_record(self) -> dict:
        return {
            "hash": self.hash,
            "author_name": self.author_name,
            "author_email": self.author_email,
            "date": self.date,
            "sentences": [{"index": s.index, "text": s.text} for s in self.sentences],
        }

    @classmethod
    def from_record(cls, record: dict) -> "CleanCommit":
        sentences = tuple(Sentence(s["index"], s["text"]) for s in record["sentences"])
        return cls(
            hash=record["hash"],
            author_name=record["author_name"],
            author_email=record["author_email"],
            date=record["date"],
            summary_phrase=sentences[0].text,
            sentences=sentences,
        )


def parse_git_log(stream: str) -> list[RawCommit]:
    """Parse a record stream (format above) into RawCommits, in order.

    Raises GitLogParseError naming the record ordinal and byte offset when a
    header line is missing or the hash is malformed.
    """
    lines = stream.splitlines()
    offsets = []
    pos = 0
    for raw_line in stream.splitlines(keepends=True):
        offsets.append(pos)
        pos += len(raw_line.encode("utf-8"))
    offsets.append(pos)  # EOF offset

    commits: list[RawCommit] = []
    i = 0
    # tolerate leading blank lines before the first record
    while i < len(lines) and not lines[i].strip():
        i += 1
    record = 0
    while i < len(lines):
        record += 1

        def fail(message: str, at: int) -> GitLogParseError:
            return GitLogParseError(message, record, offsets[min(at, len(offsets) - 1)])

        if lines[i] != RECORD_DELIMITER:
            raise fail(f"expected {RECORD_DELIMITER!r}, got {lines[i]!r}", i)
        i += 1

        header: list[str] = []
        for name in ("hash", "author_name", "author_email", "date"):
            if i >= len(lines) or lines[i] == RECORD_DELIMITER:
                raise fail(f"missing {name} header line", i)
            header.append(lines[i])
            i += 1
        commit_hash, author_name, author_email, date = header
        if not _HASH_RE.match(commit_hash):
            raise fail(f"malformed hash {commit_hash!r}", i - 4)

        if i >= len(lines) or lines[i].strip():
            raise fail("missing blank line before subject", i)
        i += 1
        if i >= len(lines):
            raise fail("missing subject line", i)
        subject = lines[i]
        i += 1
        # blank separator and body are optional for body-less records at EOF
        if i < len(lines) and lines[i] != RECORD_DELIMITER:
            if lines[i].strip():
                raise fail("missing blank line after subject", i)
            i += 1
        body_lines: list[str] = []
        while i < len(lines) and lines[i] != RECORD_DELIMITER:
            body_lines.append(lines[i])
            i += 1
        commits.append(
            RawCommit(
                hash=commit_hash,
                author_name=author_name,
                author_email=author_email,
                date=date,
                subject=subject,
                body="\n".join(body_lines),
            )
        )
    return commits


def is_merge_commit(c: RawCommit) -> bool:
    """Merge commits are identified by the exact subject prefix "Merge tag"."""
    return c.subject.startswith("Merge tag")


def strip_metadata(body: str) -> str:
    """Drop trailer lines (Signed-off-by:, Fixes:, ... ) from a message body."""
    kept = []
    for line in body.split("\n"):
        tokens = line.split()
        if tokens and tokens[0].lower() in TRAILER_KEYS:
            continue
        kept.append(line)
    return "\n".join(kept)


def strip_urls_and_traces(body: str) -> str:
    """Remove URLs and call-trace blocks (>= 2 consecutive trace-ish lines)."""
    body = _URL_RE.sub("", body)
    lines = body.split("\n")
    trace = [bool(_TRACE_LINE_RE.match(line)) for line in lines]
    kept = []
    i = 0
    while i < len(lines):
        if trace[i]:
            j = i
            while j < len(lines) and trace[j]:
                j += 1
            if j - i >= 2:
                i = j
                continue
        kept.append(lines[i])
        i += 1
    return "\n".join(kept)


def is_code_line(line: str) -> bool:
    """Heuristic source-code detector used to drop code from message bodies."""
    stripped = line.strip()
    if not stripped:
        return False
    if stripped.startswith(_CODE_PREFIXES):
        return True
    return stripped.endswith(_CODE_SUFFIXES)


def _guarded(text: str, end: int) -> bool:
    """True when the candidate boundary at text[end] must not split.

    Guards: short-token abbreviations ("i.e.", "Dr.") and "etc.".  Decimal
    points inside numbers never reach here because the boundary pattern
    demands whitespace after the punctuation.
    """
    if text[end] != ".":
        return False
    m = _ABBREV_TAIL_RE.search(text[: end + 1])
    if m is None:
        return False
    token = m.group(1)
    return len(token) <= 2 or token.lower() == "etc"


def split_sentences(body: str) -> list[str]:
    """Split cleaned prose into sentences.

    Paragraphs (blank-line separated) are unwrapped first; sentences never
    span a paragraph boundary.
    """
    sentences: list[str] = []
    for paragraph in re.split(r"\n\s*\n", body):
        text = " ".join(paragraph.split("\n")).strip()
        if not text:
            continue
        start = 0
        for m in _BOUNDARY_RE.finditer(text):
            end = m.start()
            if _guarded(text, end):
                continue
            sentences.append(text[start : end + 1].strip())
            start = end + 1
        tail = text[start:].strip()
        if tail:
            sentences.append(tail)
    return sentences


def preprocess(c: RawCommit) -> CleanCommit | None:
    """Clean one commit; returns None for merge commits (skipped).

    The subject line becomes sentence 0; body sentences follow in textual
    order.  Degenerate bodies still yield a commit with the summary alone.
    """
    if is_merge_commit(c):
        return None
    body = strip_metadata(c.body)
    body = strip_urls_and_traces(body)
    body = "\n".join(line for line in body.split("\n") if not is_code_line(line))
    summary = " ".join(_URL_RE.sub("", c.subject).split())
    kept = [t for t in split_sentences(body) if len(t.strip()) > MIN_SENTENCE_CHARS]
    return CleanCommit(
        hash=c.hash,
        author_name=c.author_name,
        author_email=c.author_email,
        date=c.date,
        summary_phrase=summary,
        sentences=tuple(Sentence(i, t.strip()) for i, t in enumerate([summary] + kept)),
    )
