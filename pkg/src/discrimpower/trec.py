"""Readers and writers for TREC run and qrels file formats.

Run files are whitespace-separated six-column lines
(``topic Q0 docid rank score tag``); qrels files are four-column lines
(``topic iteration docid grade``). Parsed collections are plain
dataclasses and are treated as immutable after construction, so they can
be shared freely between threads and processes.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator, NamedTuple

from .errors import ParseError, ValidationError

GROUND_TRUTH = "ground_truth"
CANDIDATE = "candidate"


class RankedDoc(NamedTuple):
    doc_id: str
    score: float
    rank: int


@dataclass
class RunSet:
    """Per-system, per-topic rankings.

    ``runs[system_tag][topic_id]`` is a list of :class:`RankedDoc` sorted
    by (score descending, doc_id descending) and re-ranked 1..n, the
    dominant evaluation-tool convention for tie-breaking.
    """

    runs: dict[str, dict[str, list[RankedDoc]]] = field(default_factory=dict)

    def systems(self) -> list[str]:
        return sorted(self.runs)

    def topics(self) -> list[str]:
        seen: set[str] = set()
        for per_topic in self.runs.values():
            seen.update(per_topic)
        return sorted(seen)


@dataclass
class Qrels:
    """Relevance judgments: ``(topic_id, doc_id) -> integer grade``.

    ``role`` records whether the set is used as ground truth or as a
    candidate under evaluation; it is metadata and does not take part in
    equality. ``clamp_warnings`` counts negative input grades that were
    clamped to 0 during parsing.
    """

    judgments: dict[tuple[str, str], int] = field(default_factory=dict)
    role: str = field(default=GROUND_TRUTH, compare=False)
    clamp_warnings: int = field(default=0, compare=False)

    def topics(self) -> list[str]:
        return sorted({topic for topic, _ in self.judgments})

    def by_topic(self) -> dict[str, dict[str, int]]:
        """Group judgments as ``topic_id -> {doc_id: grade}``."""
        grouped: dict[str, dict[str, int]] = {}
        for (topic, doc), grade in self.judgments.items():
            grouped.setdefault(topic, {})[doc] = grade
        return grouped

    def grade(self, topic_id: str, doc_id: str, default: int = 0) -> int:
        return self.judgments.get((topic_id, doc_id), default)


def _iter_lines(source) -> Iterator[str]:
    if isinstance(source, bytes):
        source = source.decode("utf-8")
    if isinstance(source, str):
        return iter(source.splitlines())
    return iter(source)  # file object or any iterable of lines


def _normalize(entries: list[tuple[str, float]]) -> list[RankedDoc]:
    # Score descending, doc_id descending on ties; ranks rewritten 1..n.
    ordered = sorted(entries, key=lambda e: (e[1], e[0]), reverse=True)
    return [RankedDoc(doc, score, i + 1) for i, (doc, score) in enumerate(ordered)]


def parse_run(source, system_tag_override: str | None = None) -> RunSet:
    """Parse one system's TREC run file.

    The tag column (or ``system_tag_override``) becomes the system tag.
    Input order is irrelevant: every topic is re-sorted by (score
    descending, doc_id descending) and re-ranked from 1.

    Raises :class:`ParseError` for malformed lines, and
    :class:`ValidationError` for duplicate documents within a topic or
    for files mixing several system tags without an override.
    """
    tag_seen: str | None = None
    topics: dict[str, dict[str, float]] = {}
    for line_no, raw in enumerate(_iter_lines(source), start=1):
        parts = raw.split()
        if not parts:
            continue
        if len(parts) != 6:
            raise ParseError(line_no, f"expected 6 columns, got {len(parts)}")
        topic, _iteration, doc_id, rank_s, score_s, tag = parts
        try:
            int(rank_s)
        except ValueError:
            raise ParseError(line_no, f"rank is not an integer: {rank_s!r}") from None
        try:
            score = float(score_s)
        except ValueError:
            raise ParseError(line_no, f"score is not a number: {score_s!r}") from None
        if system_tag_override is not None:
            tag = system_tag_override
        if tag_seen is None:
            tag_seen = tag
        elif tag != tag_seen:
            raise ValidationError(
                f"run file mixes system tags {tag_seen!r} and {tag!r}; "
                "pass a system tag override to read it as a single system"
            )
        docs = topics.setdefault(topic, {})
        if doc_id in docs:
            raise ValidationError(
                f"duplicate document {doc_id!r} for topic {topic!r} in run {tag!r}"
            )
        docs[doc_id] = score
    if tag_seen is None:
        return RunSet()
    normalized = {
        topic: _normalize(list(docs.items())) for topic, docs in topics.items()
    }
    return RunSet({tag_seen: normalized})


def parse_qrels(source, max_grade: int = 3, role: str = GROUND_TRUTH) -> Qrels:
    """Parse a TREC qrels file.

    The second (iteration) column is ignored. Negative grades are clamped
    to 0 and counted in ``clamp_warnings``; grades above ``max_grade``
    are rejected.
    """
    judgments: dict[tuple[str, str], int] = {}
    clamped = 0
    for line_no, raw in enumerate(_iter_lines(source), start=1):
        parts = raw.split()
        if not parts:
            continue
        if len(parts) != 4:
            raise ParseError(line_no, f"expected 4 columns, got {len(parts)}")
        topic, _iteration, doc_id, grade_s = parts
        try:
            grade = int(grade_s)
        except ValueError:
            raise ParseError(line_no, f"grade is not an integer: {grade_s!r}") from None
        key = (topic, doc_id)
        if key in judgments:
            raise ValidationError(
                f"duplicate judgment for topic {topic!r}, document {doc_id!r}"
            )
        if grade < 0:
            grade = 0
            clamped += 1
        if grade > max_grade:
            raise ValidationError(
                f"grade {grade} for topic {topic!r}, document {doc_id!r} "
                f"exceeds the maximum grade {max_grade}"
            )
        judgments[key] = grade
    return Qrels(judgments=judgments, role=role, clamp_warnings=clamped)


def serialize_qrels(qrels: Qrels) -> str:
    """Emit the four-column qrels format, sorted by (topic, doc)."""
    return "".join(
        f"{topic} 0 {doc} {grade}\n"
        for (topic, doc), grade in sorted(qrels.judgments.items())
    )


def serialize_run(runset: RunSet) -> str:
    """Emit the six-column run format.

    Scores are written with ``repr`` so that parsing the output
    reproduces the exact same floats.
    """
    lines: list[str] = []
    for tag in runset.systems():
        per_topic = runset.runs[tag]
        for topic in sorted(per_topic):
            for doc in per_topic[topic]:
                lines.append(f"{topic} Q0 {doc.doc_id} {doc.rank} {doc.score!r} {tag}\n")
    return "".join(lines)


def merge_runs(fragments: Iterable[RunSet]) -> RunSet:
    """Combine single-system fragments; duplicate tags are an error."""
    combined: dict[str, dict[str, list[RankedDoc]]] = {}
    for fragment in fragments:
        for tag, topics in fragment.runs.items():
            if tag in combined:
                raise ValidationError(f"duplicate system tag {tag!r} across run files")
            combined[tag] = topics
    return RunSet(combined)


def load_run(path, system_tag_override: str | None = None,
             tag_from_filename: bool = False) -> RunSet:
    path = Path(path)
    override = path.stem if tag_from_filename else system_tag_override
    with open(path, encoding="utf-8") as fh:
        return parse_run(fh, override)


def load_runs(paths, tag_from_filename: bool = False) -> RunSet:
    """Load an explicit list of run files, one system per file."""
    paths = [Path(p) for p in paths]
    if not paths:
        raise ValidationError("no run files given")
    return merge_runs(load_run(p, tag_from_filename=tag_from_filename) for p in paths)


def load_runs_dir(directory, tag_from_filename: bool = False) -> RunSet:
    """Load every regular file in ``directory`` as one run each."""
    directory = Path(directory)
    paths = sorted(p for p in directory.iterdir() if p.is_file())
    if not paths:
        raise ValidationError(f"no run files in {directory}")
    return load_runs(paths, tag_from_filename=tag_from_filename)


def load_qrels(path, max_grade: int = 3, role: str = GROUND_TRUTH) -> Qrels:
    with open(path, encoding="utf-8") as fh:
        return parse_qrels(fh, max_grade=max_grade, role=role)


def save_qrels(qrels: Qrels, path) -> None:
    Path(path).write_text(serialize_qrels(qrels), encoding="utf-8")
