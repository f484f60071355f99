"""Synthetic candidate qrels derived from a ground-truth set.

Two generators:

* percentage sampling, which keeps a seeded random fraction of the
  relevant judgments and relabels the rest as non-relevant, and
* a popularity-biased labeller, which calls a document relevant when
  many systems retrieve it near the top, regardless of its true grade.

Both preserve the judged (topic, document) universe so downstream score
matrices stay comparable; only grades change.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import ConfigurationError
from .trec import CANDIDATE, Qrels, RunSet

PER_TOPIC = "per_topic"
GLOBAL = "global"
EXPLICIT = "explicit"


def _round_half_up(x: float) -> int:
    return math.floor(x + 0.5)


@dataclass(frozen=True)
class SamplingConfig:
    """Parameters for percentage sampling of relevant judgments."""

    fraction: float
    repetitions: int = 10
    master_seed: int = 0
    relevant_threshold: int = 1
    stratified: bool = False

    def __post_init__(self):
        if not 0.0 <= self.fraction <= 1.0:
            raise ConfigurationError(f"fraction must be in [0, 1], got {self.fraction}")
        if self.repetitions < 1:
            raise ConfigurationError("repetitions must be >= 1")
        if self.relevant_threshold < 1:
            raise ConfigurationError("relevant_threshold must be >= 1")


def percentage_sample(gt: Qrels, cfg: SamplingConfig, repetition_index: int = 0) -> Qrels:
    """Keep round(fraction * |relevant|) relevant judgments; zero the rest.

    ``repetition_index`` selects an independent substream of the master
    seed, so repetitions are reproducible individually and the set for a
    given (seed, repetition) never depends on how many repetitions run.

    In stratified mode the quota is applied per topic instead of to the
    pooled relevant list, which keeps per-topic relevance counts closer
    to proportional at the cost of larger total rounding error.
    """
    if not 0 <= repetition_index < cfg.repetitions:
        raise ConfigurationError(
            f"repetition_index {repetition_index} outside [0, {cfg.repetitions})"
        )
    rng = np.random.default_rng(
        np.random.SeedSequence(cfg.master_seed, spawn_key=(repetition_index,))
    )
    judgments = dict(gt.judgments)

    def sample_keys(relevant: list) -> set:
        k = _round_half_up(cfg.fraction * len(relevant))
        if k >= len(relevant):
            return set(relevant)
        picked = rng.choice(len(relevant), size=k, replace=False)
        return {relevant[i] for i in picked}

    if cfg.stratified:
        kept = set()
        for topic in gt.topics():
            relevant = sorted(
                key for key in gt.judgments
                if key[0] == topic and gt.judgments[key] >= cfg.relevant_threshold
            )
            kept |= sample_keys(relevant)
    else:
        relevant = sorted(
            key for key, grade in gt.judgments.items()
            if grade >= cfg.relevant_threshold
        )
        kept = sample_keys(relevant)

    for key, grade in gt.judgments.items():
        if grade >= cfg.relevant_threshold and key not in kept:
            judgments[key] = 0
    return Qrels(judgments=judgments, role=CANDIDATE)


@dataclass(frozen=True)
class PopularityConfig:
    """Parameters for the popularity-biased labeller.

    ``p_mode`` picks how many documents per topic get labelled relevant:
    ``per_topic`` matches each topic's own true relevant count, ``global``
    applies the collection-wide relevant rate to every topic, and
    ``explicit`` uses ``explicit_p`` directly.
    """

    depth: int = 100
    p_mode: str = PER_TOPIC
    explicit_p: float | None = None
    relevant_threshold: int = 1

    def __post_init__(self):
        if self.depth < 1:
            raise ConfigurationError("depth must be >= 1")
        if self.p_mode not in (PER_TOPIC, GLOBAL, EXPLICIT):
            raise ConfigurationError(f"unknown p_mode {self.p_mode!r}")
        if self.p_mode == EXPLICIT:
            if self.explicit_p is None or not 0.0 <= self.explicit_p <= 1.0:
                raise ConfigurationError("explicit mode needs explicit_p in [0, 1]")
        elif self.explicit_p is not None:
            raise ConfigurationError("explicit_p is only valid with p_mode='explicit'")


def popularity_counts(runs: RunSet, gt: Qrels, depth: int = 100) -> dict:
    """Per (topic, doc): how many systems retrieve the doc in their top ``depth``.

    Only judged documents are counted; everything else can never be
    labelled and would only add noise.
    """
    counts: dict[tuple[str, str], int] = {}
    judged = set(gt.judgments)
    for tag in runs.systems():
        for topic, docs in runs.runs[tag].items():
            for doc in docs[:depth]:
                key = (topic, doc.doc_id)
                if key in judged:
                    counts[key] = counts.get(key, 0) + 1
    return counts


def popularity_biased(gt: Qrels, runs: RunSet, cfg: PopularityConfig = PopularityConfig()) -> Qrels:
    """Label the most-retrieved judged documents per topic as relevant.

    Within a topic, documents are ranked by retrieval count (descending,
    document id ascending as tie-break) and the top ceil(p * judged)
    receive grade 1; the rest grade 0. Topics none of whose judged
    documents appear in any run keep all grades at 0 and produce a
    warning, since the labeller has no signal there.
    """
    counts = popularity_counts(runs, gt, cfg.depth)
    by_topic = gt.by_topic()

    if cfg.p_mode == GLOBAL:
        total = len(gt.judgments)
        if total == 0:
            raise ConfigurationError("cannot label an empty qrel set")
        rel = sum(1 for g in gt.judgments.values() if g >= cfg.relevant_threshold)
        p_global = Fraction(rel, total)

    judgments: dict[tuple[str, str], int] = {}
    for topic in gt.topics():
        docs = sorted(by_topic[topic])
        n_topic = len(docs)
        if cfg.p_mode == PER_TOPIC:
            n_select = sum(
                1 for d in docs if by_topic[topic][d] >= cfg.relevant_threshold
            )
        elif cfg.p_mode == GLOBAL:
            n_select = math.ceil(p_global * n_topic)
        else:
            n_select = math.ceil(Fraction(str(cfg.explicit_p)) * n_topic)
        n_select = min(n_select, n_topic)

        covered = [d for d in docs if counts.get((topic, d), 0) > 0]
        if not covered and n_select > 0:
            warnings.warn(
                f"topic {topic}: no judged document retrieved within depth "
                f"{cfg.depth}; labelling all non-relevant",
                stacklevel=2,
            )
            n_select = 0
        ranked = sorted(docs, key=lambda d: (-counts.get((topic, d), 0), d))
        selected = set(ranked[:n_select])
        for d in docs:
            judgments[(topic, d)] = 1 if d in selected else 0

    return Qrels(judgments=judgments, role=CANDIDATE)
