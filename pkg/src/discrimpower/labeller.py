"""Zero-shot relevance labelling through a chat-completion endpoint.

Each (query, document) pair is rendered into a grading prompt and sent
to an OpenAI-compatible ``/chat/completions`` endpoint at temperature 0;
the first integer on the grading scale found in the reply becomes the
grade. Replies are cached on disk keyed by a hash of (model, prompt), so
re-running a labelling job only pays for pairs it has not seen.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
import re
import threading
import time
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass
from pathlib import Path
from typing import NamedTuple, Optional, Sequence

import requests

from .errors import ConfigurationError, DiscrimPowerError
from .trec import CANDIDATE, Qrels

log = logging.getLogger(__name__)

_INT_RE = re.compile(r"-?\d+")

DEFAULT_PROMPT_TEMPLATE = """\
You are a search relevance assessor. Given a query and a document, \
assign a relevance grade on this scale:

3: perfectly relevant, the document is dedicated to the query and answers it
2: highly relevant, substantial parts of the document answer the query
1: related, the document mentions the topic but does not answer the query
0: irrelevant, the document has nothing to do with the query

Query: {query}

Document: {document}

Answer with a single integer grade and nothing else."""


class TransportError(DiscrimPowerError):
    """The endpoint could not be reached or kept failing."""


class ResponseParseError(DiscrimPowerError):
    """The endpoint replied, but no grade could be extracted."""

    def __init__(self, message: str, raw_response: str = ""):
        super().__init__(message)
        self.raw_response = raw_response


class LabellingError(DiscrimPowerError):
    """One or more pairs failed after retries; carries the failures."""

    def __init__(self, failures: list):
        keys = ", ".join(f"({t}, {d})" for t, d, _ in failures[:5])
        more = f" and {len(failures) - 5} more" if len(failures) > 5 else ""
        super().__init__(f"{len(failures)} pair(s) failed: {keys}{more}")
        self.failures = failures


@dataclass(frozen=True)
class LabellerConfig:
    endpoint: str
    model: str
    prompt_template: str = DEFAULT_PROMPT_TEMPLATE
    scale_max: int = 3
    timeout: float = 60.0
    max_retries: int = 3
    cache_dir: Optional[Path] = None
    rate_limit: Optional[float] = None  # requests per second
    concurrency: int = 4
    api_key_env: str = "LLM_API_KEY"

    def __post_init__(self):
        for slot in ("{query}", "{document}"):
            if slot not in self.prompt_template:
                raise ConfigurationError(f"prompt template is missing the {slot} slot")
        if self.scale_max < 1:
            raise ConfigurationError("scale_max must be >= 1")
        if self.rate_limit is not None and self.rate_limit <= 0:
            raise ConfigurationError("rate_limit must be positive when set")
        if self.concurrency < 1:
            raise ConfigurationError("concurrency must be >= 1")


class LabelledPair(NamedTuple):
    topic_id: str
    doc_id: str
    grade: int
    raw_response: str
    cached: bool
    clamped: bool = False


def extract_grade(text: str, scale_max: int) -> tuple[int, bool]:
    """Pull a grade from a model reply.

    Returns (grade, clamped). The first integer within [0, scale_max]
    wins; if every integer is out of range the first one is clamped into
    range instead of discarded, since an over-enthusiastic "10/10" style
    reply still carries signal. No integer at all is an error.
    """
    found = [int(m) for m in _INT_RE.findall(text)]
    if not found:
        raise ResponseParseError("no integer grade in model reply", raw_response=text)
    for value in found:
        if 0 <= value <= scale_max:
            return value, False
    clamped = min(max(found[0], 0), scale_max)
    log.warning("grade %d outside [0, %d]; clamped to %d", found[0], scale_max, clamped)
    return clamped, True


class _RateLimiter:
    """Hands out send times at most ``rate`` per second, thread-safe."""

    def __init__(self, rate: float):
        self._interval = 1.0 / rate
        self._lock = threading.Lock()
        self._next_allowed = 0.0

    def wait(self):
        with self._lock:
            now = time.monotonic()
            slot = max(now, self._next_allowed)
            self._next_allowed = slot + self._interval
        delay = slot - now
        if delay > 0:
            time.sleep(delay)


def _cache_path(cfg: LabellerConfig, prompt: str) -> Optional[Path]:
    if cfg.cache_dir is None:
        return None
    digest = hashlib.sha256(
        cfg.model.encode() + b"\x00" + prompt.encode()
    ).hexdigest()
    return Path(cfg.cache_dir) / f"{digest}.json"


def _post_completion(cfg: LabellerConfig, prompt: str) -> str:
    """POST the prompt; return the reply text. Retries transient failures."""
    headers = {"Content-Type": "application/json"}
    api_key = os.environ.get(cfg.api_key_env)
    if api_key:
        headers["Authorization"] = f"Bearer {api_key}"
    body = {
        "model": cfg.model,
        "messages": [{"role": "user", "content": prompt}],
        "temperature": 0,
    }
    last_error: Exception | None = None
    for attempt in range(cfg.max_retries):
        if attempt > 0:
            time.sleep(min(2 ** (attempt - 1), 8))
        try:
            resp = requests.post(
                cfg.endpoint, json=body, headers=headers, timeout=cfg.timeout
            )
        except requests.RequestException as exc:
            last_error = exc
            continue
        if resp.status_code >= 500:
            last_error = TransportError(f"server error {resp.status_code}")
            continue
        if resp.status_code != 200:
            raise TransportError(f"request rejected: {resp.status_code} {resp.text[:200]}")
        try:
            return resp.json()["choices"][0]["message"]["content"]
        except (ValueError, KeyError, IndexError, TypeError):
            raise ResponseParseError(
                "malformed completion response", raw_response=resp.text[:1000]
            )
    raise TransportError(f"gave up after {cfg.max_retries} attempts: {last_error}")


def label_pair(
    query_text: str,
    doc_text: str,
    cfg: LabellerConfig,
    topic_id: str = "",
    doc_id: str = "",
    _limiter: Optional[_RateLimiter] = None,
) -> LabelledPair:
    """Grade one (query, document) pair, via the cache when possible."""
    prompt = cfg.prompt_template.format(query=query_text, document=doc_text)
    cache_file = _cache_path(cfg, prompt)
    if cache_file is not None and cache_file.exists():
        entry = json.loads(cache_file.read_text())
        return LabelledPair(
            topic_id, doc_id, entry["grade"], entry["raw_response"], True,
            entry.get("clamped", False),
        )

    if _limiter is not None:
        _limiter.wait()
    reply = _post_completion(cfg, prompt)
    grade, clamped = extract_grade(reply, cfg.scale_max)

    if cache_file is not None:
        cache_file.parent.mkdir(parents=True, exist_ok=True)
        tmp = cache_file.with_suffix(f".tmp-{os.getpid()}-{threading.get_ident()}")
        tmp.write_text(json.dumps(
            {"grade": grade, "raw_response": reply, "clamped": clamped}
        ))
        os.replace(tmp, cache_file)  # atomic, safe under concurrent writers
    return LabelledPair(topic_id, doc_id, grade, reply, False, clamped)


def label_qrels(
    pairs: Sequence[tuple[str, str, str, str]],
    cfg: LabellerConfig,
    skip_failures: bool = False,
) -> tuple[Qrels, list[LabelledPair]]:
    """Grade (topic_id, doc_id, query_text, doc_text) pairs concurrently.

    Returns the assembled candidate qrels and the per-pair detail list,
    ordered by (topic_id, doc_id). Failures abort the whole job unless
    ``skip_failures`` is set, in which case failed pairs are dropped.
    """
    seen = set()
    for topic_id, doc_id, _, _ in pairs:
        if (topic_id, doc_id) in seen:
            raise ConfigurationError(f"duplicate pair ({topic_id}, {doc_id})")
        seen.add((topic_id, doc_id))

    limiter = _RateLimiter(cfg.rate_limit) if cfg.rate_limit else None
    results: list[LabelledPair] = []
    failures: list[tuple[str, str, Exception]] = []
    with ThreadPoolExecutor(max_workers=cfg.concurrency) as pool:
        futures = {
            pool.submit(
                label_pair, query, doc, cfg,
                topic_id=tid, doc_id=did, _limiter=limiter,
            ): (tid, did)
            for tid, did, query, doc in pairs
        }
        done = 0
        for fut in as_completed(futures):
            tid, did = futures[fut]
            try:
                results.append(fut.result())
            except DiscrimPowerError as exc:
                failures.append((tid, did, exc))
            done += 1
            if done % 50 == 0 or done == len(futures):
                log.info("labelled %d/%d pairs", done, len(futures))

    if failures and not skip_failures:
        raise LabellingError(failures)
    results.sort(key=lambda r: (r.topic_id, r.doc_id))
    judgments = {(r.topic_id, r.doc_id): r.grade for r in results}
    return Qrels(judgments=judgments, role=CANDIDATE), results


def _read_tsv(path: Path, n_cols: int, what: str) -> list[tuple]:
    rows = []
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            parts = line.split("\t", n_cols - 1)
            if len(parts) != n_cols:
                raise ConfigurationError(
                    f"{path}: line {line_no}: expected {n_cols} tab-separated "
                    f"{what} fields, got {len(parts)}"
                )
            rows.append(tuple(parts))
    return rows


def load_query_texts(path: Path) -> dict[str, str]:
    """Read a ``topic_id <TAB> query text`` file."""
    return dict(_read_tsv(Path(path), 2, "query"))


def load_pair_texts(path: Path) -> dict[tuple[str, str], str]:
    """Read a ``topic_id <TAB> doc_id <TAB> document text`` file."""
    return {(t, d): text for t, d, text in _read_tsv(Path(path), 3, "pair text")}


def assemble_pairs(
    gt: Qrels,
    queries: dict[str, str],
    pair_texts: dict[tuple[str, str], str],
) -> list[tuple[str, str, str, str]]:
    """Turn a judged universe plus text lookups into labelling inputs.

    Every judged (topic, document) pair must have both texts; anything
    missing is a data error, not something to silently skip.
    """
    missing_q = sorted({t for t, _ in gt.judgments if t not in queries})
    missing_p = sorted(key for key in gt.judgments if key not in pair_texts)
    if missing_q or missing_p:
        raise ConfigurationError(
            f"missing texts for topics {missing_q[:5]} and pairs {missing_p[:5]}"
        )
    return [
        (topic, doc, queries[topic], pair_texts[(topic, doc)])
        for topic, doc in sorted(gt.judgments)
    ]
