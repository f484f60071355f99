"""Paired randomised Tukey HSD test over all unordered system pairs.

The test controls the family-wise error rate by using a single null
distribution for every pair: in each iteration the scores inside every
topic column are independently permuted across systems, and the honestly
significant difference statistic ``HSD* = max(mean*) - min(mean*)`` of
the permuted per-system means is recorded. A pair's p-value is the
fraction of iterations whose HSD* reaches its observed absolute mean
difference.

Determinism contract: the permutation used for iteration ``b`` and topic
``t`` comes from a counter-based stream keyed on ``(master_seed, b, t)``,
so p-values are bit-identical for a fixed seed regardless of execution
order or worker count.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError
from .measures import ScoreMatrix, sequential_row_means

SAMPLED = "sampled"
EXHAUSTIVE = "exhaustive"

_CHUNK = 65536  # assignments vectorised per block in exhaustive mode


@dataclass(frozen=True)
class SigTestConfig:
    """Significance-test parameters.

    ``alpha_inclusive`` switches the significance rule from the default
    strict ``p < alpha`` to ``p <= alpha``.
    """

    alpha: float = 0.05
    permutations: int = 10_000
    master_seed: int = 0
    mode: str = SAMPLED
    exhaustive_cap: int = 10_000_000
    alpha_inclusive: bool = False
    n_workers: int = 1

    def __post_init__(self):
        if not 0.0 < self.alpha < 1.0:
            raise ConfigurationError(f"alpha must be in (0, 1), got {self.alpha}")
        if self.permutations < 1:
            raise ConfigurationError("permutation count must be >= 1")
        if self.mode not in (SAMPLED, EXHAUSTIVE):
            raise ConfigurationError(f"unknown test mode {self.mode!r}")
        if self.master_seed < 0:
            raise ConfigurationError("master_seed must be a non-negative integer")
        if self.n_workers < 1:
            raise ConfigurationError("n_workers must be >= 1")


@dataclass
class SignificanceSet:
    """P-values and the significant / non-significant pair partition.

    Pairs are unordered and stored with lexicographically sorted tags.
    """

    alpha: float
    p_values: dict[tuple[str, str], float]
    significant: dict[tuple[str, str], bool] = field(default_factory=dict)

    def __post_init__(self):
        if not self.significant:
            self.significant = {p: v < self.alpha for p, v in self.p_values.items()}

    @property
    def pairs(self) -> list[tuple[str, str]]:
        return sorted(self.p_values)

    @property
    def S(self) -> frozenset[tuple[str, str]]:
        return frozenset(p for p, sig in self.significant.items() if sig)

    @property
    def NS(self) -> frozenset[tuple[str, str]]:
        return frozenset(p for p, sig in self.significant.items() if not sig)


def _pair_key(a: str, b: str) -> tuple[str, str]:
    return (a, b) if a <= b else (b, a)


def _topic_stream(master_seed: int, iteration: int, topic: int) -> np.random.Generator:
    # Philox counter layout: iteration in bits 128+, topic in bits 64..127,
    # leaving the low 64 bits for in-stream draws.
    counter = (iteration << 128) | (topic << 64)
    return np.random.Generator(np.random.Philox(key=master_seed, counter=counter))


def _null_chunk(values: np.ndarray, master_seed: int, start: int, stop: int) -> np.ndarray:
    """HSD* for iterations [start, stop); independent of chunking."""
    m, n = values.shape
    out = np.empty(stop - start)
    idx = np.empty((m, n), dtype=np.intp)
    for b in range(start, stop):
        for t in range(n):
            idx[:, t] = _topic_stream(master_seed, b, t).permutation(m)
        permuted = np.take_along_axis(values, idx, axis=0)
        means = sequential_row_means(permuted)
        out[b - start] = means.max() - means.min()
    return out


def _sampled_null(values: np.ndarray, cfg: SigTestConfig) -> np.ndarray:
    if cfg.n_workers == 1:
        return _null_chunk(values, cfg.master_seed, 0, cfg.permutations)
    bounds = np.linspace(0, cfg.permutations, cfg.n_workers + 1).astype(int)
    with ProcessPoolExecutor(max_workers=cfg.n_workers) as pool:
        parts = pool.map(
            _null_chunk,
            [values] * cfg.n_workers,
            [cfg.master_seed] * cfg.n_workers,
            bounds[:-1],
            bounds[1:],
        )
        return np.concatenate(list(parts))


def _exhaustive_null(values: np.ndarray, cap: int) -> np.ndarray:
    """HSD* for every one of the (m!)^n within-topic assignments."""
    m, n = values.shape
    fact = math.factorial(m)
    total = fact ** n
    if total > cap:
        raise ConfigurationError(
            f"exhaustive enumeration needs {total} assignments, above the cap "
            f"of {cap}; use sampled mode"
        )
    perm_rows = np.array(list(itertools.permutations(range(m))), dtype=np.intp)
    # col_perms[t][k] is topic t's column under the k-th permutation.
    col_perms = [values[perm_rows, t] for t in range(n)]
    null = np.empty(total)
    combos = itertools.product(range(fact), repeat=n)
    pos = 0
    while True:
        chunk = list(itertools.islice(combos, _CHUNK))
        if not chunk:
            break
        ci = np.asarray(chunk, dtype=np.intp)
        # Accumulate in topic order to match sequential_row_means exactly.
        acc = col_perms[0][ci[:, 0]].copy()
        for t in range(1, n):
            acc += col_perms[t][ci[:, t]]
        means = acc / n
        null[pos:pos + len(chunk)] = means.max(axis=1) - means.min(axis=1)
        pos += len(chunk)
    return null


def tukey_hsd_pvalues(sm: ScoreMatrix, cfg: SigTestConfig = SigTestConfig()) -> SignificanceSet:
    """Run the test on a score matrix and return all pairwise p-values.

    Sampled mode uses the add-one Monte-Carlo convention
    ``p = (1 + #{HSD* >= |diff|}) / (1 + B)``, which keeps p-values in
    (0, 1]. Exhaustive mode enumerates every assignment and returns the
    exact ratio.
    """
    values = np.asarray(sm.values, dtype=float)
    m, n = values.shape
    if m < 2:
        raise ConfigurationError("significance testing needs at least two systems")
    if n < 1:
        raise ConfigurationError("significance testing needs at least one topic")

    if cfg.mode == EXHAUSTIVE:
        null = _exhaustive_null(values, cfg.exhaustive_cap)
        add, denom = 0, null.size
    else:
        null = _sampled_null(values, cfg)
        add, denom = 1, cfg.permutations + 1
    null_sorted = np.sort(null)

    means = sequential_row_means(values)
    p_values: dict[tuple[str, str], float] = {}
    for i in range(m):
        for j in range(i + 1, m):
            diff = abs(means[i] - means[j])
            count = null.size - int(np.searchsorted(null_sorted, diff, side="left"))
            key = _pair_key(sm.system_tags[i], sm.system_tags[j])
            p_values[key] = (count + add) / denom

    if cfg.alpha_inclusive:
        significant = {p: v <= cfg.alpha for p, v in p_values.items()}
    else:
        significant = {p: v < cfg.alpha for p, v in p_values.items()}
    return SignificanceSet(alpha=cfg.alpha, p_values=p_values, significant=significant)


def significance_partition(ss: SignificanceSet) -> tuple[set, set]:
    """Split all pairs into (significant, non-significant)."""
    return set(ss.S), set(ss.NS)


def significance_to_csv(ss: SignificanceSet) -> str:
    lines = ["system_a,system_b,p_value,significant"]
    for a, b in ss.pairs:
        p = ss.p_values[(a, b)]
        sig = "true" if ss.significant[(a, b)] else "false"
        lines.append(f"{a},{b},{p!r},{sig}")
    return "\n".join(lines) + "\n"
