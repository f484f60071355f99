import itertools

import numpy as np
import pytest

from discrimpower.errors import ConfigurationError
from discrimpower.measures import ScoreMatrix
from discrimpower.significance import (
    EXHAUSTIVE,
    SignificanceSet,
    SigTestConfig,
    significance_partition,
    significance_to_csv,
    tukey_hsd_pvalues,
)


def matrix(values, seed_tags="abcdefgh"):
    values = np.asarray(values, dtype=float)
    m, n = values.shape
    return ScoreMatrix(
        system_tags=tuple(seed_tags[:m]),
        topic_ids=tuple(f"t{i}" for i in range(n)),
        values=values,
    )


def brute_exhaustive(values):
    """Independent enumerator with identical left-to-right sums."""
    m, n = values.shape
    rows = [[float(values[i, t]) for t in range(n)] for i in range(m)]
    perms = list(itertools.permutations(range(m)))

    def means_for(assignment):
        means = []
        for i in range(m):
            acc = rows[perms[assignment[0]][i]][0]
            for t in range(1, n):
                acc += rows[perms[assignment[t]][i]][t]
            means.append(acc / n)
        return means

    null = []
    for assignment in itertools.product(range(len(perms)), repeat=n):
        ms = means_for(assignment)
        null.append(max(ms) - min(ms))
    observed = means_for(tuple([0] * n))
    out = {}
    for i in range(m):
        for j in range(i + 1, m):
            diff = abs(observed[i] - observed[j])
            out[(i, j)] = sum(1 for h in null if h >= diff) / len(null)
    return out


def test_exhaustive_matches_independent_enumerator_exactly():
    rng = np.random.default_rng(3)
    for _ in range(10):
        m = int(rng.integers(2, 4))
        n = int(rng.integers(2, 5))
        sm = matrix(rng.random((m, n)))
        mine = tukey_hsd_pvalues(sm, SigTestConfig(mode=EXHAUSTIVE))
        ref = brute_exhaustive(sm.values)
        for (i, j), expected in ref.items():
            assert mine.p_values[(sm.system_tags[i], sm.system_tags[j])] == expected


def paired_randomization_p(x, y):
    """Two-sided paired randomization test over all sign flips."""
    n = len(x)

    def stat(flips):
        sx = y[0] if flips[0] else x[0]
        sy = x[0] if flips[0] else y[0]
        for t in range(1, n):
            if flips[t]:
                sx += y[t]
                sy += x[t]
            else:
                sx += x[t]
                sy += y[t]
        return abs(sx / n - sy / n)

    observed = stat((False,) * n)
    count = sum(
        1
        for flips in itertools.product((False, True), repeat=n)
        if stat(flips) >= observed
    )
    return count / 2 ** n


def test_m2_reduces_to_paired_randomization_exactly():
    rng = np.random.default_rng(11)
    for _ in range(20):
        n = int(rng.integers(2, 9))
        sm = matrix(rng.random((2, n)))
        p = tukey_hsd_pvalues(sm, SigTestConfig(mode=EXHAUSTIVE)).p_values[("a", "b")]
        x = [float(v) for v in sm.values[0]]
        y = [float(v) for v in sm.values[1]]
        assert p == paired_randomization_p(x, y)


def test_sampled_approximates_exhaustive():
    rng = np.random.default_rng(7)
    sm = matrix(rng.random((3, 4)))
    exact = tukey_hsd_pvalues(sm, SigTestConfig(mode=EXHAUSTIVE))
    approx = tukey_hsd_pvalues(sm, SigTestConfig(permutations=5000, master_seed=1))
    for pair in exact.pairs:
        assert approx.p_values[pair] == pytest.approx(exact.p_values[pair], abs=0.05)


def test_sampled_is_deterministic_and_worker_invariant():
    rng = np.random.default_rng(9)
    sm = matrix(rng.random((4, 6)))
    cfg1 = SigTestConfig(permutations=800, master_seed=13, n_workers=1)
    cfg3 = SigTestConfig(permutations=800, master_seed=13, n_workers=3)
    a = tukey_hsd_pvalues(sm, cfg1)
    b = tukey_hsd_pvalues(sm, cfg1)
    c = tukey_hsd_pvalues(sm, cfg3)
    assert a.p_values == b.p_values == c.p_values


def test_different_seed_changes_null():
    rng = np.random.default_rng(10)
    sm = matrix(rng.random((3, 8)))
    a = tukey_hsd_pvalues(sm, SigTestConfig(permutations=500, master_seed=0))
    b = tukey_hsd_pvalues(sm, SigTestConfig(permutations=500, master_seed=99))
    assert a.p_values != b.p_values


def test_add_one_convention_bounds():
    # Identical rows: every permutation reproduces the observed zero diff,
    # so every pair has p = 1. Distinct rows never reach p = 0.
    sm = matrix(np.tile([[0.5]], (3, 4)))
    ss = tukey_hsd_pvalues(sm, SigTestConfig(permutations=100, master_seed=2))
    assert all(p == 1.0 for p in ss.p_values.values())

    rng = np.random.default_rng(1)
    sm = matrix(rng.random((2, 5)))
    ss = tukey_hsd_pvalues(sm, SigTestConfig(permutations=100, master_seed=2))
    assert all(0.0 < p <= 1.0 for p in ss.p_values.values())
    assert all(p >= 1 / 101 for p in ss.p_values.values())


def test_larger_gap_means_smaller_or_equal_p():
    # One shared null distribution: monotonicity in the observed gap.
    base = np.array([[0.9, 0.8, 0.85, 0.95], [0.5, 0.4, 0.45, 0.55],
                     [0.52, 0.41, 0.44, 0.56]])
    sm = matrix(base)
    ss = tukey_hsd_pvalues(sm, SigTestConfig(permutations=2000, master_seed=3))
    means = {t: float(np.mean(sm.row(t))) for t in sm.system_tags}
    gap_ab = abs(means["a"] - means["b"])
    gap_bc = abs(means["b"] - means["c"])
    assert gap_ab > gap_bc
    assert ss.p_values[("a", "b")] <= ss.p_values[("b", "c")]


def test_alpha_and_partition():
    ss = SignificanceSet(alpha=0.05, p_values={("a", "b"): 0.01, ("a", "c"): 0.5})
    assert ss.S == frozenset({("a", "b")})
    assert ss.NS == frozenset({("a", "c")})
    sig, nonsig = significance_partition(ss)
    assert sig == {("a", "b")} and nonsig == {("a", "c")}


def test_alpha_inclusive_boundary():
    # Find a pair's exact p, then set alpha right on it: the strict rule
    # (p < alpha) excludes it, the inclusive rule (p <= alpha) keeps it.
    rng = np.random.default_rng(1)
    sm = matrix(rng.random((2, 5)))
    first = tukey_hsd_pvalues(sm, SigTestConfig(permutations=200, master_seed=4))
    p = first.p_values[("a", "b")]
    assert 0.0 < p < 1.0
    strict = tukey_hsd_pvalues(
        sm, SigTestConfig(permutations=200, master_seed=4, alpha=p)
    )
    inclusive = tukey_hsd_pvalues(
        sm,
        SigTestConfig(permutations=200, master_seed=4, alpha=p, alpha_inclusive=True),
    )
    assert strict.significant[("a", "b")] is False
    assert inclusive.significant[("a", "b")] is True

    # Direct construction defaults to the strict rule as well.
    ss = SignificanceSet(alpha=0.05, p_values={("a", "b"): 0.05})
    assert ss.significant[("a", "b")] is False


def test_exhaustive_cap():
    rng = np.random.default_rng(0)
    sm = matrix(rng.random((3, 5)))
    with pytest.raises(ConfigurationError, match="sampled"):
        tukey_hsd_pvalues(sm, SigTestConfig(mode=EXHAUSTIVE, exhaustive_cap=100))


def test_config_validation():
    with pytest.raises(ConfigurationError):
        SigTestConfig(alpha=0.0)
    with pytest.raises(ConfigurationError):
        SigTestConfig(permutations=0)
    with pytest.raises(ConfigurationError):
        SigTestConfig(mode="bootstrap")
    with pytest.raises(ConfigurationError):
        SigTestConfig(n_workers=0)


def test_needs_two_systems():
    sm = matrix(np.array([[0.1, 0.2]]))
    with pytest.raises(ConfigurationError):
        tukey_hsd_pvalues(sm, SigTestConfig(permutations=10))


def test_csv_export():
    ss = SignificanceSet(
        alpha=0.05, p_values={("b", "c"): 0.5, ("a", "b"): 0.01}
    )
    text = significance_to_csv(ss)
    lines = text.splitlines()
    assert lines[0] == "system_a,system_b,p_value,significant"
    assert lines[1] == "a,b,0.01,true"
    assert lines[2] == "b,c,0.5,false"
