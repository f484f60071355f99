"""End-to-end comparison pipelines and flat CSV/JSON report rows.

The pipeline here ties the pieces together: score both qrel sets over
the same runs, run the significance test twice, and assemble agreement
metrics into one report row per candidate. Sweeps repeat that for a grid
of sampling fractions and repetitions.

All exports are plain deterministic text so that identical inputs and
seeds give byte-identical files.
"""

from __future__ import annotations

import dataclasses
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import ConfigurationError, ValidationError
from .measures import MeasureSpec, ScoreMatrix, mean_scores, score_matrix
from .metrics import DiscrimReport, full_report
from .significance import SignificanceSet, SigTestConfig, tukey_hsd_pvalues
from .synth import SamplingConfig, percentage_sample
from .trec import Qrels, RunSet

UNDEFINED = "undefined"

REPORT_COLUMNS = (
    "dataset", "qrels", "kappa", "tau", "delta_sens",
    "p1", "r1", "p2", "r2", "bac", "mcc",
    "fp", "fn", "tp", "tn",
    "sens_gt", "sens_cand", "s_gt", "ns_gt", "total_pairs", "flags",
)

PAIR_COLUMNS = (
    "system_a", "system_b",
    "mean_gt_a", "mean_gt_b", "mean_cand_a", "mean_cand_b",
    "p_gt", "p_cand", "sig_gt", "sig_cand", "error_class",
)

SWEEP_METRICS = ("kappa", "tau", "delta_sens", "p1", "r1", "p2", "r2", "bac", "mcc")

SWEEP_COLUMNS = ("fraction", "repetition") + SWEEP_METRICS + (
    "fp", "fn", "tp", "tn", "flags",
)


@dataclass
class Comparison:
    """Everything one candidate-vs-ground-truth comparison produced."""

    gt_matrix: ScoreMatrix
    cand_matrix: ScoreMatrix
    means_gt: dict[str, float]
    means_cand: dict[str, float]
    gt_ss: SignificanceSet
    cand_ss: SignificanceSet
    report: DiscrimReport


def compare_qrels(
    runs: RunSet,
    gt_qrels: Qrels,
    cand_qrels: Qrels,
    spec: MeasureSpec = MeasureSpec(),
    sig_cfg: SigTestConfig = SigTestConfig(),
    kappa_threshold: int = 2,
) -> Comparison:
    """Score, test, and compare one candidate qrel set against the truth.

    Both qrel sets must judge the same topics; otherwise the two score
    matrices would not be comparable column for column.
    """
    gt_matrix = score_matrix(runs, gt_qrels, spec)
    cand_matrix = score_matrix(runs, cand_qrels, spec)
    if gt_matrix.topic_ids != cand_matrix.topic_ids:
        only_gt = sorted(set(gt_matrix.topic_ids) - set(cand_matrix.topic_ids))
        only_cand = sorted(set(cand_matrix.topic_ids) - set(gt_matrix.topic_ids))
        raise ValidationError(
            "topic sets differ between qrels: "
            f"only in ground truth {only_gt[:5]}, only in candidate {only_cand[:5]}"
        )
    gt_ss = tukey_hsd_pvalues(gt_matrix, sig_cfg)
    cand_ss = tukey_hsd_pvalues(cand_matrix, sig_cfg)
    means_gt = mean_scores(gt_matrix)
    means_cand = mean_scores(cand_matrix)
    report = full_report(
        gt_ss, cand_ss, gt_qrels, cand_qrels, means_gt, means_cand,
        kappa_threshold=kappa_threshold,
    )
    return Comparison(
        gt_matrix=gt_matrix,
        cand_matrix=cand_matrix,
        means_gt=means_gt,
        means_cand=means_cand,
        gt_ss=gt_ss,
        cand_ss=cand_ss,
        report=report,
    )


def _error_class(sig_gt: bool, sig_cand: bool) -> str:
    if sig_gt:
        return "TP" if sig_cand else "FN"
    return "FP" if sig_cand else "TN"


def pair_rows(cmp: Comparison) -> list[dict]:
    """One row per system pair: means, p-values, and the error class."""
    rows = []
    for a, b in cmp.gt_ss.pairs:
        sig_gt = cmp.gt_ss.significant[(a, b)]
        sig_cand = cmp.cand_ss.significant[(a, b)]
        rows.append({
            "system_a": a,
            "system_b": b,
            "mean_gt_a": cmp.means_gt[a],
            "mean_gt_b": cmp.means_gt[b],
            "mean_cand_a": cmp.means_cand[a],
            "mean_cand_b": cmp.means_cand[b],
            "p_gt": cmp.gt_ss.p_values[(a, b)],
            "p_cand": cmp.cand_ss.p_values[(a, b)],
            "sig_gt": sig_gt,
            "sig_cand": sig_cand,
            "error_class": _error_class(sig_gt, sig_cand),
        })
    return rows


def format_value(value, precision: str = "4") -> str:
    """Render one cell: None shows as a distinguished undefined marker."""
    if value is None:
        return UNDEFINED
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return repr(value) if precision == "full" else f"{value:.4f}"
    return str(value)


def report_row(report: DiscrimReport, dataset: str, qrels_name: str) -> dict:
    """Flatten a report into the column layout used by every export."""
    c = report.counts
    return {
        "dataset": dataset,
        "qrels": qrels_name,
        "kappa": report.kappa,
        "tau": report.tau,
        "delta_sens": report.delta_sens,
        "p1": report.p1,
        "r1": report.r1,
        "p2": report.p2,
        "r2": report.r2,
        "bac": report.bac,
        "mcc": report.mcc,
        "fp": c.fp,
        "fn": c.fn,
        "tp": c.tp,
        "tn": c.tn,
        "sens_gt": report.sens_gt,
        "sens_cand": report.sens_cand,
        "s_gt": c.significant_gt,
        "ns_gt": c.nonsignificant_gt,
        "total_pairs": c.total,
        "flags": ";".join(report.flags),
    }


def report_to_csv(rows: list[dict], precision: str = "4") -> str:
    lines = [",".join(REPORT_COLUMNS)]
    for row in rows:
        lines.append(",".join(format_value(row[c], precision) for c in REPORT_COLUMNS))
    return "\n".join(lines) + "\n"


def report_to_json(rows: list[dict]) -> str:
    # Full precision; undefined becomes JSON null.
    return json.dumps(rows, indent=2) + "\n"


def pairs_to_csv(rows: list[dict], precision: str = "4") -> str:
    def cell(col: str, value) -> str:
        if col.startswith("mean_"):
            return repr(value) if precision == "full" else f"{value:.6f}"
        if col.startswith("p_"):
            return repr(value)
        return format_value(value, precision)

    lines = [",".join(PAIR_COLUMNS)]
    for row in rows:
        lines.append(",".join(cell(c, row[c]) for c in PAIR_COLUMNS))
    return "\n".join(lines) + "\n"


@dataclass
class SweepResult:
    """Per-cell report rows plus per-fraction aggregates of each metric.

    ``summary[fraction][metric]`` is (mean, variance, defined_count);
    undefined cell values are left out of the aggregates, and a metric
    undefined in every repetition aggregates to (None, None, 0).
    """

    fractions: list[float]
    repetitions: int
    rows: list[dict]
    summary: dict[float, dict[str, tuple[Optional[float], Optional[float], int]]]


def _sweep_cell(
    runs: RunSet,
    gt_qrels: Qrels,
    gt_ss: SignificanceSet,
    means_gt: dict[str, float],
    fraction: float,
    repetition: int,
    sampling: SamplingConfig,
    spec: MeasureSpec,
    sig_cfg: SigTestConfig,
    kappa_threshold: int,
) -> dict:
    cand = percentage_sample(gt_qrels, sampling, repetition)
    cand_matrix = score_matrix(runs, cand, spec)
    cand_ss = tukey_hsd_pvalues(cand_matrix, sig_cfg)
    report = full_report(
        gt_ss, cand_ss, gt_qrels, cand, means_gt, mean_scores(cand_matrix),
        kappa_threshold=kappa_threshold,
    )
    row = {"fraction": fraction, "repetition": repetition}
    full = report_row(report, dataset="", qrels_name="")
    for col in SWEEP_METRICS + ("fp", "fn", "tp", "tn", "flags"):
        row[col] = full[col]
    return row


def summarize_rows(
    rows: list[dict],
    fractions: list[float],
) -> dict[float, dict[str, tuple[Optional[float], Optional[float], int]]]:
    """Aggregate mean/variance (population) per fraction over defined values."""
    summary: dict[float, dict[str, tuple[Optional[float], Optional[float], int]]] = {}
    for fraction in fractions:
        per_metric = {}
        cells = [r for r in rows if r["fraction"] == fraction]
        for metric in SWEEP_METRICS:
            values = [r[metric] for r in cells if r[metric] is not None]
            if not values:
                per_metric[metric] = (None, None, 0)
            else:
                arr = np.asarray(values, dtype=float)
                per_metric[metric] = (
                    float(arr.mean()), float(arr.var()), len(values)
                )
        summary[fraction] = per_metric
    return summary


def run_sweep(
    runs: RunSet,
    gt_qrels: Qrels,
    fractions: list[float],
    repetitions: int = 10,
    master_seed: int = 0,
    spec: MeasureSpec = MeasureSpec(),
    sig_cfg: SigTestConfig = SigTestConfig(),
    kappa_threshold: int = 2,
    relevant_threshold: int = 1,
    stratified: bool = False,
    n_workers: int = 1,
) -> SweepResult:
    """Compare a percentage sample against the truth for every cell.

    The ground-truth side (score matrix, significance set) is computed
    once and shared. Cells are independent, so worker count changes only
    wall time, never results: rows are assembled in (fraction,
    repetition) order whatever finishes first.
    """
    if not fractions:
        raise ConfigurationError("need at least one sampling fraction")
    if n_workers < 1:
        raise ConfigurationError("n_workers must be >= 1")
    gt_matrix = score_matrix(runs, gt_qrels, spec)
    gt_ss = tukey_hsd_pvalues(gt_matrix, sig_cfg)
    means_gt = mean_scores(gt_matrix)
    # Cells must not spawn nested process pools.
    cell_sig = dataclasses.replace(sig_cfg, n_workers=1)

    cells = [
        (
            fraction,
            rep,
            SamplingConfig(
                fraction=fraction,
                repetitions=repetitions,
                master_seed=master_seed,
                relevant_threshold=relevant_threshold,
                stratified=stratified,
            ),
        )
        for fraction in fractions
        for rep in range(repetitions)
    ]
    if n_workers == 1:
        rows = [
            _sweep_cell(runs, gt_qrels, gt_ss, means_gt, fraction, rep,
                        sampling, spec, cell_sig, kappa_threshold)
            for fraction, rep, sampling in cells
        ]
    else:
        with ProcessPoolExecutor(max_workers=n_workers) as pool:
            futures = [
                pool.submit(_sweep_cell, runs, gt_qrels, gt_ss, means_gt,
                            fraction, rep, sampling, spec, cell_sig,
                            kappa_threshold)
                for fraction, rep, sampling in cells
            ]
            rows = [f.result() for f in futures]

    return SweepResult(
        fractions=list(fractions),
        repetitions=repetitions,
        rows=rows,
        summary=summarize_rows(rows, list(fractions)),
    )


def sweep_to_csv(sr: SweepResult, precision: str = "4") -> str:
    def cell(col: str, value) -> str:
        if col == "fraction":
            return repr(float(value))
        return format_value(value, precision)

    lines = [",".join(SWEEP_COLUMNS)]
    for row in sr.rows:
        lines.append(",".join(cell(c, row[c]) for c in SWEEP_COLUMNS))
    return "\n".join(lines) + "\n"


def sweep_summary_to_csv(sr: SweepResult, precision: str = "4") -> str:
    cols = ["fraction"]
    for metric in SWEEP_METRICS:
        cols += [f"{metric}_mean", f"{metric}_var", f"{metric}_n"]
    lines = [",".join(cols)]
    for fraction in sr.fractions:
        cells = [repr(float(fraction))]
        for metric in SWEEP_METRICS:
            mean, var, n = sr.summary[fraction][metric]
            cells += [
                format_value(mean, precision),
                format_value(var, precision),
                str(n),
            ]
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"
