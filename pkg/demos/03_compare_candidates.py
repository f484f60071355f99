"""Do cheaper judgments reach the same conclusions as the real ones?

Two candidate qrel sets are produced from the bundled ground truth: a
50% sample of the relevant judgments and a popularity-biased labelling
that just marks the most-retrieved documents relevant. Each candidate
is compared with the truth on the full metric battery.
"""

from discrimpower import (
    PopularityConfig,
    SamplingConfig,
    SigTestConfig,
    build_mini_collection,
    compare_qrels,
    percentage_sample,
    popularity_biased,
    report_row,
    report_to_csv,
)

SIG = SigTestConfig(permutations=5000, master_seed=0)


def describe(name, cmp):
    r = cmp.report
    print(f"--- {name} ---")
    print(f"  confusion: tp={r.counts.tp} tn={r.counts.tn} "
          f"fp={r.counts.fp} fn={r.counts.fn}")
    fmt = lambda v: "undefined" if v is None else f"{v:.4f}"
    print(f"  kappa={fmt(r.kappa)} tau={fmt(r.tau)} delta_sens={fmt(r.delta_sens)}")
    print(f"  P/R significant:     {fmt(r.p1)} / {fmt(r.r1)}")
    print(f"  P/R non-significant: {fmt(r.p2)} / {fmt(r.r2)}")
    print(f"  BAC={fmt(r.bac)} MCC={fmt(r.mcc)}")
    if r.flags:
        print(f"  flags: {';'.join(r.flags)}")
    print()


def main():
    runs, truth = build_mini_collection()

    sampled = percentage_sample(
        truth, SamplingConfig(fraction=0.5, master_seed=42), 0
    )
    popular = popularity_biased(truth, runs, PopularityConfig(depth=20))

    rows = []
    for name, cand in (("50% sample", sampled), ("popularity", popular)):
        cmp = compare_qrels(runs, truth, cand, sig_cfg=SIG)
        describe(name, cmp)
        rows.append(report_row(cmp.report, dataset="mini", qrels_name=name))

    print("the same thing as a report CSV:\n")
    print(report_to_csv(rows), end="")


if __name__ == "__main__":
    main()
