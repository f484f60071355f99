"""Parse TREC-format files and score every system with nDCG@10.

This walks the first stage of the pipeline: load a run set and a qrel
set, look at what the parser normalised, and turn everything into a
system-by-topic score matrix.
"""

from pathlib import Path
from tempfile import TemporaryDirectory

from discrimpower import (
    MeasureSpec,
    load_qrels,
    load_runs_dir,
    mean_scores,
    ndcg_at_k,
    score_matrix,
    write_mini_collection,
)


def main():
    with TemporaryDirectory() as td:
        qrels_path, run_paths = write_mini_collection(Path(td))
        print(f"wrote {len(run_paths)} run files and {qrels_path.name}\n")

        runs = load_runs_dir(Path(td) / "runs")
        qrels = load_qrels(qrels_path)
        print("systems:", ", ".join(runs.systems()))
        print("topics: ", ", ".join(runs.topics()))
        print(f"judgments: {len(qrels.judgments)}")

        # Rankings come back sorted by score (ties broken by document id,
        # descending) with ranks rewritten 1..n, the trec_eval convention.
        tag = runs.systems()[0]
        topic = runs.topics()[0]
        top = runs.runs[tag][topic][:3]
        print(f"\ntop 3 of {tag} on {topic}:")
        for doc in top:
            grade = qrels.judgments.get((topic, doc.doc_id), 0)
            print(f"  rank {doc.rank}: {doc.doc_id} score={doc.score:.3f} grade={grade}")

        ranking = [d.doc_id for d in runs.runs[tag][topic]]
        per_topic = {d: g for (t, d), g in qrels.judgments.items() if t == topic}
        print(f"\nnDCG@10 for that ranking: {ndcg_at_k(ranking, per_topic, MeasureSpec()):.4f}")

        sm = score_matrix(runs, qrels, MeasureSpec(k=10))
        print("\nfull score matrix (systems x topics):")
        print(sm.to_csv())
        print("mean nDCG@10 per system:")
        for tag, mean in mean_scores(sm).items():
            print(f"  {tag}: {mean:.4f}")


if __name__ == "__main__":
    main()
