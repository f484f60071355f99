"""Zero-shot relevance labelling against a chat-completion endpoint.

Point the labeller at any OpenAI-compatible endpoint and it grades
every judged (query, document) pair with a 0-3 prompt, in parallel,
with on-disk caching. Here a tiny in-process stub stands in for the
real service so the demo runs offline; swap `endpoint` for a real URL
and set the LLM_API_KEY environment variable to use an actual model.
"""

import json
import re
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from tempfile import TemporaryDirectory

from discrimpower.labeller import (
    LabellerConfig,
    assemble_pairs,
    label_qrels,
)
from discrimpower.trec import Qrels


class _EchoGrader(BaseHTTPRequestHandler):
    """Grades by cheating: reads the grade hidden in the document text."""

    def do_POST(self):
        body = json.loads(self.rfile.read(int(self.headers["Content-Length"])))
        prompt = body["messages"][0]["content"]
        match = re.search(r"\[grade (\d)\]", prompt)
        reply = f"I think this is a {match.group(1)}." if match else "0"
        payload = json.dumps(
            {"choices": [{"message": {"content": reply}}]}
        ).encode()
        self.send_response(200)
        self.send_header("Content-Length", str(len(payload)))
        self.end_headers()
        self.wfile.write(payload)

    def log_message(self, *args):
        pass


def main():
    server = ThreadingHTTPServer(("127.0.0.1", 0), _EchoGrader)
    threading.Thread(target=server.serve_forever, daemon=True).start()
    endpoint = f"http://127.0.0.1:{server.server_address[1]}/v1/chat/completions"
    print(f"stub endpoint at {endpoint}\n")

    universe = Qrels(judgments={
        ("t1", "doc-a"): 0, ("t1", "doc-b"): 0,
        ("t2", "doc-a"): 0, ("t2", "doc-c"): 0,
    })
    queries = {"t1": "herding cats", "t2": "boiling the ocean"}
    texts = {
        ("t1", "doc-a"): "a manual on cat herding [grade 3]",
        ("t1", "doc-b"): "a pamphlet about dogs [grade 0]",
        ("t2", "doc-a"): "cat herding mentions oceans once [grade 1]",
        ("t2", "doc-c"): "thermodynamics of large water bodies [grade 2]",
    }
    pairs = assemble_pairs(universe, queries, texts)

    with TemporaryDirectory() as cache:
        cfg = LabellerConfig(
            endpoint=endpoint,
            model="demo-model",
            cache_dir=Path(cache),
            concurrency=2,
            rate_limit=50.0,
        )
        qrels, results = label_qrels(pairs, cfg)
        print("labelled qrels:")
        for (topic, doc), grade in sorted(qrels.judgments.items()):
            print(f"  {topic} {doc}: {grade}")
        print("\nraw replies:")
        for r in results:
            print(f"  ({r.topic_id}, {r.doc_id}) <- {r.raw_response!r}")

        # Second pass: every pair is served from the cache.
        _, again = label_qrels(pairs, cfg)
        print(f"\nrerun cached: {all(r.cached for r in again)}")

    server.shutdown()


if __name__ == "__main__":
    main()
