"""Sampling from a separate process over the line-delimited JSON protocol.

Writes a minimal sampler child (a biased coin over two byte values) to a
temp file, spawns it, validates the protocol with a roundtrip check, and
temperature-sharpens the child's distribution without ever seeing its
probabilities.  If the TypeScript reference n-gram sampler is built under
frontend/dist, it is exercised too.
"""

import os
import sys
import tempfile
import textwrap
from collections import Counter

from lfree import (
    InverseTemperature,
    exact_temperature_sample,
    make_rng,
    roundtrip_check,
    spawn_external_sampler,
)

CHILD = textwrap.dedent("""
    import json, random, sys
    print(json.dumps({"hello": {"k": 1, "vocab_size": 256}}), flush=True)
    for line in sys.stdin:
        req = json.loads(line)
        rng = random.Random(req["seed"])
        samples = [[97 if rng.random() < 0.8 else 98] for _ in range(req["num_samples"])]
        print(json.dumps({"id": req["id"], "samples": samples}), flush=True)
""")

with tempfile.NamedTemporaryFile("w", suffix=".py", delete=False) as fh:
    fh.write(CHILD)
    child_path = fh.name

try:
    with spawn_external_sampler(sys.executable, [child_path]) as source:
        print("handshake:", source.handshake)
        report = roundtrip_check(source, trials=200, seed=1)
        print("roundtrip violations:", report.total_violations,
              "| latency p50/p99 ms:",
              f"{report.latency_ms['p50']:.2f}/{report.latency_ms['p99']:.2f}")

        rng = make_rng(11)
        sharp = Counter()
        for _ in range(2000):
            outcome, _ = exact_temperature_sample(source, InverseTemperature(3, 1), rng)
            sharp[outcome] += 1
        base_p = 0.8
        target_p = base_p**3 / (base_p**3 + (1 - base_p) ** 3)
        print(f"base P(a) = {base_p};  sharpened at 1/T=3: "
              f"empirical {sharp[(97,)] / 2000:.3f} vs exact {target_p:.3f}")
finally:
    os.unlink(child_path)

ref_server = os.path.join(os.path.dirname(__file__), "..", "frontend", "dist", "server.js")
if os.path.exists(ref_server):
    corpus = os.path.join(os.path.dirname(__file__), "..", "frontend", "fixtures",
                          "tiny_corpus.txt")
    with spawn_external_sampler(
            "node", [ref_server, "--corpus", corpus, "--k", "4"]) as ref:
        print("\nreference n-gram sampler handshake:", ref.handshake)
        print("one chunk:", bytes(ref.draw([], 1, seed=5)[0]).decode("utf-8", "replace"))
else:
    print("\n(frontend/dist/server.js not built; skipping the reference sampler)")
