"""Batch-approximate temperature sampling and its convergence in batch size.

A single batch of N draws contains C(count, n) ways to pick n identical
samples of each outcome; choosing among outcomes proportionally to those
combination counts approximates sampling from P^n.  Small batches are
biased; growing N drives the output law onto the exact tempered target.
"""

from lfree import (
    ExplicitCategorical,
    ExplicitSampler,
    batch_temperature_sample,
    convergence_study,
)
from lfree.core import SamplerSource, as_outcome


class FrozenBatch(SamplerSource):
    """Replays one fixed batch, for auditing the deterministic part."""

    def __init__(self, batch):
        self.batch = [as_outcome(o) for o in batch]

    def draw_with_rng(self, context, count, rng):
        return list(self.batch[:count])


# The walkthrough batch: labels A..G mapped to token ids 0..6.
labels = {0: "A", 1: "B", 2: "C", 3: "D", 4: "E", 5: "F", 6: "G"}
worked = [[0], [2], [0], [3], [1], [4], [0], [5], [1], [6]]
trace = batch_temperature_sample(FrozenBatch(worked), n=2, batch_size=10, seed=1)

print("frozen batch:", "".join(labels[o[0]] for o in FrozenBatch(worked).batch))
print("candidates and combination weights:",
      {labels[o[0]]: w for o, w in trace.candidate_weights.items()})
print("used matching requirement m =", trace.used_m)
print("one audited draw:", labels[trace.chosen[0]])
print()

base = ExplicitCategorical({(0,): 0.5, (1,): 0.3, (2,): 0.2})
tv_by_size = convergence_study(base, n=2, batch_sizes=[2, 10, 100, 1000],
                               runs_per_size=20_000, seed=9)
print("TV distance to the exact P^2/Z target by batch size N (20k runs each):")
for size, tv in tv_by_size.items():
    bar = "#" * int(tv * 300)
    print(f"  N={size:>5}: {tv:.4f} {bar}")
print()
print("At N=2 the algorithm provably reproduces the base distribution itself;")
print("the bias vanishes as N grows (asymptotic unbiasedness).")
