"""Approximate low-temperature sampling by combinatorial search in a batch.

For integer targets T = 1/n, draws one batch of N samples (N >> n), treats
every way of picking n identical samples as a candidate, and outputs an
outcome with probability proportional to its number of such combinations
C(count, n).  If no outcome reaches n occurrences the matching requirement
falls back to n-1, n-2, ... (m = 1 always succeeds).  The draw is biased at
finite N but asymptotically unbiased as N grows.
"""

from __future__ import annotations

import json
import math
from collections import Counter
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import (
    ExplicitCategorical,
    ExplicitSampler,
    Outcome,
    SamplerSource,
    SeedLike,
    make_rng,
    tv_distance,
)
from .temp_exact import InverseTemperature, target_distribution

__all__ = [
    "BatchSampleTrace",
    "batch_temperature_sample",
    "convergence_study",
    "falling_binomial",
]


def falling_binomial(count: int, m: int) -> float:
    """C(count, m) via the multiplicative form count*(count-1)*.../m!.

    Computed in floating point: counts of order 1e5 with m up to ~8 overflow
    64-bit integers, and the weighted choice only needs weight ratios.
    """
    if m < 0 or count < m:
        return 0.0
    acc = 1.0
    for j in range(m):
        acc *= count - j
    return acc / math.factorial(m)


@dataclass(frozen=True)
class BatchSampleTrace:
    """Full audit record of one batch-approximation draw."""

    batch_size: int
    target_n: int
    counts: dict[Outcome, int]
    used_m: int
    candidate_weights: dict[Outcome, float]
    chosen: Outcome

    def to_json(self) -> str:
        """Serialize for audit; outcome keys become token-id arrays."""
        payload = {
            "batch_size": self.batch_size,
            "target_n": self.target_n,
            "used_m": self.used_m,
            "counts": [[list(o), c] for o, c in sorted(self.counts.items())],
            "weights": [[list(o), w] for o, w in sorted(self.candidate_weights.items())],
            "chosen": list(self.chosen),
        }
        return json.dumps(payload)


def _counts_from_batch(source: SamplerSource, batch_size: int,
                       context: Sequence[int], rng: np.random.Generator) -> dict[Outcome, int]:
    if isinstance(source, ExplicitSampler):
        idx = source.draw_indices(batch_size, rng)
        bc = np.bincount(idx, minlength=source.dist.support_size)
        outcomes = source.dist._outcomes
        return {outcomes[i]: int(c) for i, c in enumerate(bc) if c > 0}
    return dict(Counter(source.draw_with_rng(context, batch_size, rng)))


def batch_temperature_sample(
    source: SamplerSource,
    n: int,
    batch_size: int,
    seed: SeedLike,
    context: Sequence[int] = (),
) -> BatchSampleTrace:
    """One approximate draw targeting P(x)^n / Z via an N-sample batch.

    Only integer n (T = 1/n) is supported.  ``batch_size >> n`` is
    recommended; any ``batch_size >= 1`` is accepted and the m-fallback
    guarantees an output.
    """
    if n < 1:
        raise ValueError(f"target n must be a positive integer, got {n}")
    if batch_size < 1:
        raise ValueError(f"batch_size must be >= 1, got {batch_size}")
    rng = make_rng(seed)
    counts = _counts_from_batch(source, batch_size, context, rng)

    for m in range(n, 0, -1):
        candidates = sorted(o for o, c in counts.items() if c >= m)
        if candidates:
            break
    weights = {o: falling_binomial(counts[o], m) for o in candidates}

    # Single uniform against the cumulative weight sum, in sorted outcome
    # order, so the choice is a deterministic function of (batch, uniform).
    total = math.fsum(weights.values())
    u = rng.random() * total
    acc = 0.0
    chosen = candidates[-1]
    for o in candidates:
        acc += weights[o]
        if u < acc:
            chosen = o
            break

    return BatchSampleTrace(
        batch_size=batch_size,
        target_n=n,
        counts=counts,
        used_m=m,
        candidate_weights=weights,
        chosen=chosen,
    )


def convergence_study(
    dist: ExplicitCategorical,
    n: int,
    batch_sizes: Sequence[int],
    runs_per_size: int,
    seed: SeedLike,
) -> dict[int, float]:
    """TV distance between the batch algorithm's output law and P^n / Z.

    For each batch size N (ascending), estimates the output distribution
    from ``runs_per_size`` independent draws and reports its TV distance to
    the exact tempered target.
    """
    if list(batch_sizes) != sorted(batch_sizes):
        raise ValueError("batch_sizes must be ascending")
    if runs_per_size < 1:
        raise ValueError("runs_per_size must be >= 1")
    target = target_distribution(dist, InverseTemperature(n, 1))
    source = ExplicitSampler(dist)
    rng = make_rng(seed)
    result: dict[int, float] = {}
    for size in batch_sizes:
        chosen_counts: Counter[Outcome] = Counter()
        for _ in range(runs_per_size):
            trace = batch_temperature_sample(source, n, size, rng)
            chosen_counts[trace.chosen] += 1
        emp = ExplicitCategorical({o: c / runs_per_size for o, c in chosen_counts.items()})
        result[size] = tv_distance(emp, target)
    return result
