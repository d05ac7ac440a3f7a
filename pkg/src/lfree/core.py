"""Shared domain types: outcomes, explicit categorical distributions, samplers.

Randomness contract
-------------------
All stochastic operations take a ``seed`` argument that is either a 64-bit
unsigned integer or a ``numpy.random.Generator``.  Integers construct a
PCG64 generator via ``numpy.random.default_rng``; passing a Generator
continues its stream.  Identical seed + identical call sequence yields a
bit-identical sample stream.  Parallel work must derive independent child
seeds deterministically (e.g. ``numpy.random.SeedSequence(seed).spawn(k)``
or a pre-drawn array of per-task seeds) so that merged results do not
depend on scheduling order.
"""

from __future__ import annotations

import json
import math
import os
from collections import Counter
from typing import Iterable, Mapping, Sequence, Union

import numpy as np

__all__ = [
    "Outcome",
    "SeedLike",
    "as_outcome",
    "make_rng",
    "ExplicitCategorical",
    "SamplerSource",
    "ExplicitSampler",
    "sample_categorical",
    "tv_distance",
    "empirical_pmf",
    "load_pmf",
    "save_pmf",
]

# An outcome is one atomic discrete sample: a non-empty tuple of token ids.
# Tuples give element-wise equality, hashing, and lexicographic order for free.
Outcome = tuple[int, ...]

SeedLike = Union[int, np.random.Generator]

PROB_SUM_TOL = 1e-9

_MAX_SEED = 2**64


def as_outcome(tokens: Iterable[int]) -> Outcome:
    """Validate and normalize a token sequence into an Outcome tuple."""
    out = tuple(int(t) for t in tokens)
    if len(out) == 0:
        raise ValueError("outcome must contain at least one token")
    if any(t < 0 for t in out):
        raise ValueError(f"token ids must be non-negative, got {out}")
    return out


def make_rng(seed: SeedLike) -> np.random.Generator:
    """Return a PCG64 Generator for ``seed``, or ``seed`` itself if already one."""
    if isinstance(seed, np.random.Generator):
        return seed
    seed = int(seed)
    if not 0 <= seed < _MAX_SEED:
        raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed}")
    return np.random.default_rng(seed)


class ExplicitCategorical:
    """A finite pmf over Outcomes; the ground truth for all statistical tests.

    Entries with probability zero are pruned on construction, probabilities
    must be finite, non-negative, and sum to 1 within ``PROB_SUM_TOL``.
    Outcomes are kept in sorted order so every iteration over the support is
    deterministic.  Instances are immutable.
    """

    __slots__ = ("_outcomes", "_probs", "_cumulative", "_index")

    def __init__(self, entries: Mapping[Iterable[int], float]):
        items = [(as_outcome(o), float(p)) for o, p in entries.items()]
        if len({o for o, _ in items}) != len(items):
            raise ValueError("duplicate outcomes in pmf")
        for o, p in items:
            if math.isnan(p):
                raise ValueError(f"NaN probability for outcome {o}")
            if p < 0.0:
                raise ValueError(f"negative probability {p} for outcome {o}")
            if p > 1.0 + PROB_SUM_TOL:
                raise ValueError(f"probability {p} > 1 for outcome {o}")
        total = math.fsum(p for _, p in items)
        if abs(total - 1.0) > PROB_SUM_TOL:
            raise ValueError(f"probabilities sum to {total!r}, expected 1 within {PROB_SUM_TOL}")
        items = sorted((o, p) for o, p in items if p > 0.0)
        if not items:
            raise ValueError("pmf has empty support")
        object.__setattr__(self, "_outcomes", tuple(o for o, _ in items))
        object.__setattr__(self, "_probs", np.array([p for _, p in items], dtype=np.float64))
        cum = np.cumsum(self._probs)
        cum[-1] = 1.0  # guard searchsorted against fp round-off at the top
        object.__setattr__(self, "_cumulative", cum)
        object.__setattr__(self, "_index", {o: i for i, (o, _) in enumerate(items)})

    def __setattr__(self, name, value):
        raise AttributeError("ExplicitCategorical is immutable")

    @property
    def outcomes(self) -> tuple[Outcome, ...]:
        return self._outcomes

    @property
    def probs(self) -> np.ndarray:
        return self._probs.copy()

    @property
    def support_size(self) -> int:
        return len(self._outcomes)

    def prob(self, outcome: Iterable[int]) -> float:
        """P(outcome); 0.0 for outcomes outside the support."""
        i = self._index.get(as_outcome(outcome))
        return float(self._probs[i]) if i is not None else 0.0

    def items(self) -> list[tuple[Outcome, float]]:
        return [(o, float(p)) for o, p in zip(self._outcomes, self._probs)]

    def __len__(self) -> int:
        return len(self._outcomes)

    def __eq__(self, other) -> bool:
        if not isinstance(other, ExplicitCategorical):
            return NotImplemented
        return self._outcomes == other._outcomes and np.array_equal(self._probs, other._probs)

    def __hash__(self):
        return hash((self._outcomes, self._probs.tobytes()))

    def __repr__(self) -> str:
        body = ", ".join(f"{o}: {p:.6g}" for o, p in self.items())
        return f"ExplicitCategorical({{{body}}})"


class SamplerSource:
    """A black-box source of i.i.d. Outcomes, optionally context-conditioned.

    Subclasses implement ``draw_with_rng``; ``draw`` is the stateless public
    entry point.  Draws are i.i.d. given a fixed context: no state is carried
    between calls apart from the RNG stream the caller supplies.
    """

    kind = "abstract"

    def draw(self, context: Sequence[int], count: int, seed: SeedLike) -> list[Outcome]:
        if count < 1:
            raise ValueError(f"count must be >= 1, got {count}")
        return self.draw_with_rng(context, count, make_rng(seed))

    def draw_with_rng(self, context: Sequence[int], count: int,
                      rng: np.random.Generator) -> list[Outcome]:
        raise NotImplementedError


class ExplicitSampler(SamplerSource):
    """Reference sampler for an ExplicitCategorical (context-free)."""

    kind = "explicit"

    def __init__(self, dist: ExplicitCategorical):
        self.dist = dist

    def draw_indices(self, count: int, rng: np.random.Generator) -> np.ndarray:
        """Draw ``count`` support indices; fast path used by the samplers."""
        return np.searchsorted(self.dist._cumulative, rng.random(count), side="right")

    def draw_with_rng(self, context: Sequence[int], count: int,
                      rng: np.random.Generator) -> list[Outcome]:
        outcomes = self.dist._outcomes
        return [outcomes[i] for i in self.draw_indices(count, rng)]


def sample_categorical(dist: ExplicitCategorical, count: int, seed: SeedLike) -> list[Outcome]:
    """Draw ``count`` i.i.d. Outcomes from an explicit pmf."""
    return ExplicitSampler(dist).draw((), count, seed)


def tv_distance(p: ExplicitCategorical, q: ExplicitCategorical) -> float:
    """Total variation distance ``0.5 * sum_x |p(x) - q(x)|`` over the union support."""
    support = set(p.outcomes) | set(q.outcomes)
    return 0.5 * math.fsum(abs(p.prob(x) - q.prob(x)) for x in support)


def empirical_pmf(samples: Sequence[Outcome]) -> ExplicitCategorical:
    """Normalized frequency distribution of a non-empty sample list."""
    if len(samples) == 0:
        raise ValueError("no samples")
    counts = Counter(as_outcome(s) for s in samples)
    n = len(samples)
    return ExplicitCategorical({o: c / n for o, c in counts.items()})


def load_pmf(path: str) -> ExplicitCategorical:
    """Load a pmf from JSON: ``{"outcomes": [[int,...],...], "probs": [...]}``.

    The arrays are parallel.  Rejects NaN, negative probabilities, and
    duplicate outcomes; prunes exact zeros.
    """
    with open(path, "r", encoding="utf-8") as fh:
        data = json.load(fh)
    if not isinstance(data, dict) or "outcomes" not in data or "probs" not in data:
        raise ValueError(f"{path}: expected object with 'outcomes' and 'probs'")
    outcomes, probs = data["outcomes"], data["probs"]
    if len(outcomes) != len(probs):
        raise ValueError(f"{path}: outcomes and probs must be parallel arrays")
    entries: dict[Outcome, float] = {}
    for o, p in zip(outcomes, probs):
        key = as_outcome(o)
        if key in entries:
            raise ValueError(f"{path}: duplicate outcome {key}")
        entries[key] = float(p)
    return ExplicitCategorical(entries)


def save_pmf(dist: ExplicitCategorical, path: str) -> None:
    """Write a pmf in the JSON file format accepted by :func:`load_pmf`."""
    payload = {
        "outcomes": [list(o) for o in dist.outcomes],
        "probs": [float(p) for p in dist._probs],
    }
    tmp = path + ".tmp"
    with open(tmp, "w", encoding="utf-8") as fh:
        json.dump(payload, fh)
        fh.write("\n")
    os.replace(tmp, path)
