"""Likelihood-free language-model evaluation with the Brier score.

The Brier score of a forecast P at outcome y, ``2 P(y) - sum_x P(x)^2``,
has an unbiased two-sample estimator ``I{x1=y} + I{x2=y} - I{x1=x2}`` with
x1, x2 drawn independently from P: the match indicators estimate the
accuracy term and the collision indicator estimates the uncertainty term.
Brier-n applies the estimator to whole n-grams as atomic outcomes;
BrierLM is 100 times the geometric mean of Brier-1..4.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import numpy as np

from .core import (
    ExplicitCategorical,
    Outcome,
    SamplerSource,
    SeedLike,
    as_outcome,
    make_rng,
)

__all__ = [
    "brier_sample_estimate",
    "exact_brier",
    "combine_brier_lm",
    "BrierAccumulator",
    "BrierReport",
    "evaluate_corpus",
    "byte_tokenize",
    "load_corpus",
]

BRIER_LM_ORDERS = (1, 2, 3, 4)


def brier_sample_estimate(x1: Outcome, x2: Outcome, y: Outcome) -> int:
    """Two-sample Brier estimate ``I{x1=y} + I{x2=y} - I{x1=x2}``.

    All three outcomes must have the same n-gram order; the value lies in
    {-1, 0, 1, 2} (x1 = x2 = y gives 1 + 1 - 1 = 1).
    """
    if not len(x1) == len(x2) == len(y):
        raise ValueError(
            f"ngram order mismatch: lengths {len(x1)}, {len(x2)}, {len(y)}")
    return int(x1 == y) + int(x2 == y) - int(x1 == x2)


def exact_brier(dist: ExplicitCategorical, y: Iterable[int]) -> float:
    """Closed-form Brier score ``2 P(y) - sum_x P(x)^2``.

    ``y`` may lie outside the support (P(y) = 0).  This is the oracle the
    estimator-unbiasedness tests compare against.
    """
    return 2.0 * dist.prob(y) - float((dist._probs ** 2).sum())


def combine_brier_lm(brier_n_values: Mapping[int, float]) -> float:
    """BrierLM composite: ``100 * (prod_{n=1..4} Brier-n)^0.25``.

    Clamped to 0 when any input is <= 0 (the geometric mean is undefined
    there and the 0..100 scale is preserved).
    """
    missing = [n for n in BRIER_LM_ORDERS if n not in brier_n_values]
    if missing:
        raise ValueError(f"missing Brier-n orders {missing}; need 1..4")
    values = [brier_n_values[n] for n in BRIER_LM_ORDERS]
    if any(v <= 0.0 for v in values):
        return 0.0
    product = 1.0
    for v in values:
        product *= v
    return 100.0 * product ** 0.25


class BrierAccumulator:
    """Running per-order indicator sums over corpus positions.

    Integer sums make the accumulator a mergeable monoid: positions may be
    evaluated in parallel and merged in any order.
    """

    def __init__(self, orders: Sequence[int] = BRIER_LM_ORDERS):
        self.orders = tuple(orders)
        self.sum_match1 = {n: 0 for n in self.orders}
        self.sum_match2 = {n: 0 for n in self.orders}
        self.sum_collision = {n: 0 for n in self.orders}
        self.positions = {n: 0 for n in self.orders}

    def update(self, order: int, x1: Outcome, x2: Outcome, y: Outcome) -> None:
        if not len(x1) == len(x2) == len(y) == order:
            raise ValueError(f"ngram order mismatch at order {order}")
        self.sum_match1[order] += int(x1 == y)
        self.sum_match2[order] += int(x2 == y)
        self.sum_collision[order] += int(x1 == x2)
        self.positions[order] += 1

    def merge(self, other: "BrierAccumulator") -> "BrierAccumulator":
        if self.orders != other.orders:
            raise ValueError("cannot merge accumulators with different orders")
        out = BrierAccumulator(self.orders)
        for n in self.orders:
            out.sum_match1[n] = self.sum_match1[n] + other.sum_match1[n]
            out.sum_match2[n] = self.sum_match2[n] + other.sum_match2[n]
            out.sum_collision[n] = self.sum_collision[n] + other.sum_collision[n]
            out.positions[n] = self.positions[n] + other.positions[n]
        return out

    def brier_n(self, order: int) -> Fraction:
        """(match1 + match2 - collision) / positions, exact."""
        pos = self.positions[order]
        if pos == 0:
            raise ValueError(f"no positions accumulated at order {order}")
        return Fraction(
            self.sum_match1[order] + self.sum_match2[order] - self.sum_collision[order], pos)

    def accuracy(self, order: int) -> Fraction:
        pos = self.positions[order]
        return Fraction(self.sum_match1[order] + self.sum_match2[order], 2 * pos)

    def collision(self, order: int) -> Fraction:
        return Fraction(self.sum_collision[order], self.positions[order])

    def report(self) -> "BrierReport":
        brier = {n: float(self.brier_n(n)) for n in self.orders}
        lm = combine_brier_lm(brier) if set(BRIER_LM_ORDERS) <= set(self.orders) else None
        return BrierReport(
            brier_n=brier,
            brier_lm=lm,
            accuracy={n: float(self.accuracy(n)) for n in self.orders},
            collision={n: float(self.collision(n)) for n in self.orders},
            positions=self.positions[min(self.orders)],
            sums={n: (self.sum_match1[n], self.sum_match2[n],
                      self.sum_collision[n], self.positions[n])
                  for n in self.orders},
        )


@dataclass(frozen=True)
class BrierReport:
    """Per-order Brier scores, their accuracy/collision decomposition, and BrierLM.

    ``positions`` is the number of evaluated positions at order 1; higher
    orders may have fewer (end-of-corpus partial n-grams are skipped per
    order).  ``sums`` keeps the raw integer sums ``(match1, match2,
    collision, positions)`` per order so the decomposition identity
    ``brier_n = 2*accuracy_n - collision_n`` can be audited exactly.
    """

    brier_n: dict[int, float]
    brier_lm: float | None
    accuracy: dict[int, float]
    collision: dict[int, float]
    positions: int
    sums: dict[int, tuple[int, int, int, int]] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "brier_n": {str(n): v for n, v in sorted(self.brier_n.items())},
            "brier_lm": self.brier_lm,
            "accuracy": {str(n): v for n, v in sorted(self.accuracy.items())},
            "collision": {str(n): v for n, v in sorted(self.collision.items())},
            "positions": self.positions,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    def to_table(self) -> str:
        lines = [f"{'order':>5}  {'brier_n':>10}  {'accuracy':>10}  {'collision':>10}  {'positions':>9}"]
        for n in sorted(self.brier_n):
            lines.append(f"{n:>5}  {self.brier_n[n]:>10.6f}  {self.accuracy[n]:>10.6f}  "
                         f"{self.collision[n]:>10.6f}  {self.sums[n][3] if self.sums else self.positions:>9}")
        lm = "undefined" if self.brier_lm is None else f"{self.brier_lm:.4f}"
        lines.append(f"BrierLM: {lm}")
        return "\n".join(lines)


def byte_tokenize(text: str | bytes) -> list[int]:
    """Demo tokenizer: UTF-8 bytes as token ids (vocab 256)."""
    data = text.encode("utf-8") if isinstance(text, str) else bytes(text)
    return list(data)


def load_corpus(path: str, fmt: str = "auto") -> list[int]:
    """Load a token-id corpus.

    ``fmt='jsonl'``: newline-delimited JSON, each line an array of integer
    token ids, concatenated in order.  ``fmt='text'``: raw UTF-8 text through
    the byte-level tokenizer.  ``fmt='auto'`` picks jsonl when the first
    non-empty line parses as a JSON array.
    """
    with open(path, "rb") as fh:
        raw = fh.read()
    if fmt == "auto":
        first = next((ln for ln in raw.decode("utf-8", "replace").splitlines() if ln.strip()), "")
        try:
            fmt = "jsonl" if isinstance(json.loads(first), list) else "text"
        except (json.JSONDecodeError, ValueError):
            fmt = "text"
    if fmt == "text":
        return byte_tokenize(raw)
    if fmt != "jsonl":
        raise ValueError(f"unknown corpus format {fmt!r}")
    tokens: list[int] = []
    for ln_no, line in enumerate(raw.decode("utf-8").splitlines(), 1):
        if not line.strip():
            continue
        row = json.loads(line)
        if not isinstance(row, list):
            raise ValueError(f"{path}:{ln_no}: expected a JSON array of token ids")
        tokens.extend(as_outcome(row))
    return tokens


def _draw_continuation(source: SamplerSource, context: Sequence[int],
                       need: int, rng: np.random.Generator) -> tuple[int, ...]:
    """One sampled continuation of >= need tokens, chunk by chunk.

    Each extra chunk conditions on the context extended with previously
    sampled tokens, so multi-chunk continuations stay autoregressive.  The
    context is only copied when a second chunk is actually needed.
    """
    chunk = source.draw_with_rng(context, 1, rng)[0]
    if len(chunk) >= need:
        return chunk[:need]
    tokens = list(chunk)
    ctx = list(context) + tokens
    while len(tokens) < need:
        chunk = source.draw_with_rng(ctx, 1, rng)[0]
        tokens.extend(chunk)
        ctx.extend(chunk)
    return tuple(tokens[:need])


def evaluate_corpus(
    source: SamplerSource,
    corpus: Sequence[int],
    chunk_len: int,
    max_order: int = 4,
    stride: int = 1,
    seed: SeedLike = 0,
) -> BrierReport:
    """Teacher-forced Brier-n evaluation of a sampler over a corpus.

    At each position t (stepping by ``stride``) the source is conditioned on
    the ground-truth prefix ``corpus[:t]`` and two independent continuations
    of ``max_order`` tokens are drawn (requesting ceil(max_order/chunk_len)
    chunks each); for every order n the first n sampled tokens are compared
    with ``corpus[t:t+n]``.  Positions with fewer than n ground-truth tokens
    remaining are skipped for that order, not padded.

    One sampled pair is reused across all orders at a position: the
    estimator stays unbiased per order and the draw cost is halved compared
    to fresh pairs per order.
    """
    corpus = [int(t) for t in corpus]
    if max_order < 1:
        raise ValueError("max_order must be >= 1")
    if chunk_len < 1:
        raise ValueError("chunk_len must be >= 1")
    if stride < 1:
        raise ValueError("stride must be >= 1")
    if len(corpus) < max_order + 1:
        raise ValueError(
            f"corpus of {len(corpus)} tokens shorter than max_order+1 = {max_order + 1}")

    acc = BrierAccumulator(orders=range(1, max_order + 1))
    positions = range(0, len(corpus), stride)
    # Independent per-position seeds drawn up front: evaluation order (or a
    # parallel split) cannot change the merged result.
    master = make_rng(seed)
    pos_seeds = master.integers(0, 2**63, size=len(positions))

    # The ground-truth prefix grows in place; sources receive it read-only
    # and must not hold a reference past the call.
    prefix: list[int] = []
    for pos_idx, t in enumerate(positions):
        remaining = len(corpus) - t
        if remaining < 1:
            break
        prefix.extend(corpus[len(prefix):t])
        rng = np.random.default_rng(int(pos_seeds[pos_idx]))
        need = min(max_order, remaining)
        x1 = _draw_continuation(source, prefix, need, rng)
        x2 = _draw_continuation(source, prefix, need, rng)
        for n in range(1, max_order + 1):
            if t + n > len(corpus):
                break
            acc.update(n, x1[:n], x2[:n], tuple(corpus[t:t + n]))
    return acc.report()
