"""Shared fixtures: reference pmfs and deterministic stub sampler sources."""

from __future__ import annotations

import math

import numpy as np
import pytest

from lfree.core import ExplicitCategorical, Outcome, SamplerSource, as_outcome

A, B, C, D = (0,), (1,), (2,), (3,)


@pytest.fixture
def three_atom() -> ExplicitCategorical:
    return ExplicitCategorical({A: 0.5, B: 0.3, C: 0.2})


@pytest.fixture
def two_atom_uniform() -> ExplicitCategorical:
    return ExplicitCategorical({A: 0.5, B: 0.5})


@pytest.fixture
def four_atom() -> ExplicitCategorical:
    return ExplicitCategorical({A: 0.4, B: 0.3, C: 0.2, D: 0.1})


@pytest.fixture
def degenerate() -> ExplicitCategorical:
    return ExplicitCategorical({A: 1.0})


class FixedBatchSource(SamplerSource):
    """Stub source replaying one fixed sample list on every call.

    Lets tests inject a frozen realized batch; the stub never consumes the
    caller's RNG, so downstream choice randomness is isolated.
    """

    kind = "stub"

    def __init__(self, batch):
        self.batch = [as_outcome(o) for o in batch]

    def draw_with_rng(self, context, count, rng):
        if count > len(self.batch):
            raise ValueError(f"stub holds {len(self.batch)} samples, asked for {count}")
        return list(self.batch[:count])


class PerfectPredictor(SamplerSource):
    """Stub that always emits the true next tokens of its corpus.

    The context must be a prefix of the corpus (teacher forcing); chunks
    past the corpus end are zero-padded, which evaluation never compares.
    """

    kind = "stub"

    def __init__(self, corpus, chunk_len: int):
        self.corpus = [int(t) for t in corpus]
        self.chunk_len = chunk_len

    def draw_with_rng(self, context, count, rng):
        t = len(context)
        chunk = self.corpus[t:t + self.chunk_len]
        chunk = chunk + [0] * (self.chunk_len - len(chunk))
        return [tuple(chunk)] * count


def binomial_sigma(p: float, trials: int) -> float:
    """Standard error of an empirical frequency of a Bernoulli(p) mean."""
    return math.sqrt(p * (1.0 - p) / trials)


def tv_3sigma_bound(dist: ExplicitCategorical, trials: int) -> float:
    """A conservative 3-sigma bound on TV(empirical, dist) at a sample size.

    TV is half the sum of per-outcome deviations, each with standard error
    sqrt(p(1-p)/n); the half-sum of 3-sigma terms bounds typical TV noise.
    """
    return 0.5 * sum(3.0 * binomial_sigma(p, trials) for _, p in dist.items())
