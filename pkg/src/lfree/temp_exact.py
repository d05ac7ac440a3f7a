"""Exact likelihood-free temperature sampling and its cost analytics.

Given only a black-box sampler for a discrete distribution P, draws exact
samples from the sharpened distribution P(x)^(1/T) / Z_T for T in (0, 1).
The inverse temperature is decomposed into its integer part n (handled by
an n-identical-draws rejection stage) and fractional part alpha (handled by
a Bernoulli-factory stage that accepts the candidate with probability
P(candidate)^alpha).

RNG interleaving (replayability contract)
-----------------------------------------
One master generator drives a whole sampling run.  Explicit sources draw
inline from that stream (stage 1 consumes one uniform per base draw via a
single vectorized call, stage 2 one uniform per draw); external sources
consume one 63-bit integer from the stream per request as the forwarded
wire seed.  The stage-2 accept/restart uniform comes from the same stream,
drawn immediately after the mismatching base draw.  A run is therefore a
pure function of the generator state, and a fresh run started from any
post-restart state reproduces the original run's remaining behavior.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .core import (
    ExplicitCategorical,
    ExplicitSampler,
    Outcome,
    SamplerSource,
    SeedLike,
    make_rng,
)

__all__ = [
    "InverseTemperature",
    "CallBudgetExhausted",
    "CostReport",
    "exact_temperature_sample",
    "target_distribution",
    "expected_calls",
    "cost_bound",
    "run_cost_experiment",
    "stage2_acceptance_probe",
    "DEFAULT_CALL_BUDGET",
]

# Converts a pathological rejection regime into a diagnosable error instead
# of an unbounded loop; configurable per call.
DEFAULT_CALL_BUDGET = 10**6


class CallBudgetExhausted(RuntimeError):
    """Raised when acceptance did not happen within the call budget."""

    def __init__(self, calls_used: int, budget: int):
        super().__init__(f"call budget exhausted: {calls_used} base-sampler calls "
                         f"used of budget {budget} without acceptance")
        self.calls_used = calls_used
        self.budget = budget


@dataclass(frozen=True)
class InverseTemperature:
    """Exact rational inverse temperature 1/T = numerator/denominator.

    Kept rational rather than float: whether the fractional part is exactly
    zero selects the algorithm branch (stage 2 skipped entirely) and the
    indicator term in the expected-call formula, so a float's 4e-16 residue
    would silently change both.
    """

    numerator: int
    denominator: int

    def __post_init__(self):
        if self.numerator <= 0 or self.denominator <= 0:
            raise ValueError("numerator and denominator must be positive")
        if self.numerator <= self.denominator:
            raise ValueError(
                f"1/T = {self.numerator}/{self.denominator} must exceed 1 (requires T in (0,1))")

    @classmethod
    def parse(cls, text: str) -> "InverseTemperature":
        """Parse a 'p/q' or 'p' string (e.g. '5/2', '3')."""
        parts = text.strip().split("/")
        if len(parts) == 1:
            return cls(int(parts[0]), 1)
        if len(parts) == 2:
            return cls(int(parts[0]), int(parts[1]))
        raise ValueError(f"cannot parse inverse temperature {text!r}, expected 'p/q'")

    @property
    def value(self) -> Fraction:
        return Fraction(self.numerator, self.denominator)

    @property
    def n(self) -> int:
        """Integer part, floor(1/T) >= 1."""
        return self.numerator // self.denominator

    @property
    def alpha_frac(self) -> Fraction:
        """Exact fractional part of 1/T, in [0, 1)."""
        return self.value - self.n

    @property
    def temperature(self) -> float:
        return float(Fraction(self.denominator, self.numerator))

    def __str__(self) -> str:
        return f"{self.numerator}/{self.denominator}"


def exact_temperature_sample(
    source: SamplerSource,
    inv_temp: InverseTemperature,
    seed: SeedLike,
    call_budget: int = DEFAULT_CALL_BUDGET,
    context: Sequence[int] = (),
    restart_log: Optional[list] = None,
) -> tuple[Outcome, int]:
    """Draw one sample distributed as P(x)^(1/T) / Z_T from a black-box source.

    Returns ``(outcome, calls_used)`` where ``calls_used`` counts every base
    sampler draw across all restarts (stage-2 accept/restart uniforms are
    not counted).  Raises :class:`CallBudgetExhausted` if acceptance does
    not occur within ``call_budget`` base draws.

    ``restart_log``, if a list, receives ``(calls_so_far, generator_state)``
    after every rejection; replaying from any logged state reproduces the
    rest of the run (restart purity).
    """
    n = inv_temp.n
    alpha = inv_temp.alpha_frac
    if call_budget < n:
        raise ValueError(f"call_budget {call_budget} < stage-1 draw count {n}")
    rng = make_rng(seed)

    # Atom representation: support indices for explicit sources (cheap
    # equality and batch draws), Outcome tuples otherwise.
    if isinstance(source, ExplicitSampler):
        draw_atoms = lambda k: source.draw_indices(k, rng)
        finalize = lambda a: source.dist._outcomes[int(a)]
    else:
        draw_atoms = lambda k: source.draw_with_rng(context, k, rng)
        finalize = lambda a: a

    alpha_f = float(alpha)
    has_frac = alpha != 0
    calls = 0

    def log_restart():
        if restart_log is not None:
            restart_log.append((calls, rng.bit_generator.state))

    while True:
        # Stage 1: n identical draws isolate a candidate with prob P(x)^n.
        if calls + n > call_budget:
            raise CallBudgetExhausted(calls, call_budget)
        batch = draw_atoms(n)
        calls += n
        candidate = batch[0]
        if n > 1 and not all(x == candidate for x in batch[1:]):
            log_restart()
            continue
        if not has_frac:
            return finalize(candidate), calls

        # Stage 2: Bernoulli factory accepting with prob P(candidate)^alpha.
        i = 1
        accepted = False
        while True:
            if calls + 1 > call_budget:
                raise CallBudgetExhausted(calls, call_budget)
            x = draw_atoms(1)[0]
            calls += 1
            if x == candidate:
                accepted = True
                break
            if rng.random() < alpha_f / i:
                break  # reject; whole process restarts
            i += 1
        if accepted:
            return finalize(candidate), calls
        log_restart()


def target_distribution(dist: ExplicitCategorical,
                        inv_temp: InverseTemperature) -> ExplicitCategorical:
    """Exact tempered pmf P(x)^(1/T) / Z_T; the oracle for all sampling tests."""
    exponent = float(inv_temp.value)
    powered = dist._probs ** exponent
    powered = powered / powered.sum()
    return ExplicitCategorical({o: float(p) for o, p in zip(dist.outcomes, powered)})


def _partition(dist: ExplicitCategorical, inv_temp: InverseTemperature) -> float:
    return float((dist._probs ** float(inv_temp.value)).sum())


def expected_calls(dist: ExplicitCategorical, inv_temp: InverseTemperature) -> float:
    """Closed-form expected base-sampler calls per accepted sample.

    ``(n + I(alpha>0) * sum_x P(x)^(1/T - 1)) / Z_T``.
    """
    z = _partition(dist, inv_temp)
    numer = float(inv_temp.n)
    if inv_temp.alpha_frac != 0:
        numer += float((dist._probs ** (float(inv_temp.value) - 1.0)).sum())
    return numer / z


def cost_bound(dist: ExplicitCategorical, inv_temp: InverseTemperature) -> float:
    """Upper bound on :func:`expected_calls`.

    ``(1 + n) / Z_T`` in the low-temperature regime (T <= 0.5, i.e. 1/T >= 2)
    and ``(1 + |X|^(2 - 1/T)) / Z_T`` for 0.5 < T < 1, with |X| the support
    size of ``dist``.
    """
    z = _partition(dist, inv_temp)
    if inv_temp.value >= 2:
        return (1.0 + inv_temp.n) / z
    size = dist.support_size
    return (1.0 + size ** (2.0 - float(inv_temp.value))) / z


@dataclass(frozen=True)
class CostReport:
    """Empirical vs. theoretical sampling cost for one (pmf, 1/T) point."""

    theoretical_expected_calls: float
    empirical_mean_calls: float
    trials: int
    bound: float
    regime: str  # "low_temp" (T <= 0.5) or "high_temp" (0.5 < T < 1)


def run_cost_experiment(
    dist: ExplicitCategorical,
    inv_temp: InverseTemperature,
    trials: int,
    seed: SeedLike,
    call_budget: int = 10**8,
) -> CostReport:
    """Average ``calls_used`` over ``trials`` accepted samples.

    The default budget is a hard cap that is unlimited in practice; hitting
    it propagates :class:`CallBudgetExhausted`.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    rng = make_rng(seed)
    source = ExplicitSampler(dist)
    total = 0
    for _ in range(trials):
        _, calls = exact_temperature_sample(source, inv_temp, rng, call_budget)
        total += calls
    regime = "low_temp" if inv_temp.value >= 2 else "high_temp"
    return CostReport(
        theoretical_expected_calls=expected_calls(dist, inv_temp),
        empirical_mean_calls=total / trials,
        trials=trials,
        bound=cost_bound(dist, inv_temp),
        regime=regime,
    )


def stage2_acceptance_probe(p: float, alpha, trials: int, seed: SeedLike) -> float:
    """Empirical acceptance frequency of an isolated stage-2 pass.

    Simulates the fractional-exponent stage against a synthetic two-outcome
    sampler in which the candidate reappears with probability ``p``: at
    iteration i a draw matches with probability p (accept); otherwise a
    uniform u rejects when u < alpha/i, else the loop continues.  The
    acceptance frequency converges to ``p**alpha``.

    Trials are advanced in lockstep (all active trials per iteration), which
    changes only the order of stream consumption, not the law.
    """
    if not 0.0 < p <= 1.0:
        raise ValueError(f"p must be in (0, 1], got {p}")
    alpha_f = float(alpha)
    if not 0.0 < alpha_f < 1.0:
        raise ValueError(f"alpha must be in (0, 1), got {alpha}")
    if trials < 1:
        raise ValueError("trials must be >= 1")
    rng = make_rng(seed)
    active = trials
    accepted = 0
    i = 1
    while active > 0:
        matched = int((rng.random(active) < p).sum())
        accepted += matched
        remaining = active - matched
        rejected = int((rng.random(remaining) < alpha_f / i).sum())
        active = remaining - rejected
        i += 1
    return accepted / trials
