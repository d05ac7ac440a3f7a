"""Independent brute-force oracles used by unit and acceptance tests.

Everything here is written from the definitions, with exact integer or
plain-Python arithmetic, deliberately not sharing code with the library
paths it checks.
"""

from __future__ import annotations

import itertools
import math
from collections import Counter, defaultdict

from lfree.core import ExplicitCategorical, Outcome


def oracle_tempered(entries: dict[Outcome, float], exponent: float) -> ExplicitCategorical:
    """Tempered pmf proportional to p^exponent, normalized by direct summation."""
    powered = {o: p ** exponent for o, p in entries.items()}
    z = math.fsum(powered.values())
    return ExplicitCategorical({o: v / z for o, v in powered.items()})


def enumerate_batch_algorithm_pmf(entries: dict[Outcome, float], n: int,
                                  batch_size: int) -> dict[Outcome, float]:
    """Exact output law of the batch-approximation draw at finite batch size.

    Sums over every ordered batch: per batch the candidate set, exact
    integer weights C(count, m) after the m-fallback, and the normalized
    choice probabilities are accumulated.  Exponential in batch_size; meant
    for tiny cases such as batch_size = 2.
    """
    out: dict[Outcome, float] = defaultdict(float)
    outcomes = sorted(entries)
    for batch in itertools.product(outcomes, repeat=batch_size):
        p_batch = 1.0
        for x in batch:
            p_batch *= entries[x]
        counts = Counter(batch)
        for m in range(n, 0, -1):
            cand = {x: math.comb(c, m) for x, c in counts.items() if c >= m}
            if cand:
                break
        total = sum(cand.values())
        for x, w in cand.items():
            out[x] += p_batch * w / total
    return dict(out)


def oracle_brier(entries: dict[Outcome, float], y: Outcome) -> float:
    """Brier score 2 P(y) - sum_x P(x)^2 from a plain dict."""
    return 2.0 * entries.get(y, 0.0) - math.fsum(p * p for p in entries.values())


def oracle_energy_distance(atoms_p: list[tuple[tuple[float, ...], float]],
                           atoms_q: list[tuple[tuple[float, ...], float]],
                           alpha: float) -> float:
    """E_{x~p, y~q} ||x - y||^alpha by explicit double loop."""
    total = 0.0
    for vp, pp in atoms_p:
        for vq, pq in atoms_q:
            dist = math.sqrt(math.fsum((a - b) ** 2 for a, b in zip(vp, vq)))
            total += pp * pq * dist ** alpha
    return total


def oracle_energy_score(atoms_p: list[tuple[tuple[float, ...], float]],
                        y: tuple[float, ...], alpha: float) -> float:
    """Energy score E||x'-x''||^a - 2 E||x-y||^a via the double-loop oracle."""
    pair = oracle_energy_distance(atoms_p, atoms_p, alpha)
    cross = oracle_energy_distance(atoms_p, [(tuple(y), 1.0)], alpha)
    return pair - 2.0 * cross
