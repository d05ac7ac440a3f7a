"""Energy score and energy-loss estimation over real vectors.

Two sign conventions live here and are named apart deliberately:

* :func:`exact_energy_score` is the score (higher is better),
  ``S(P, y) = E||x' - x''||^a - 2 E||x - y||^a`` with x, x', x'' ~ P.
  It is strictly proper for exponents a in (0, 2) and merely proper at
  a = 2.
* :func:`energy_loss` is the Monte Carlo training loss (lower is better):
  with N model samples and M target samples it estimates
  ``2 E||x - y||^a - E||x' - x''||^a``, i.e. the negated score with the
  observation replaced by a target-sample expectation.

The exponent is called ``energy_alpha`` throughout so it cannot be confused
with the fractional exponent of the temperature sampler.
"""

from __future__ import annotations

import json
from typing import Iterable, Mapping, Sequence

import numpy as np
from scipy.spatial.distance import cdist

__all__ = [
    "VectorBatch",
    "DiscreteVectorDist",
    "energy_loss",
    "sequence_energy_loss",
    "exact_energy_score",
    "expected_energy_score",
    "propriety_probe",
    "load_vector_batches",
]


def _check_alpha(energy_alpha: float) -> float:
    a = float(energy_alpha)
    if not 0.0 < a <= 2.0:
        raise ValueError(f"energy_alpha must be in (0, 2], got {energy_alpha}")
    return a


def _as_matrix(rows, name: str) -> np.ndarray:
    arr = np.asarray(rows, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr.reshape(len(arr), 1) if arr.size else arr.reshape(0, 1)
    if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ValueError(f"{name} must be a non-empty 2-D array of vectors")
    if not np.isfinite(arr).all():
        raise ValueError(f"{name} contains NaN or infinite components")
    return arr


class VectorBatch:
    """N model samples and M target samples sharing one vector dimension."""

    def __init__(self, model_samples, target_samples):
        model = _as_matrix(model_samples, "model_samples")
        target = _as_matrix(target_samples, "target_samples")
        if model.shape[0] < 2:
            raise ValueError("pairwise term undefined: need N >= 2 model samples")
        if model.shape[1] != target.shape[1]:
            raise ValueError(
                f"dimension mismatch: model vectors have {model.shape[1]} components, "
                f"target vectors have {target.shape[1]}")
        self.model_samples = model
        self.target_samples = target

    @property
    def n_model(self) -> int:
        return self.model_samples.shape[0]

    @property
    def n_target(self) -> int:
        return self.target_samples.shape[0]

    @property
    def dim(self) -> int:
        return self.model_samples.shape[1]


def energy_loss(batch: VectorBatch, energy_alpha: float = 1.0) -> float:
    """Single-position energy loss.

    ``(2/(N M)) sum_{m,n} ||z_m - zt_n||^a
    - (1/(N (N-1))) sum_{n != k} ||zt_n - zt_k||^a``
    with Euclidean norms; the n != k sum runs over ordered pairs.
    """
    a = _check_alpha(energy_alpha)
    model, target = batch.model_samples, batch.target_samples
    n, m = batch.n_model, batch.n_target
    cross = cdist(target, model) ** a
    pairwise = cdist(model, model) ** a  # zero diagonal: summing all entries
    return float(2.0 / (n * m) * cross.sum() - pairwise.sum() / (n * (n - 1)))


def sequence_energy_loss(batches: Sequence[VectorBatch], energy_alpha: float = 1.0) -> float:
    """Sum of per-position energy losses over a sequence of batches."""
    if len(batches) == 0:
        raise ValueError("batches must be non-empty")
    return float(sum(energy_loss(b, energy_alpha) for b in batches))


class DiscreteVectorDist:
    """A finite pmf over real vectors; the oracle substrate for exact expectations."""

    def __init__(self, atoms: Mapping[Iterable[float], float] | Sequence[tuple]):
        pairs = list(atoms.items()) if isinstance(atoms, Mapping) else list(atoms)
        if not pairs:
            raise ValueError("atom set must be non-empty")
        vectors = _as_matrix([v for v, _ in pairs], "atoms")
        probs = np.array([float(p) for _, p in pairs], dtype=np.float64)
        if np.isnan(probs).any() or (probs < 0).any():
            raise ValueError("atom probabilities must be finite and non-negative")
        if abs(probs.sum() - 1.0) > 1e-9:
            raise ValueError(f"atom probabilities sum to {probs.sum()!r}, expected 1")
        keep = probs > 0
        self.vectors = vectors[keep]
        self.probs = probs[keep]

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]

    def sample(self, count: int, rng: np.random.Generator) -> np.ndarray:
        idx = np.searchsorted(np.cumsum(self.probs), rng.random(count), side="right")
        idx = np.minimum(idx, len(self.probs) - 1)
        return self.vectors[idx]


def exact_energy_score(p: DiscreteVectorDist, y, energy_alpha: float = 1.0) -> float:
    """Exact score ``E||x'-x''||^a - 2 E||x-y||^a`` by support enumeration."""
    a = _check_alpha(energy_alpha)
    y_vec = np.asarray(y, dtype=np.float64).reshape(1, -1)
    if y_vec.shape[1] != p.dim:
        raise ValueError(f"observation has dimension {y_vec.shape[1]}, pmf has {p.dim}")
    pair = p.probs @ (cdist(p.vectors, p.vectors) ** a) @ p.probs
    cross = p.probs @ (cdist(p.vectors, y_vec) ** a).ravel()
    return float(pair - 2.0 * cross)


def expected_energy_score(p: DiscreteVectorDist, q: DiscreteVectorDist,
                          energy_alpha: float = 1.0) -> float:
    """``E_{y ~ q}[S(p, y)]`` by exact enumeration over both supports."""
    a = _check_alpha(energy_alpha)
    if p.dim != q.dim:
        raise ValueError("distributions must share the ambient dimension")
    pair = p.probs @ (cdist(p.vectors, p.vectors) ** a) @ p.probs
    cross = p.probs @ (cdist(p.vectors, q.vectors) ** a) @ q.probs
    return float(pair - 2.0 * cross)


def propriety_probe(
    q_true: DiscreteVectorDist,
    candidates: Sequence[DiscreteVectorDist],
    energy_alpha: float = 1.0,
    trials: int = 0,
    seed: int = 0,
) -> list[float]:
    """Expected score of each candidate forecast against data from ``q_true``.

    Returns scores parallel to ``candidates``.  Finite supports allow exact
    enumeration, so ``trials`` and ``seed`` are accepted for interface
    stability but unused.  For exponents in (0, 2) the truth q_true attains
    the maximum.
    """
    del trials, seed
    return [expected_energy_score(cand, q_true, energy_alpha) for cand in candidates]


def load_vector_batches(path: str) -> list[VectorBatch]:
    """Read one batch or a list of batches from JSON.

    Each batch is ``{"model_samples": [[f,...],...],
    "target_samples": [[f,...],...]}``; the file may hold a single object or
    an array of them.
    """
    with open(path, "r", encoding="utf-8") as fh:
        data = json.load(fh)
    entries = data if isinstance(data, list) else [data]
    batches = []
    for i, entry in enumerate(entries):
        if not isinstance(entry, dict) or "model_samples" not in entry \
                or "target_samples" not in entry:
            raise ValueError(
                f"{path}[{i}]: expected object with 'model_samples' and 'target_samples'")
        batches.append(VectorBatch(entry["model_samples"], entry["target_samples"]))
    return batches
