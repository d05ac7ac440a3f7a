"""Energy score and energy loss on small vector distributions.

The score needs only pairwise distances between samples, never a density.
Strict propriety holds for exponents in (0, 2): forecasting the truth beats
every other forecast.  At exponent 2 strictness is lost, and a point mass
at the mean ties the true distribution.
"""

import math

from lfree import (
    DiscreteVectorDist,
    VectorBatch,
    energy_loss,
    exact_energy_score,
    propriety_probe,
)

batch = VectorBatch(model_samples=[[1.0, 0.0], [0.0, 1.0]],
                    target_samples=[[0.0, 0.0]])
print(f"hand-evaluated loss: {energy_loss(batch, 1.0):.6f}"
      f"  (closed form 2 - sqrt(2) = {2 - math.sqrt(2):.6f})")
print()

truth = DiscreteVectorDist({(0.0, 0.0): 0.5, (1.0, 0.0): 0.3, (0.0, 1.0): 0.2})
candidates = {
    "truth itself": truth,
    "point mass at origin": DiscreteVectorDist({(0.0, 0.0): 1.0}),
    "uniform over support": DiscreteVectorDist(
        {(0.0, 0.0): 1 / 3, (1.0, 0.0): 1 / 3, (0.0, 1.0): 1 / 3}),
    "point at centroid": DiscreteVectorDist({(0.5, 0.5): 1.0}),
}
for alpha in (0.5, 1.0, 1.5):
    scores = propriety_probe(truth, list(candidates.values()), alpha)
    print(f"expected scores at exponent {alpha} (higher is better):")
    for name, score in zip(candidates, scores):
        print(f"  {name:>22}: {score:+.5f}")
    print()

print("exponent 2 degeneracy (equal means tie):")
sym = DiscreteVectorDist({(0.0,): 0.5, (2.0,): 0.5})
point = DiscreteVectorDist({(1.0,): 1.0})
s_sym, s_point = propriety_probe(sym, [sym, point], 2.0)
print(f"  truth {s_sym:+.5f}  vs  point-at-mean {s_point:+.5f}")
print()
print("score of the truth at its own observation y=(0,0):",
      f"{exact_energy_score(truth, (0.0, 0.0), 1.0):+.5f}")
