"""Likelihood-free language-model scoring with Brier-n and BrierLM.

Evaluation draws two continuations per corpus position and combines three
indicator variables; no probabilities are ever read from the model.  A
sampler that knows the corpus scores 100; an indifferent one scores near 0.
"""

from lfree import (
    ExplicitCategorical,
    ExplicitSampler,
    byte_tokenize,
    combine_brier_lm,
    evaluate_corpus,
)
from lfree.core import SamplerSource


class CorpusOracle(SamplerSource):
    """Always continues with the ground truth: the best possible model."""

    def __init__(self, corpus, k):
        self.corpus, self.k = list(corpus), k

    def draw_with_rng(self, context, count, rng):
        t = len(context)
        chunk = self.corpus[t:t + self.k]
        chunk += [0] * (self.k - len(chunk))
        return [tuple(chunk)] * count


corpus = byte_tokenize("the cat sat on the mat. the dog sat on the log. " * 4)
alphabet = sorted(set(corpus))
uniform = ExplicitCategorical({(t,): 1.0 / len(alphabet) for t in alphabet})

print("corpus bytes:", len(corpus), "| distinct symbols:", len(alphabet))
print()
print("perfect predictor (teacher-forced ground truth):")
print(evaluate_corpus(CorpusOracle(corpus, 4), corpus, chunk_len=4, seed=1).to_table())
print()
print("uniform sampler over the corpus alphabet:")
print(evaluate_corpus(ExplicitSampler(uniform), corpus, chunk_len=1, seed=2).to_table())
print()

# The composite is a geometric mean of Brier-1..4, scaled to 0..100.
row = {1: 0.2181, 2: 0.0688, 3: 0.0259, 4: 0.0125}
print(f"combining Brier-n {tuple(row.values())} -> BrierLM = "
      f"{combine_brier_lm(row):.2f}")
