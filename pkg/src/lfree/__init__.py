"""Likelihood-free sampling and evaluation toolkit for implicit discrete models.

The toolkit treats a generative model purely as a black-box sampler and
provides: exact temperature sampling via two-stage rejection with closed-form
cost analytics, an approximate batched low-temperature sampler, Brier-score
based language-model evaluation (Brier-n, BrierLM, accuracy/collision
decomposition), energy-score computation, and a wire protocol for sampling
from external processes.  Everything that draws randomness takes an explicit
64-bit seed (or a ``numpy.random.Generator``) and is bit-reproducible.
"""

from .core import (
    ExplicitCategorical,
    ExplicitSampler,
    Outcome,
    SamplerSource,
    as_outcome,
    empirical_pmf,
    load_pmf,
    make_rng,
    sample_categorical,
    save_pmf,
    tv_distance,
)
from .temp_exact import (
    CallBudgetExhausted,
    CostReport,
    InverseTemperature,
    cost_bound,
    exact_temperature_sample,
    expected_calls,
    run_cost_experiment,
    stage2_acceptance_probe,
    target_distribution,
)
from .temp_batch import BatchSampleTrace, batch_temperature_sample, convergence_study
from .brier import (
    BrierAccumulator,
    BrierReport,
    brier_sample_estimate,
    byte_tokenize,
    combine_brier_lm,
    evaluate_corpus,
    exact_brier,
    load_corpus,
)
from .energy import (
    DiscreteVectorDist,
    VectorBatch,
    energy_loss,
    exact_energy_score,
    expected_energy_score,
    load_vector_batches,
    propriety_probe,
    sequence_energy_loss,
)
from .extproto import (
    ExternalSampler,
    Handshake,
    ProtocolError,
    RoundtripReport,
    roundtrip_check,
    spawn_external_sampler,
)

__version__ = "0.1.0"
