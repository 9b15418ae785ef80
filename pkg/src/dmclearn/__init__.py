"""Learning decoding metrics and code rates for unknown discrete memoryless channels."""

from .core import (
    Alphabet,
    Channel,
    CountTable,
    DecodingMetric,
    JointPmf,
    Pmf,
    TrainingSet,
    ValidationError,
    count_pairs,
    empirical,
    joint_of,
    marginals,
    output_marginal,
)
from .infotheory import (
    EntropyEstimate,
    binary_entropy,
    entropy,
    miller_madow,
    miller_madow_counts,
    mm_error_bound,
    mutual_information,
)
from .lmrate import (
    LmRateCertificate,
    SolveStatus,
    SolverConfig,
    dual_objective,
    lm_rate,
    sufficient_rate_condition,
)
from .learners import (
    LearnerOutput,
    VsaParams,
    VseeParams,
    adversarial_channel,
    mi_estimate_error_bound,
    optimal_alpha,
    plug_in,
    plugin_zero_rate_bound,
    virtual_sample,
    vsa_sample_size,
    vsee,
    vsee_sample_size,
    vsee_sample_size_ok,
)
from .exactdist import (
    RatePmf,
    canonical_training_set,
    composition_count,
    enumerate_all,
    exact_rate_pmf,
    multinomial_prob,
    successor,
)
from .montecarlo import (
    ExperimentSpec,
    SweepPoint,
    TrialRecord,
    run_vsa_sweep,
    run_vsee_trials,
    sample_training_set,
    trial_rng,
)

__version__ = "0.1.0"

# The example 2x3 channel used throughout the experiment harnesses.
EXAMPLE_CHANNEL_ROWS = [[0.86, 0.1, 0.04], [0.04, 0.1, 0.86]]


def example_channel() -> tuple[Pmf, Channel]:
    """Uniform binary input and the built-in 2x3 example channel."""
    return Pmf.uniform(2), Channel.from_rows(EXAMPLE_CHANNEL_ROWS)
