"""Seeded sampling and experiment harnesses.

Per-trial randomness comes from a counter-based Philox generator keyed by
(master seed, trial index), so trial t is reproducible in isolation and
results do not depend on execution order.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import Alphabet, Channel, Pmf, TrainingSet, ValidationError, joint_of
from .infotheory import mutual_information
from .lmrate import SolveStatus, SolverConfig, lm_rate
from .learners import VseeParams, virtual_sample, vsee
from .exactdist import composition_count, exact_rate_pmf

RNG_ALGORITHM = f"numpy.random.Philox (numpy {np.__version__}), key = (master_seed, trial_index)"

DEFAULT_EXACT_CAP = 100_000  # max composition count for exact sweep evaluation


@dataclass(frozen=True)
class ExperimentSpec:
    p: Pmf
    w: Channel
    n: int
    trials: int
    seed: int
    epsilon: float = 0.05
    alpha: float = 0.5325
    beta: float = 0.45

    def __post_init__(self):
        if self.trials < 1:
            raise ValidationError("trials must be >= 1")


@dataclass(frozen=True)
class TrialRecord:
    trial: int
    lm_rate: float  # bits
    rate: float | None  # learned code rate R, when the learner returns one
    success: bool  # the trial's success predicate, False when not certified
    certified: bool  # solver produced a certificate (not an iteration limit)


@dataclass(frozen=True)
class SweepPoint:
    alpha: float
    success_prob: float
    mode: str  # "exact" or "monte-carlo"
    std_error: float  # 0 for exact mode


def trial_rng(master_seed: int, trial_index: int) -> np.random.Generator:
    """Independent substream for one trial, keyed by (master seed, trial index)."""
    return np.random.Generator(np.random.Philox(key=(master_seed, trial_index)))


def sample_training_set(p: Pmf, w: Channel, n: int, stream_seed) -> TrainingSet:
    """n i.i.d. input-output pairs from p x w.

    stream_seed is either an integer (used directly as the Philox key) or an
    already-constructed Generator.
    """
    if n < 1:
        raise ValidationError("n must be >= 1")
    rng = (
        stream_seed
        if isinstance(stream_seed, np.random.Generator)
        else np.random.Generator(np.random.Philox(key=stream_seed))
    )
    cells = joint_of(p, w).prob.ravel()
    y_size = w.output.size
    idx = rng.choice(len(cells), size=n, p=cells)
    pairs = np.stack([idx // y_size, idx % y_size], axis=1)
    return TrainingSet(p.alphabet, w.output, pairs)


def run_vsa_sweep(
    spec: ExperimentSpec,
    alphas,
    exact_cap: int = DEFAULT_EXACT_CAP,
    cfg: SolverConfig | None = None,
) -> list[SweepPoint]:
    """Success probability of I(p,w) - eps <= lm_rate(virtual_sample(., alpha)).

    Uses exact enumeration over count tables when the composition count is
    at most exact_cap, Monte Carlo with spec.trials samples otherwise.
    """
    mi = mutual_information(spec.p, spec.w)
    threshold = mi - spec.epsilon
    j = spec.p.alphabet.size * spec.w.output.size
    exact = composition_count(spec.n, j) <= exact_cap
    out = []
    for alpha in alphas:
        if exact:
            pmf = exact_rate_pmf(
                lambda s: virtual_sample(s, alpha), spec.p, spec.w, spec.n, cfg
            )
            # P[threshold <= rate]; atoms within grouping tolerance count as hits
            prob = pmf.prob_above(threshold - pmf.group_tol)
            out.append(SweepPoint(alpha, prob, "exact", 0.0))
        else:
            hits = 0
            for t in range(spec.trials):
                train = sample_training_set(spec.p, spec.w, spec.n, trial_rng(spec.seed, t))
                cert = lm_rate(spec.p, spec.w, virtual_sample(train, alpha), cfg)
                if cert.status is not SolveStatus.ITERATION_LIMIT and cert.value >= threshold:
                    hits += 1
            frac = hits / spec.trials
            stderr = float(np.sqrt(frac * (1 - frac) / spec.trials))
            out.append(SweepPoint(alpha, frac, "monte-carlo", stderr))
    return out


def run_vsee_trials(spec: ExperimentSpec, cfg: SolverConfig | None = None) -> list[TrialRecord]:
    """Independent VSEE experiments: sample, learn (k, R), certify the LM rate.

    A trial succeeds when I(p,w) - eps <= R <= lm_rate(p, w, k).  Solver
    iteration limits are recorded as uncertified and never counted as
    successes; report them separately rather than folding them into the
    failure statistics.
    """
    if spec.n < 2:
        raise ValidationError("rate estimation requires n >= 2")
    mi = mutual_information(spec.p, spec.w)
    params = VseeParams(alpha=spec.alpha, beta=spec.beta)
    records = []
    for t in range(spec.trials):
        train = sample_training_set(spec.p, spec.w, spec.n, trial_rng(spec.seed, t))
        out = vsee(train, params)
        cert = lm_rate(spec.p, spec.w, out.metric, cfg)
        certified = cert.status is not SolveStatus.ITERATION_LIMIT
        success = certified and (mi - spec.epsilon <= out.rate <= cert.value)
        records.append(
            TrialRecord(
                trial=t,
                lm_rate=cert.value,
                rate=out.rate,
                success=bool(success),
                certified=certified,
            )
        )
    return records
