"""Learning algorithms for decoding metrics and code rates.

Three learners are provided:

* plug_in: the empirical conditional distribution as the metric.  Simple,
  but a single unseen cell with positive channel probability drives its LM
  rate to zero, so it fails on adversarial channels at any sample size.
* virtual_sample: counts plus n^alpha virtual occurrences per cell, a
  Laplace-style smoothing whose metric is strictly positive.
* vsee (virtual sample and entropy estimation): the virtual-sample metric
  together with a code rate chosen as a bias-corrected mutual-information
  estimate minus a safety margin n^(-beta).

All learners depend on the training set only through its count table, so
they are exchangeable.  The sample-size calculators that turn (epsilon,
delta) guarantees into training-set sizes live here too, as does the
adversarial construction that defeats every plug-in learner.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import (
    Alphabet,
    Channel,
    DecodingMetric,
    Pmf,
    TrainingSet,
    ValidationError,
    count_pairs,
)
from .infotheory import binary_entropy, miller_madow, LOG2E


@dataclass(frozen=True)
class VsaParams:
    alpha: float


@dataclass(frozen=True)
class VseeParams:
    alpha: float
    beta: float


@dataclass(frozen=True)
class LearnerOutput:
    metric: DecodingMetric
    rate: float | None = None  # bits; present only for rate-returning learners


def plug_in(train: TrainingSet) -> DecodingMetric:
    """Empirical conditional distribution N(x,y)/N(x,.) as the metric.

    Rows whose input symbol never occurs are set to the uniform row.
    """
    c = count_pairs(train).counts.astype(float)
    row = c.sum(axis=1)
    k = np.empty_like(c)
    seen = row > 0
    k[seen] = c[seen] / row[seen, None]
    k[~seen] = 1.0 / train.output.size
    return DecodingMetric(train.input, train.output, k)


def virtual_sample(train: TrainingSet, alpha: float) -> DecodingMetric:
    """Counts plus n^alpha virtual occurrences per cell."""
    c = count_pairs(train).counts.astype(float)
    return DecodingMetric(train.input, train.output, c + float(train.n) ** alpha)


def vsee(train: TrainingSet, params: VseeParams) -> LearnerOutput:
    """Virtual-sample metric plus a code rate from entropy estimation.

    The rate is the bias-corrected estimate of the mutual information,
    H(X) + H(Y) - H(X,Y), minus n^(-beta).  It may be negative at small n;
    no clamping is applied here.
    """
    n = train.n
    if n < 2:
        raise ValidationError(f"rate estimation requires n >= 2, got {n}")
    metric = virtual_sample(train, params.alpha)
    xsize, ysize = train.input.size, train.output.size
    hx = miller_madow(train.xs, xsize).value
    hy = miller_madow(train.ys, ysize).value
    hxy = miller_madow(train.xs * ysize + train.ys, xsize * ysize).value
    rate = hx + hy - hxy - float(n) ** (-params.beta)
    return LearnerOutput(metric=metric, rate=rate)


def vsa_sample_size(alpha: float, epsilon: float, delta: float, x_size: int, y_size: int) -> int:
    """Training-set size guaranteeing the virtual-sample success event.

    With at least this many samples, the alpha-virtual-sample metric K
    satisfies I(p, w) - epsilon < lm_rate(p, w, K) with probability greater
    than 1 - delta, uniformly over channels (requires 1/2 < alpha < 1).
    """
    if not 0.5 < alpha < 1.0:
        raise ValidationError(f"guarantee requires 1/2 < alpha < 1, got {alpha}")
    if epsilon <= 0 or not 0 < delta < 1:
        raise ValidationError("need epsilon > 0 and 0 < delta < 1")
    j = x_size * y_size
    first = (j / (epsilon * math.log(2))) ** (1.0 / (1.0 - alpha))
    second = (0.5 * math.log(j / delta)) ** (1.0 / (2.0 * alpha - 1.0))
    return math.ceil(max(first, second))


def optimal_alpha(epsilon: float, delta: float, x_size: int, y_size: int) -> tuple[float, float]:
    """Rule-of-thumb smoothing exponent minimizing the worst-case sample size.

    The two branches of the sample-size bound are exp(zeta/(1-alpha)) and
    exp(eta/(2 alpha - 1)); when zeta, eta > 0 the first increases and the
    second decreases in alpha, so the minimizer equates them:
    alpha = (zeta + eta) / (2 zeta + eta).  Returns (alpha, sample size).
    """
    j = x_size * y_size
    zeta = math.log(j / (epsilon * math.log(2)))
    inner = 0.5 * math.log(j / delta)
    eta = math.log(inner) if inner > 0 else float("-inf")
    if zeta <= 0 or eta <= 0:
        raise ValidationError("rule of thumb needs zeta > 0 and eta > 0 (small epsilon, delta)")
    alpha = (zeta + eta) / (2 * zeta + eta)
    return alpha, math.exp(zeta / (1.0 - alpha))


def mi_estimate_error_bound(n: int, delta: float, x_size: int, y_size: int) -> float:
    """High-probability error of the three-term mutual-information estimate, in bits.

    Combines the bias corrections of the three entropy estimates with three
    deviation terms at confidence delta/4 each.
    """
    if n < 1 or not 0 < delta < 1:
        raise ValidationError("need n >= 1 and 0 < delta < 1")
    j = x_size * y_size
    bias = (j + x_size + y_size - 3) / (2 * n) * LOG2E
    deviation = 3 * math.log2(n) * math.sqrt(2.0 / n * math.log(8.0 / delta))
    return bias + deviation


def vsee_sample_size_ok(
    n: int,
    alpha: float,
    beta: float,
    epsilon: float,
    delta: float,
    x_size: int,
    y_size: int,
) -> bool:
    """Whether n satisfies the three sufficient inequalities for the VSEE guarantee."""
    if not (alpha > 0.5 and beta > 0 and alpha + beta < 1):
        raise ValidationError("need alpha > 1/2, beta > 0, alpha + beta < 1")
    if epsilon <= 0 or not 0 < delta < 1:
        raise ValidationError("need epsilon > 0 and 0 < delta < 1")
    j = x_size * y_size
    r = mi_estimate_error_bound(n, delta, x_size, y_size)
    margin = float(n) ** (-beta)
    return (
        math.log(2) * float(n) ** (1.0 - alpha) * (margin - r) >= j
        and margin + r <= epsilon
        and (0.5 * math.log(4 * j / delta)) ** (1.0 / (2 * alpha - 1)) <= n
    )


def vsee_sample_size(
    alpha: float,
    beta: float,
    epsilon: float,
    delta: float,
    x_size: int,
    y_size: int,
    n_max: int = 10**12,
) -> int | None:
    """First n on a geometric grid from which the VSEE inequalities hold.

    Scans a geometric grid up to n_max, then bisects down to the least
    integer at which all three inequalities hold.  An approximation of the
    existence statement: validity is only established on the scanned range.
    Returns None when no grid point up to n_max works.
    """
    ok = lambda n: vsee_sample_size_ok(n, alpha, beta, epsilon, delta, x_size, y_size)
    hi = None
    n = 2
    while n <= n_max:
        if ok(n):
            hi = n
            break
        n *= 2
    if hi is None:
        return None
    lo = max(2, hi // 2)
    while lo < hi:
        mid = (lo + hi) // 2
        if ok(mid):
            hi = mid
        else:
            lo = mid + 1
    return hi


def plugin_zero_rate_bound(p_a: float, w_ba: float, n: int) -> float:
    """Lower bound on the probability that a plug-in metric vanishes at (a, b).

    Equals (1 - p(a) w(b|a))^n - (1 - p(a))^n: the chance that symbol a
    occurs in the training set but never together with b.
    """
    if not (0 <= p_a <= 1 and 0 <= w_ba <= 1):
        raise ValidationError("probabilities must lie in [0, 1]")
    return (1.0 - p_a * w_ba) ** n - (1.0 - p_a) ** n


def _binary_entropy_inverse(target: float) -> float:
    """The tau in [0, 1/2] with binary_entropy(tau) = target, by bisection."""
    lo, hi = 0.0, 0.5
    for _ in range(100):
        mid = 0.5 * (lo + hi)
        if binary_entropy(mid) < target:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def adversarial_channel(
    epsilon: float,
    delta: float,
    n: int,
    x_size: int = 2,
    y_size: int = 2,
) -> tuple[Pmf, Channel, float]:
    """A channel on which every plug-in learner fails at sample size n.

    Returns (p, w, tau) with mutual information 1 - h_b(tau) > epsilon while
    any plug-in metric has LM rate 0 with probability above delta.  The
    input is uniform on symbols {0, 1}; the channel crosses between outputs
    {0, 1} with probability tau.  tau is chosen deterministically as the
    midpoint of the feasible interval.
    """
    if not 0 < epsilon < 1:
        raise ValidationError(f"epsilon must be in (0, 1), got {epsilon}")
    if not 0 < delta < 0.5:
        raise ValidationError(f"delta must be in (0, 1/2), got {delta}")
    if x_size < 2 or y_size < 2:
        raise ValidationError("alphabets must have at least two symbols")
    tau_mi = _binary_entropy_inverse(1.0 - epsilon)
    tau_prob = 2.0 * (1.0 - (delta + 2.0 ** (-n)) ** (1.0 / n))
    upper = min(tau_mi, tau_prob)
    assert upper > 0, "feasible interval for tau is empty"
    tau = 0.5 * upper

    p = np.zeros(x_size)
    p[0] = p[1] = 0.5
    w = np.zeros((x_size, y_size))
    w[0, 0], w[0, 1] = tau, 1.0 - tau
    w[1:, 0], w[1:, 1] = 1.0 - tau, tau
    return Pmf(Alphabet(x_size), p), Channel.from_rows(w), tau
