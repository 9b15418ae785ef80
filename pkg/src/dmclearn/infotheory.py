"""Entropy and mutual-information functionals, all in bits.

Includes the bias-corrected entropy estimator used for choosing code rates
and its high-probability error bound.  The convention 0 * log2(0) = 0 is
applied everywhere; log2 is never evaluated on zero-mass cells.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import Channel, Pmf, output_marginal

LOG2E = math.log2(math.e)


def _plugin_entropy(probs: np.ndarray) -> float:
    p = probs[probs > 0]
    return float(-(p * np.log2(p)).sum())


def entropy(p: Pmf) -> float:
    """Shannon entropy of a PMF in bits."""
    return _plugin_entropy(p.prob)


def mutual_information(p: Pmf, w: Channel) -> float:
    """Mutual information between input and output of channel w under p, in bits."""
    pw = output_marginal(p, w)
    row_terms = sum(
        p.prob[x] * _plugin_entropy(w.rows[x])
        for x in range(w.input.size)
        if p.prob[x] > 0
    )
    return entropy(pw) - row_terms


def binary_entropy(tau: float) -> float:
    """Entropy of a Bernoulli(tau) variable in bits."""
    if not 0.0 <= tau <= 1.0:
        raise ValueError(f"tau must be in [0, 1], got {tau}")
    if tau in (0.0, 1.0):
        return 0.0
    return -tau * math.log2(tau) - (1 - tau) * math.log2(1 - tau)


@dataclass(frozen=True)
class EntropyEstimate:
    """A bias-corrected entropy estimate: plug-in value plus correction."""

    value: float  # bits, plug-in part plus correction
    correction: float  # bits, ((l - 1) / 2n) * log2(e)
    n: int
    alphabet_size: int

    @property
    def plugin(self) -> float:
        return self.value - self.correction


def miller_madow_counts(counts: np.ndarray, alphabet_size: int) -> EntropyEstimate:
    """Bias-corrected entropy estimate from a count vector.

    The estimate is the plug-in entropy of the empirical PMF plus the
    correction ((l - 1) / 2n) * log2(e), which reduces the asymptotic bias
    rate to o(1/n).  Only counts matter; sequence order is irrelevant.
    """
    c = np.asarray(counts, dtype=float)
    n = int(round(c.sum()))
    if n < 1:
        raise ValueError("need at least one sample")
    correction = (alphabet_size - 1) / (2 * n) * LOG2E
    return EntropyEstimate(
        value=_plugin_entropy(c / n) + correction,
        correction=correction,
        n=n,
        alphabet_size=alphabet_size,
    )


def miller_madow(seq, alphabet_size: int) -> EntropyEstimate:
    """Bias-corrected entropy estimate of an i.i.d. symbol sequence."""
    z = np.asarray(seq, dtype=np.int64)
    if z.size < 1:
        raise ValueError("need at least one sample")
    if z.min() < 0 or z.max() >= alphabet_size:
        raise ValueError("symbol out of range")
    return miller_madow_counts(np.bincount(z, minlength=alphabet_size), alphabet_size)


def mm_error_bound(n: int, alphabet_size: int, delta: float) -> float:
    """High-probability error bound for the corrected estimator, in bits.

    With probability at least 1 - delta over n >= 2 i.i.d. samples from any
    distribution on an alphabet of size l, the corrected estimate deviates
    from the true entropy by at most this value.
    """
    if n < 2:
        raise ValueError(f"bound requires n >= 2, got {n}")
    if not 0.0 < delta < 1.0:
        raise ValueError(f"delta must be in (0, 1), got {delta}")
    bias = (alphabet_size - 1) / (2 * n) * LOG2E
    deviation = math.log2(n) * math.sqrt(2.0 / n * math.log(2.0 / delta))
    return bias + deviation
