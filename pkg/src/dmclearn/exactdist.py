"""Exact distribution of the LM rate of an exchangeable learner.

The count table of a size-n training set takes finitely many values, the
compositions of n into J = |X| |Y| cells.  For an exchangeable learner the
LM rate depends only on the counts, so its exact PMF follows by enumerating
every composition with its multinomial probability and solving once per
composition.

Compositions are ordered by their value as a base-(n+1) integer
sum_j c_j (n+1)^j; the successor of a composition under that order has a
closed form, which gives an allocation-free enumeration from (n, 0, ..., 0)
up to (0, ..., 0, n).  Cells are indexed row-major over X x Y.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass
from typing import Callable, Iterator

import numpy as np

from .core import (
    Alphabet,
    Channel,
    DecodingMetric,
    Pmf,
    TrainingSet,
    ValidationError,
    joint_of,
)
from .lmrate import LmRateCertificate, SolveStatus, SolverConfig, lm_rate

Learner = Callable[[TrainingSet], DecodingMetric]

GROUP_TOL = 1e-9  # bits; rates closer than this are merged into one atom


def successor(parts: tuple[int, ...]) -> tuple[int, ...] | None:
    """Next composition in increasing base-(n+1) value, or None at the last one.

    Zero out the lowest positive part c_l, increment c_{l+1}, and put the
    remaining c_l - 1 back into part 0.
    """
    j = len(parts)
    l = next(i for i, c in enumerate(parts) if c > 0)
    if l == j - 1:
        return None
    out = list(parts)
    out[l] = 0
    out[l + 1] += 1
    out[0] = parts[l] - 1
    return tuple(out)


def enumerate_all(n: int, j: int) -> Iterator[tuple[int, ...]]:
    """All compositions of n into j parts, in increasing base-(n+1) value."""
    if n < 1 or j < 1:
        raise ValidationError("need n >= 1 and j >= 1")
    c: tuple[int, ...] | None = (n,) + (0,) * (j - 1)
    while c is not None:
        yield c
        c = successor(c)


def composition_count(n: int, j: int) -> int:
    return math.comb(n + j - 1, j - 1)


def canonical_training_set(parts, x_size: int, y_size: int) -> TrainingSet:
    """A training set realizing the counts: row-major cells, each repeated c_j times."""
    pairs = []
    for j, c in enumerate(parts):
        pairs.extend([(j // y_size, j % y_size)] * c)
    return TrainingSet(Alphabet(x_size), Alphabet(y_size), np.asarray(pairs, dtype=np.int64))


@dataclass(frozen=True)
class RatePmf:
    """Discrete distribution of the LM rate: sorted atoms with probabilities."""

    rates: np.ndarray  # strictly increasing after grouping
    probs: np.ndarray
    group_tol: float
    failed_prob: float = 0.0  # mass on compositions where the solver hit its limit

    def prob_at_zero(self) -> float:
        return float(self.probs[self.rates <= self.group_tol].sum()) if len(self.rates) else 0.0

    def prob_above(self, threshold: float) -> float:
        i = bisect_right(self.rates.tolist(), threshold)
        return float(self.probs[i:].sum())

    def cdf(self) -> list[tuple[float, float]]:
        return list(zip(self.rates.tolist(), np.cumsum(self.probs).tolist()))


def multinomial_prob(parts, p: Pmf, w: Channel) -> float:
    """Probability of a count table under n i.i.d. draws from p x w.

    Computed in log space so factorials never overflow; compositions placing
    counts on zero-probability cells have probability 0.
    """
    cell = joint_of(p, w).prob.ravel()
    n = sum(parts)
    logp = math.lgamma(n + 1)
    for jcell, c in enumerate(parts):
        if c == 0:
            continue
        if cell[jcell] == 0.0:
            return 0.0
        logp += c * math.log(cell[jcell]) - math.lgamma(c + 1)
    return math.exp(logp)


def exact_rate_pmf(
    learner: Learner,
    p: Pmf,
    w: Channel,
    n: int,
    cfg: SolverConfig | None = None,
    group_tol: float = GROUP_TOL,
) -> RatePmf:
    """Exact PMF of lm_rate(p, w, learner(S)) over all size-n training sets.

    The learner must be exchangeable: its metric may depend on the training
    set only through the count table (unchecked contract).
    """
    if p.alphabet != w.input:
        raise ValidationError("input alphabet mismatch")
    x_size, y_size = w.input.size, w.output.size
    cell = joint_of(p, w).prob.ravel()
    with np.errstate(divide="ignore"):
        logcell = np.where(cell > 0, np.log(np.where(cell > 0, cell, 1.0)), -np.inf)
    lgamma = math.lgamma

    raw: list[tuple[float, float]] = []
    failed = 0.0
    base = lgamma(n + 1)
    for parts in enumerate_all(n, x_size * y_size):
        logp = base
        impossible = False
        for jcell, c in enumerate(parts):
            if c == 0:
                continue
            if cell[jcell] == 0.0:
                impossible = True
                break
            logp += c * logcell[jcell] - lgamma(c + 1)
        if impossible:
            continue
        prob = math.exp(logp)
        train = canonical_training_set(parts, x_size, y_size)
        cert = lm_rate(p, w, learner(train), cfg)
        if cert.status is SolveStatus.ITERATION_LIMIT:
            failed += prob
            continue
        raw.append((cert.value, prob))

    rates, probs = group_atoms(raw, group_tol)
    return RatePmf(rates=rates, probs=probs, group_tol=group_tol, failed_prob=failed)


def group_atoms(raw: list[tuple[float, float]], tol: float) -> tuple[np.ndarray, np.ndarray]:
    """Merge rate atoms closer than tol; representative is the mass-weighted mean."""
    raw = sorted(raw)
    rates: list[float] = []
    probs: list[float] = []
    for rate, prob in raw:
        if rates and rate - rates[-1] <= tol:
            total = probs[-1] + prob
            rates[-1] = (rates[-1] * probs[-1] + rate * prob) / total if total > 0 else rate
            probs[-1] = total
        else:
            rates.append(rate)
            probs.append(prob)
    return np.array(rates), np.array(probs)
