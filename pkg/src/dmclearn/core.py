"""Finite-alphabet probability objects shared by every other module.

All values are immutable after construction.  Alphabet symbols are dense
integer indices 0..size-1; any mapping to named symbols happens at the CLI
boundary.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

PROB_TOL = 1e-9


class ValidationError(ValueError):
    """Raised when a probability object violates its invariants."""


@dataclass(frozen=True)
class Alphabet:
    """A finite set of symbols indexed 0..size-1."""

    size: int

    def __post_init__(self):
        if self.size < 1:
            raise ValidationError(f"alphabet size must be >= 1, got {self.size}")


@dataclass(frozen=True)
class Pmf:
    """Probability mass function over a finite alphabet."""

    alphabet: Alphabet
    prob: np.ndarray = field(repr=False)

    def __post_init__(self):
        p = np.asarray(self.prob, dtype=float)
        object.__setattr__(self, "prob", p)
        p.setflags(write=False)
        if p.shape != (self.alphabet.size,):
            raise ValidationError(f"pmf shape {p.shape} != ({self.alphabet.size},)")
        if np.any(p < 0):
            raise ValidationError("pmf has negative entries")
        if abs(p.sum() - 1.0) > PROB_TOL:
            raise ValidationError(f"pmf sums to {p.sum()}, not 1")

    @staticmethod
    def uniform(size: int) -> "Pmf":
        return Pmf(Alphabet(size), np.full(size, 1.0 / size))

    @staticmethod
    def point_mass(size: int, symbol: int) -> "Pmf":
        p = np.zeros(size)
        p[symbol] = 1.0
        return Pmf(Alphabet(size), p)

    @staticmethod
    def from_probs(probs) -> "Pmf":
        p = np.asarray(probs, dtype=float)
        return Pmf(Alphabet(len(p)), p)

    def support(self) -> np.ndarray:
        return np.nonzero(self.prob > 0)[0]


@dataclass(frozen=True)
class Channel:
    """Row-stochastic transition table w(y|x) between finite alphabets."""

    input: Alphabet
    output: Alphabet
    rows: np.ndarray = field(repr=False)

    def __post_init__(self):
        w = np.asarray(self.rows, dtype=float)
        object.__setattr__(self, "rows", w)
        w.setflags(write=False)
        if w.shape != (self.input.size, self.output.size):
            raise ValidationError(
                f"channel shape {w.shape} != ({self.input.size}, {self.output.size})"
            )
        for x in range(self.input.size):
            Pmf(self.output, w[x])  # validates each row

    @staticmethod
    def from_rows(rows) -> "Channel":
        w = np.asarray(rows, dtype=float)
        return Channel(Alphabet(w.shape[0]), Alphabet(w.shape[1]), w)


@dataclass(frozen=True)
class JointPmf:
    """Joint distribution over an input/output alphabet pair."""

    input: Alphabet
    output: Alphabet
    prob: np.ndarray = field(repr=False)

    def __post_init__(self):
        q = np.asarray(self.prob, dtype=float)
        object.__setattr__(self, "prob", q)
        q.setflags(write=False)
        if q.shape != (self.input.size, self.output.size):
            raise ValidationError(
                f"joint shape {q.shape} != ({self.input.size}, {self.output.size})"
            )
        if np.any(q < 0):
            raise ValidationError("joint pmf has negative entries")
        if abs(q.sum() - 1.0) > PROB_TOL:
            raise ValidationError(f"joint pmf sums to {q.sum()}, not 1")


@dataclass(frozen=True)
class TrainingSet:
    """A finite sequence of (x, y) input-output pairs."""

    input: Alphabet
    output: Alphabet
    pairs: np.ndarray = field(repr=False)  # shape (n, 2), integer symbols

    def __post_init__(self):
        pairs = np.asarray(self.pairs, dtype=np.int64)
        object.__setattr__(self, "pairs", pairs)
        pairs.setflags(write=False)
        if pairs.ndim != 2 or pairs.shape[1] != 2 or pairs.shape[0] < 1:
            raise ValidationError(f"pairs must have shape (n >= 1, 2), got {pairs.shape}")
        x, y = pairs[:, 0], pairs[:, 1]
        if x.min() < 0 or x.max() >= self.input.size:
            raise ValidationError("x symbol out of range")
        if y.min() < 0 or y.max() >= self.output.size:
            raise ValidationError("y symbol out of range")

    @property
    def n(self) -> int:
        return self.pairs.shape[0]

    @property
    def xs(self) -> np.ndarray:
        return self.pairs[:, 0]

    @property
    def ys(self) -> np.ndarray:
        return self.pairs[:, 1]

    @staticmethod
    def from_pairs(pairs, x_size: int, y_size: int) -> "TrainingSet":
        return TrainingSet(Alphabet(x_size), Alphabet(y_size), np.asarray(pairs))


@dataclass(frozen=True)
class CountTable:
    """Nonnegative integer occurrence counts N(x, y) with total n."""

    input: Alphabet
    output: Alphabet
    counts: np.ndarray = field(repr=False)

    def __post_init__(self):
        c = np.asarray(self.counts, dtype=np.int64)
        object.__setattr__(self, "counts", c)
        c.setflags(write=False)
        if c.shape != (self.input.size, self.output.size):
            raise ValidationError("count table shape mismatch")
        if np.any(c < 0):
            raise ValidationError("counts must be nonnegative")

    @property
    def n(self) -> int:
        return int(self.counts.sum())


@dataclass(frozen=True)
class DecodingMetric:
    """Nonnegative metric table k(x, y); the decoder maximizes its product."""

    input: Alphabet
    output: Alphabet
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        k = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", k)
        k.setflags(write=False)
        if k.shape != (self.input.size, self.output.size):
            raise ValidationError("metric shape mismatch")
        if np.any(k < 0):
            raise ValidationError("metric must be nonnegative")
        if not np.any(k > 0):
            raise ValidationError("metric must have at least one positive entry")

    @staticmethod
    def from_values(values) -> "DecodingMetric":
        k = np.asarray(values, dtype=float)
        return DecodingMetric(Alphabet(k.shape[0]), Alphabet(k.shape[1]), k)


def count_pairs(train: TrainingSet) -> CountTable:
    """Tally the occurrence counts N(x, y) of a training set."""
    c = np.zeros((train.input.size, train.output.size), dtype=np.int64)
    np.add.at(c, (train.xs, train.ys), 1)
    return CountTable(train.input, train.output, c)


def empirical(train: TrainingSet) -> tuple[CountTable, Pmf, Channel]:
    """Empirical factorization of a training set.

    Returns (N, p_s, w_s) with N(x,y) = n * p_s(x) * w_s(y|x) on every row
    with a positive count.  Rows of w_s whose x never occurs are set to the
    uniform row; that choice is a convention, not forced by the counts.
    """
    table = count_pairs(train)
    c = table.counts.astype(float)
    n = table.n
    row = c.sum(axis=1)
    p_s = Pmf(train.input, row / n)
    w = np.empty_like(c)
    seen = row > 0
    w[seen] = c[seen] / row[seen, None]
    w[~seen] = 1.0 / train.output.size
    return table, p_s, Channel(train.input, train.output, w)


def joint_of(p: Pmf, w: Channel) -> JointPmf:
    """The joint distribution (p x w)(x, y) = p(x) w(y|x)."""
    if p.alphabet != w.input:
        raise ValidationError(
            f"input alphabet mismatch: pmf size {p.alphabet.size}, channel {w.input.size}"
        )
    return JointPmf(w.input, w.output, p.prob[:, None] * w.rows)


def marginals(j: JointPmf) -> tuple[Pmf, Pmf]:
    """Input and output marginals of a joint distribution."""
    return Pmf(j.input, j.prob.sum(axis=1)), Pmf(j.output, j.prob.sum(axis=0))


def output_marginal(p: Pmf, w: Channel) -> Pmf:
    """The output distribution pw(y) = sum_x p(x) w(y|x)."""
    if p.alphabet != w.input:
        raise ValidationError("input alphabet mismatch")
    return Pmf(w.output, p.prob @ w.rows)
