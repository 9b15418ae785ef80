import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from dmclearn import (
    Channel,
    Pmf,
    binary_entropy,
    entropy,
    joint_of,
    miller_madow,
    mm_error_bound,
    mutual_information,
)
from dmclearn.infotheory import LOG2E, miller_madow_counts


class TestEntropy:
    def test_uniform_two(self):
        assert entropy(Pmf.uniform(2)) == 1.0

    def test_example_output_marginal(self):
        assert abs(entropy(Pmf.from_probs([0.45, 0.10, 0.45])) - 1.368996) < 1e-6

    def test_point_mass(self):
        assert entropy(Pmf.point_mass(5, 2)) == 0.0

    @given(st.integers(2, 8), st.integers(0, 10**6))
    def test_bounds(self, size, seed):
        p = Pmf.from_probs(np.random.default_rng(seed).dirichlet(np.ones(size)))
        assert 0.0 <= entropy(p) <= math.log2(size) + 1e-12


class TestMutualInformation:
    def test_example_channel(self, example):
        assert abs(mutual_information(*example) - 0.663912) < 1e-4

    def test_identical_rows_give_zero(self):
        w = Channel.from_rows(np.tile([0.3, 0.7], (2, 1)))
        assert mutual_information(Pmf.uniform(2), w) == 0.0

    def test_noiseless_identity(self):
        assert abs(mutual_information(Pmf.uniform(2), Channel.from_rows(np.eye(2))) - 1.0) < 1e-12

    @given(st.integers(2, 5), st.integers(2, 5), st.integers(0, 10**6))
    def test_three_entropy_identity(self, xs, ys, seed):
        rng = np.random.default_rng(seed)
        p = Pmf.from_probs(rng.dirichlet(np.ones(xs)))
        w = Channel.from_rows(rng.dirichlet(np.ones(ys), size=xs))
        joint = joint_of(p, w)
        h_joint = entropy(Pmf.from_probs(joint.prob.ravel()))
        hy = entropy(Pmf.from_probs(joint.prob.sum(axis=0)))
        assert abs(mutual_information(p, w) - (entropy(p) + hy - h_joint)) < 1e-10


class TestMillerMadow:
    def test_degenerate_sequence(self):
        est = miller_madow([0, 0, 0, 0], 2)
        assert abs(est.value - LOG2E / 8) < 1e-12
        assert est.plugin == 0.0

    def test_counts_three_one(self):
        est = miller_madow([0, 0, 0, 1], 2)
        assert abs(est.value - (0.811278 + 0.180337)) < 1e-6

    def test_uniform_counts(self):
        est = miller_madow([0, 1, 2, 3], 4)
        assert abs(est.value - (2.0 + 3 / 8 * LOG2E)) < 1e-12
        assert abs(est.value - 2.541011) < 1e-6

    def test_correction_formula(self):
        est = miller_madow_counts(np.array([7, 2, 1]), 5)
        assert est.n == 10
        assert abs(est.correction - 4 / 20 * LOG2E) < 1e-15
        assert abs(est.plugin - entropy(Pmf.from_probs([0.7, 0.2, 0.1]))) < 1e-12

    def test_order_invariance(self):
        a = miller_madow([0, 1, 1, 2, 0], 3)
        b = miller_madow([1, 0, 2, 0, 1], 3)
        assert a == b

    def test_symbol_out_of_range(self):
        with pytest.raises(ValueError):
            miller_madow([0, 3], 3)


class TestErrorBound:
    def test_reference_value(self):
        # independently: 5/200 * log2(e) + log2(100) * sqrt(0.02 * ln 20)
        expected = 0.0360674 + 6.6438562 * math.sqrt(0.02 * math.log(20.0))
        assert abs(mm_error_bound(100, 6, 0.1) - expected) < 1e-6
        assert abs(mm_error_bound(100, 6, 0.1) - 1.662315) < 1e-5

    def test_two_samples_singleton_alphabet(self):
        assert abs(mm_error_bound(2, 1, 0.5) - math.sqrt(math.log(4))) < 1e-9

    def test_singleton_alphabet_has_no_bias_term(self):
        for n in (2, 10, 1000):
            assert mm_error_bound(n, 1, 0.3) == math.log2(n) * math.sqrt(
                2.0 / n * math.log(2 / 0.3)
            )

    def test_requires_two_samples(self):
        with pytest.raises(ValueError):
            mm_error_bound(1, 2, 0.1)


class TestBinaryEntropy:
    def test_half(self):
        assert binary_entropy(0.5) == 1.0

    def test_endpoints(self):
        assert binary_entropy(0.0) == 0.0
        assert binary_entropy(1.0) == 0.0

    def test_point_one(self):
        assert abs(binary_entropy(0.1) - 0.468996) < 1e-6

    def test_symmetry_and_monotonicity(self):
        grid = np.linspace(0.0, 0.5, 1000)
        vals = [binary_entropy(t) for t in grid]
        assert all(b > a for a, b in zip(vals, vals[1:]))
        for t in grid:
            assert abs(binary_entropy(t) - binary_entropy(1 - t)) < 1e-15

    def test_rejects_out_of_range(self):
        with pytest.raises(ValueError):
            binary_entropy(1.1)


def test_miller_madow_coverage_small_sample():
    """Estimation error within the stated bound in at least 1 - delta of trials."""
    rng = np.random.default_rng(11)
    probs = np.array([0.6, 0.25, 0.1, 0.05])
    truth = entropy(Pmf.from_probs(probs))
    n, delta, trials = 50, 0.1, 500
    bound = mm_error_bound(n, len(probs), delta)
    counts = rng.multinomial(n, probs, size=trials)
    hits = 0
    for c in counts:
        if abs(miller_madow_counts(c, len(probs)).value - truth) <= bound:
            hits += 1
    assert hits / trials >= 1 - delta
