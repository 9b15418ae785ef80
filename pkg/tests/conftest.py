import numpy as np
import pytest

from dmclearn import Channel, Pmf, example_channel


@pytest.fixture(scope="session")
def example():
    """Uniform binary input and the built-in 2x3 channel."""
    return example_channel()


def random_instance(rng, max_size=4, zero_cell_prob=0.0):
    """A random (Pmf, Channel, metric values) triple for property tests."""
    xs = int(rng.integers(2, max_size + 1))
    ys = int(rng.integers(2, max_size + 1))
    p = Pmf.from_probs(rng.dirichlet(np.ones(xs)))
    w = Channel.from_rows(rng.dirichlet(np.ones(ys), size=xs))
    k = rng.gamma(0.5, size=(xs, ys)) * np.exp(rng.normal(0, 3))
    if rng.random() < zero_cell_prob:
        k[rng.integers(xs), rng.integers(ys)] = 0.0
    return p, w, k
