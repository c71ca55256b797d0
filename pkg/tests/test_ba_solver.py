"""Tests for Blahut-Arimoto capacity and output-entropy maximization."""

import itertools
import math

import numpy as np
import pytest

from twc_bounds.ba_solver import ba_capacity, ba_iterate, max_output_entropy
from twc_bounds.channel_model import ChannelMatrix
from twc_bounds.info_measures import entropy_rows, mi_batch, output_distributions
from twc_bounds.simplex_grid import GridSpec, grid_array


def h2(p: float) -> float:
    return 0.0 if p in (0.0, 1.0) else -p * math.log2(p) - (1 - p) * math.log2(1 - p)


@pytest.mark.parametrize("p", [0.0, 0.04, 0.1, 0.25])
def test_bsc_capacity(p):
    result = ba_capacity(ChannelMatrix([[1 - p, p], [p, 1 - p]]))
    assert result.converged
    assert result.capacity == pytest.approx(1 - h2(p), abs=1e-9)
    assert result.optimizer.probs == pytest.approx((0.5, 0.5), abs=1e-6)


@pytest.mark.parametrize("p", [0.1, 0.25, 0.5])
def test_z_channel_closed_form(p):
    expected = math.log2(1 + (1 - p) * p ** (p / (1 - p)))
    result = ba_capacity(ChannelMatrix([[1.0, 0.0], [p, 1 - p]]))
    assert result.capacity == pytest.approx(expected, abs=1e-8)
    assert result.gap <= 1e-10


def test_noiseless_channel():
    result = ba_capacity(ChannelMatrix(np.eye(4)))
    assert result.capacity == pytest.approx(2.0)
    assert result.iterations == 1


def test_useless_channel_has_zero_capacity():
    result = ba_capacity(ChannelMatrix([[0.3, 0.7], [0.3, 0.7], [0.3, 0.7]]))
    assert result.capacity == pytest.approx(0.0, abs=1e-12)


def test_matches_one_dimensional_grid_oracle(rng, random_stochastic):
    q = np.linspace(0.0, 1.0, 100001)
    inputs = np.stack([1 - q, q], axis=1)
    for _ in range(100):
        outputs = int(rng.integers(2, 5))
        w = random_stochastic(rng, (2, outputs))
        oracle = float(mi_batch(inputs, w).max())
        assert ba_capacity(ChannelMatrix(w)).capacity == pytest.approx(oracle, abs=1e-4)


def test_lower_bounds_are_monotone_and_bracket_capacity():
    w = ChannelMatrix([[0.7, 0.3], [1.0, 0.0], [0.5, 0.5]])
    capacity = ba_capacity(w).capacity
    steps = list(itertools.islice(ba_iterate(w), 30))
    lowers = [lower for _, lower, _ in steps]
    assert all(b >= a - 1e-15 for a, b in zip(lowers, lowers[1:]))
    for _, lower, upper in steps:
        assert lower <= capacity + 1e-9
        assert capacity <= upper + 1e-12


def test_iteration_limit_returns_best_iterate():
    result = ba_capacity(ChannelMatrix([[1.0, 0.0], [0.5, 0.5]]), max_iter=1)
    assert not result.converged
    assert result.iterations == 1
    assert 0.0 < result.capacity < 0.33


@pytest.mark.parametrize("kwargs", [{"tol": 0.0}, {"max_iter": 0}])
def test_invalid_arguments(kwargs):
    with pytest.raises(ValueError):
        ba_capacity(ChannelMatrix(np.eye(2)), **kwargs)


class TestMaxOutputEntropy:
    def test_z_channel_maximum_on_the_boundary(self):
        value, p = max_output_entropy(ChannelMatrix([[1.0, 0.0], [0.5, 0.5]]))
        assert value == pytest.approx(1.0, abs=1e-9)
        assert p.probs == pytest.approx((0.0, 1.0), abs=1e-6)

    def test_bsc_uniform_output(self):
        value, p = max_output_entropy(ChannelMatrix([[0.9, 0.1], [0.1, 0.9]]))
        assert value == pytest.approx(1.0, abs=1e-12)
        assert p.probs == pytest.approx((0.5, 0.5), abs=1e-6)


def test_capacity_ignores_row_and_column_order(rng, random_stochastic):
    for _ in range(20):
        rows, cols = (int(n) for n in rng.integers(2, 5, size=2))
        w = random_stochastic(rng, (rows, cols))
        shuffled = w[rng.permutation(rows)][:, rng.permutation(cols)]
        assert ba_capacity(ChannelMatrix(shuffled)).capacity == pytest.approx(
            ba_capacity(ChannelMatrix(w)).capacity, abs=1e-10
        )


@pytest.mark.parametrize("rows,cols", [(2, 3), (3, 2), (3, 3)])
def test_output_entropy_maximum_beats_the_seed_grid(rng, random_stochastic, rows, cols):
    grid = grid_array(GridSpec(rows, 0.05))
    for _ in range(5):
        w = random_stochastic(rng, (rows, cols))
        value, p = max_output_entropy(ChannelMatrix(w))
        assert value >= float(entropy_rows(output_distributions(grid, w)).max()) - 1e-12
        assert value == pytest.approx(float(entropy_rows(output_distributions(p.as_array()[None], w))[0]))
