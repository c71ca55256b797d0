"""Tests for entropy and (conditional) mutual information."""

import math

import numpy as np
import pytest

from twc_bounds.channel_model import ChannelMatrix, Direction, Distribution, TwoWayChannel, sub_channel
from twc_bounds.info_measures import (
    JointInput,
    conditional_mi,
    conditional_output_entropy,
    entropy,
    mi_batch,
    mutual_information,
    row_entropy_table,
)
from twc_bounds.simplex_grid import GridSpec, grid_array


def h2(p: float) -> float:
    return 0.0 if p in (0.0, 1.0) else -p * math.log2(p) - (1 - p) * math.log2(1 - p)


def test_entropy_values():
    assert entropy(Distribution.uniform(8)) == pytest.approx(3.0)
    assert entropy(Distribution.point_mass(5, 2)) == 0.0
    assert entropy(np.array([0.25, 0.75])) == pytest.approx(h2(0.25))


@pytest.mark.parametrize("p", [0.0, 0.04, 0.1, 0.5])
def test_bsc_uniform_input(p):
    w = ChannelMatrix([[1 - p, p], [p, 1 - p]])
    assert mutual_information(Distribution.uniform(2), w) == pytest.approx(1 - h2(p), abs=1e-12)


def test_noiseless_channel_gives_input_entropy():
    px = Distribution((0.2, 0.3, 0.5))
    assert mutual_information(px, ChannelMatrix(np.eye(3))) == pytest.approx(entropy(px))


def test_mutual_information_dimension_mismatch():
    with pytest.raises(ValueError, match="rows"):
        mutual_information(Distribution.uniform(3), ChannelMatrix(np.eye(2)))


def test_batch_rows_are_independent(rng, random_stochastic):
    w = random_stochastic(rng, (3, 4))
    inputs = random_stochastic(rng, (50, 3))
    together = mi_batch(inputs, w)
    one_by_one = np.array([mi_batch(row[None, :], w)[0] for row in inputs])
    np.testing.assert_allclose(together, one_by_one, rtol=0, atol=1e-14)


class TestConditionalMI:
    def test_product_input_is_weighted_sum(self, table1):
        px1 = Distribution((0.3, 0.7))
        px2 = Distribution((0.2, 0.5, 0.3))
        joint = JointInput.product(px1, px2)
        expected_fwd = sum(
            q * mutual_information(px1, sub_channel(table1, Direction.FORWARD, x2))
            for x2, q in enumerate(px2.probs)
        )
        expected_bwd = sum(
            q * mutual_information(px2, sub_channel(table1, Direction.BACKWARD, x1))
            for x1, q in enumerate(px1.probs)
        )
        assert conditional_mi(joint, table1, Direction.FORWARD) == pytest.approx(expected_fwd, abs=1e-12)
        assert conditional_mi(joint, table1, Direction.BACKWARD) == pytest.approx(expected_bwd, abs=1e-12)

    def test_correlated_inputs(self):
        # Y2 = X1 xor X2: knowing X2, Y2 reveals X1
        fwd = np.zeros((2, 2, 2))
        for a in range(2):
            for b in range(2):
                fwd[a, b, a ^ b] = 1.0
        ch = TwoWayChannel(forward=fwd, backward=np.full((2, 2, 2), 0.5))
        joint = JointInput([[0.5, 0.0], [0.0, 0.5]])
        # X1 = X2, so X1 is known given X2
        assert conditional_mi(joint, ch, Direction.FORWARD) == pytest.approx(0.0, abs=1e-12)
        independent = JointInput([[0.25, 0.25], [0.25, 0.25]])
        assert conditional_mi(independent, ch, Direction.FORWARD) == pytest.approx(1.0)
        assert conditional_mi(independent, ch, Direction.BACKWARD) == pytest.approx(0.0, abs=1e-12)

    def test_shape_mismatch(self, table1):
        with pytest.raises(ValueError):
            conditional_mi(JointInput([[0.5, 0.5]]), table1, Direction.FORWARD)


class TestJointInput:
    def test_marginals(self):
        joint = JointInput([[0.1, 0.2], [0.3, 0.4]])
        assert joint.marginal_x1().probs == pytest.approx((0.3, 0.7))
        assert joint.marginal_x2().probs == pytest.approx((0.4, 0.6))

    def test_invalid(self):
        with pytest.raises(ValueError):
            JointInput([[0.5, 0.6], [0.0, 0.0]])
        with pytest.raises(ValueError):
            JointInput([0.5, 0.5])


def test_conditional_output_entropy(bsc_channel):
    # backward sub-channel at x1=0 is BSC(0.04)
    assert conditional_output_entropy(Distribution((1.0, 0.0)), bsc_channel, 0) == pytest.approx(h2(0.04))
    assert conditional_output_entropy(Distribution.uniform(2), bsc_channel, 1) == pytest.approx(1.0)
    with pytest.raises(IndexError):
        conditional_output_entropy(Distribution.uniform(2), bsc_channel, 2)


def test_row_entropy_table(bsc_channel):
    backward = row_entropy_table(bsc_channel, Direction.BACKWARD)
    np.testing.assert_allclose(backward, [[h2(0.04), h2(0.04)], [h2(0.1), h2(0.1)]])
    forward = row_entropy_table(bsc_channel, Direction.FORWARD)
    # indexed [x1][x2]; forward crossover depends on x2
    np.testing.assert_allclose(forward, [[h2(0.1), h2(0.2)], [h2(0.1), h2(0.2)]])


def h3(p):
    return -sum(x * math.log2(x) for x in p if x > 0)


def test_row_entropy_table_on_table1(table1):
    backward = row_entropy_table(table1, Direction.BACKWARD)
    np.testing.assert_allclose(backward, np.full((2, 3), h3((0.8, 0.1, 0.1))), atol=1e-12)
    forward = row_entropy_table(table1, Direction.FORWARD)
    np.testing.assert_allclose(forward, [[h2(0.3), 0.0, 1.0], [h2(0.1), h2(0.25), 0.0]], atol=1e-12)


def test_row_entropy_table_on_table2(table2):
    ch = table2(0.3)
    backward = row_entropy_table(ch, Direction.BACKWARD)
    np.testing.assert_allclose(
        backward,
        [[h2(0.04), h2(0.04)], [h2(0.039), h2(0.041)], [h2(0.04), h2(0.041)]],
        atol=1e-12,
    )
    forward = row_entropy_table(ch, Direction.FORWARD)
    np.testing.assert_allclose(
        forward,
        [[0.0, h2(0.1)], [0.0, h3((0.2, 0.3, 0.5))], [1.0, h3((0.2, 0.5, 0.3))]],
        atol=1e-12,
    )


def test_table1_backward_uniform_product(table1):
    # both backward sub-channels are strongly symmetric with rows permuting (0.8, 0.1, 0.1)
    joint = JointInput.product(Distribution.uniform(2), Distribution.uniform(3))
    expected = math.log2(3) - h3((0.8, 0.1, 0.1))
    assert conditional_mi(joint, table1, Direction.BACKWARD) == pytest.approx(expected, abs=1e-12)
    assert expected == pytest.approx(0.663, abs=1e-3)


def test_table1_uniform_output_entropy(table1):
    assert conditional_output_entropy(Distribution.uniform(3), table1, 0) == pytest.approx(
        math.log2(3), abs=1e-12
    )


def test_output_relabelling_leaves_mi_unchanged(rng, random_stochastic):
    for _ in range(20):
        w = random_stochastic(rng, (3, 4))
        px = random_stochastic(rng, (3,))
        perm = rng.permutation(4)
        assert mutual_information(px, ChannelMatrix(w[:, perm])) == pytest.approx(
            mutual_information(px, ChannelMatrix(w)), abs=1e-12
        )


def test_entropy_is_concave(rng, random_stochastic):
    for _ in range(50):
        p, q = random_stochastic(rng, (2, 5))
        lam = float(rng.random())
        assert entropy(lam * p + (1 - lam) * q) >= lam * entropy(p) + (1 - lam) * entropy(q) - 1e-12


@pytest.mark.parametrize("rows,cols", [(2, 2), (2, 5), (3, 2), (4, 3)])
def test_mi_within_alphabet_limits(rng, random_stochastic, rows, cols):
    inputs = grid_array(GridSpec(rows, 0.1))
    channels = [random_stochastic(rng, (rows, cols)) for _ in range(5)]
    if rows <= cols:
        channels.append(np.eye(rows, cols))
    for w in channels:
        values = mi_batch(inputs, w)
        assert values.min() >= -1e-12
        assert values.max() <= min(math.log2(rows), math.log2(cols)) + 1e-12
