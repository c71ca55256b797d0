"""Tests for the channel model and the channel file format."""

import json

import numpy as np
import pytest

from twc_bounds.channel_model import (
    ChannelMatrix,
    Direction,
    Distribution,
    TwoWayChannel,
    declared_parameters,
    load_channel,
    read_channel,
    save_channel,
    sub_channel,
    sub_channel_stack,
    swap_terminals,
)
from twc_bounds.errors import ChannelFormatError, ChannelValidationError


def _doc(**overrides):
    doc = {
        "nx1": 2,
        "nx2": 2,
        "ny1": 2,
        "ny2": 2,
        "forward": [[[1, 0], [0, 1]], [[0, 1], [1, 0]]],
        "backward": [[[1, 0], [1, 0]], [[0, 1], [0, 1]]],
    }
    doc.update(overrides)
    return json.dumps(doc)


class TestDistribution:
    def test_uniform_and_point_mass(self):
        assert Distribution.uniform(4).probs == (0.25, 0.25, 0.25, 0.25)
        assert Distribution.point_mass(3, 1).probs == (0.0, 1.0, 0.0)

    @pytest.mark.parametrize("probs", [(), (0.5, 0.6), (1.2, -0.2), (float("nan"), 1.0)])
    def test_invalid_rejected(self, probs):
        with pytest.raises(ValueError):
            Distribution(probs)

    def test_sum_tolerance(self):
        Distribution((0.5, 0.5 + 5e-10))
        with pytest.raises(ValueError):
            Distribution((0.5, 0.5 + 5e-9))


class TestChannelMatrix:
    def test_entries_read_only(self):
        ch = ChannelMatrix([[0.5, 0.5], [0.1, 0.9]])
        with pytest.raises(ValueError):
            ch.entries[0, 0] = 1.0

    def test_row_sum_checked(self):
        with pytest.raises(ChannelValidationError, match="sums to"):
            ChannelMatrix([[0.5, 0.6]])

    def test_negative_entry_reported_with_position(self):
        with pytest.raises(ChannelValidationError, match=r"\[1, 0\]"):
            ChannelMatrix([[1.0, 0.0], [-0.1, 1.1]])


class TestLoadChannel:
    def test_table1_dimensions(self, table1):
        assert (table1.nx1, table1.nx2, table1.ny1, table1.ny2) == (2, 3, 3, 2)

    def test_bytes_input(self):
        ch = load_channel(_doc().encode("utf-8"))
        assert ch.nx1 == 2

    def test_invalid_json(self):
        with pytest.raises(ChannelFormatError, match="invalid JSON"):
            load_channel("{ not json")

    def test_unknown_key(self):
        with pytest.raises(ChannelFormatError, match="unknown key"):
            load_channel(_doc(extra=1))

    def test_missing_tensor(self):
        doc = json.loads(_doc())
        del doc["backward"]
        with pytest.raises(ChannelFormatError, match="backward"):
            load_channel(json.dumps(doc))

    def test_dimension_mismatch(self):
        with pytest.raises(ChannelValidationError, match="dimension mismatch"):
            load_channel(_doc(nx1=3))

    def test_row_not_summing_to_one(self):
        with pytest.raises(ChannelValidationError, match="sums to"):
            load_channel(_doc(forward=[[[0.5, 0.4], [0, 1]], [[0, 1], [1, 0]]]))

    def test_boolean_entry_rejected(self):
        with pytest.raises(ChannelFormatError):
            load_channel(_doc(forward=[[[True, 0], [0, 1]], [[0, 1], [1, 0]]]))

    def test_consistent_joint_accepted(self):
        # y1 and y2 independent given (x1, x2)
        fwd = np.array(json.loads(_doc())["forward"], dtype=float)
        bwd = np.array(json.loads(_doc())["backward"], dtype=float)
        joint = np.einsum("abi,abj->abij", bwd, fwd).tolist()
        ch = load_channel(_doc(joint=joint))
        assert ch.ny1 == 2

    def test_inconsistent_joint_rejected(self):
        joint = [[[[0.25, 0.25], [0.25, 0.25]]] * 2] * 2
        with pytest.raises(ChannelValidationError, match="joint"):
            load_channel(_doc(joint=joint))


class TestParameters:
    def test_gamma_substituted(self, table2):
        ch = table2(0.3)
        np.testing.assert_allclose(ch.forward[1, 1], [0.2, 0.3, 0.5])
        np.testing.assert_allclose(ch.forward[2, 1], [0.2, 0.5, 0.3])

    def test_missing_value(self, fixtures_dir):
        with pytest.raises(ChannelValidationError, match="free parameter 'gamma'"):
            read_channel(fixtures_dir / "table2.json")

    @pytest.mark.parametrize("gamma", [-0.1, 0.81])
    def test_out_of_range(self, fixtures_dir, gamma):
        with pytest.raises(ChannelValidationError, match="outside"):
            read_channel(fixtures_dir / "table2.json", {"gamma": gamma})

    def test_declared_parameters(self, fixtures_dir):
        text = (fixtures_dir / "table2.json").read_text()
        assert declared_parameters(text) == {"gamma": (0.0, 0.8)}
        assert declared_parameters((fixtures_dir / "table1.json").read_text()) == {}

    @pytest.mark.parametrize(
        "ranges, message",
        [
            (0.5, "range must be"),
            ([None, 1], "range must be"),
            ([0, 1, 2], "range must be"),
            ([1, 0], "above high"),
            ([0, float("inf")], "finite"),
        ],
    )
    def test_malformed_range(self, ranges, message):
        doc = _doc(parameters={"gamma": ranges})
        with pytest.raises(ChannelFormatError, match=message):
            declared_parameters(doc)
        with pytest.raises(ChannelFormatError, match=message):
            load_channel(doc, {"gamma": 0.5})

    def test_parameters_must_be_a_mapping(self):
        with pytest.raises(ChannelFormatError, match="must map names"):
            declared_parameters(_doc(parameters=[[0, 1]]))

    def test_function_calls_rejected(self):
        doc = _doc(
            parameters={"g": [0, 1]},
            forward=[[["__import__('os')", 0], [0, 1]], [[0, 1], [1, 0]]],
        )
        with pytest.raises(ChannelFormatError, match="unsupported syntax"):
            load_channel(doc, {"g": 0.5})

    def test_arithmetic_expression(self):
        doc = _doc(parameters={"g": [0, 1]}, forward=[[["g / 2", "1 - g/2"], [0, 1]], [[0, 1], [1, 0]]])
        ch = load_channel(doc, {"g": 0.5})
        np.testing.assert_allclose(ch.forward[0, 0], [0.25, 0.75])


class TestSubChannels:
    def test_forward_sub_channel_fixes_x2(self, table1):
        w = sub_channel(table1, Direction.FORWARD, 1)
        np.testing.assert_array_equal(w.entries, [[1.0, 0.0], [0.25, 0.75]])

    def test_backward_sub_channel_fixes_x1(self, bsc_channel):
        w = sub_channel(bsc_channel, Direction.BACKWARD, 0)
        np.testing.assert_array_equal(w.entries, [[0.96, 0.04], [0.04, 0.96]])

    def test_out_of_range_symbol(self, table1):
        with pytest.raises(IndexError):
            sub_channel(table1, Direction.FORWARD, 3)
        with pytest.raises(IndexError):
            sub_channel(table1, Direction.BACKWARD, -1)

    def test_stack_matches_sub_channels(self, table1):
        stack = sub_channel_stack(table1, Direction.FORWARD)
        assert stack.shape == (3, 2, 2)
        for s in range(3):
            np.testing.assert_array_equal(stack[s], sub_channel(table1, Direction.FORWARD, s).entries)


class TestSwapAndSave:
    def test_swap_is_an_involution(self, table1):
        assert swap_terminals(swap_terminals(table1)) == table1

    def test_swap_exchanges_directions(self, table1):
        swapped = swap_terminals(table1)
        assert (swapped.nx1, swapped.nx2, swapped.ny1, swapped.ny2) == (3, 2, 2, 3)
        np.testing.assert_array_equal(
            sub_channel(swapped, Direction.FORWARD, 0).entries,
            sub_channel(table1, Direction.BACKWARD, 0).entries,
        )

    def test_save_then_load_is_exact(self, rng, random_stochastic):
        ch = TwoWayChannel(
            forward=random_stochastic(rng, (2, 3, 2)), backward=random_stochastic(rng, (2, 3, 4))
        )
        assert load_channel(save_channel(ch)) == ch
