"""Entropy and mutual information in bits.

Scalar functions take the library's value types; the `*_batch` variants take
stacks of distributions as numpy arrays and are what the sweeps use. Kernels
use element-wise products and axis sums only (no BLAS matrix products), so a
row's value never depends on how many rows are evaluated together.
"""

from dataclasses import dataclass
from typing import Union

import numpy as np

from .channel_model import (
    SUM_TOL,
    ChannelMatrix,
    Direction,
    Distribution,
    TwoWayChannel,
    sub_channel_stack,
)

ZERO_PROB = 1e-15

ProbLike = Union[Distribution, np.ndarray]


@dataclass(frozen=True, eq=False)
class JointInput:
    """Joint input distribution P(x1, x2) as a matrix [x1][x2]."""

    probs: np.ndarray

    def __post_init__(self) -> None:
        arr = np.array(self.probs, dtype=float)
        if arr.ndim != 2:
            raise ValueError(f"joint input must be a matrix [x1][x2], got shape {arr.shape}")
        if np.any(arr < 0.0) or abs(arr.sum() - 1.0) > SUM_TOL:
            raise ValueError("joint input must be non-negative and sum to 1")
        arr.setflags(write=False)
        object.__setattr__(self, "probs", arr)

    @classmethod
    def product(cls, px1: Distribution, px2: Distribution) -> "JointInput":
        return cls(np.outer(px1.as_array(), px2.as_array()))

    def marginal_x1(self) -> Distribution:
        return Distribution.from_array(self.probs.sum(axis=1))

    def marginal_x2(self) -> Distribution:
        return Distribution.from_array(self.probs.sum(axis=0))

    def to_lists(self) -> list:
        return self.probs.tolist()

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, JointInput):
            return NotImplemented
        return np.array_equal(self.probs, other.probs)

    def __hash__(self) -> int:
        return hash(self.probs.tobytes())


def _as_array(p: ProbLike) -> np.ndarray:
    return p.as_array() if isinstance(p, Distribution) else np.asarray(p, dtype=float)


def neg_plogp(p: np.ndarray) -> np.ndarray:
    """Element-wise -p*log2(p), with terms below ZERO_PROB taken as 0."""
    mask = p > ZERO_PROB
    safe = np.where(mask, p, 1.0)
    return np.where(mask, -safe * np.log2(safe), 0.0)


def entropy_rows(p: np.ndarray) -> np.ndarray:
    """Entropy of every distribution along the last axis."""
    return neg_plogp(p).sum(axis=-1)


def entropy(p: ProbLike) -> float:
    """H(p) = -sum p_i log2 p_i."""
    return float(entropy_rows(_as_array(p)))


def output_distributions(inputs: np.ndarray, channel: np.ndarray) -> np.ndarray:
    """Output laws for a stack of inputs (N, k) through a channel (k, m) -> (N, m)."""
    return (inputs[:, :, None] * channel[None, :, :]).sum(axis=1)


def mi_batch(inputs: np.ndarray, channel: np.ndarray) -> np.ndarray:
    """I(P, W) for every row P of `inputs` (N, k) and one channel W (k, m)."""
    h_out = entropy_rows(output_distributions(inputs, channel))
    h_rows = entropy_rows(channel)
    h_noise = (inputs * h_rows[None, :]).sum(axis=1)
    return np.maximum(h_out - h_noise, 0.0)


def mi_stack(inputs: np.ndarray, stack: np.ndarray) -> np.ndarray:
    """I(P, W_s) for every input row and every sub-channel W_s -> (N, S)."""
    return np.stack([mi_batch(inputs, stack[s]) for s in range(stack.shape[0])], axis=1)


def output_entropy_stack(inputs: np.ndarray, stack: np.ndarray) -> np.ndarray:
    """H(P W_s) for every input row and every sub-channel -> (N, S)."""
    return np.stack(
        [entropy_rows(output_distributions(inputs, stack[s])) for s in range(stack.shape[0])],
        axis=1,
    )


def mutual_information(px: ProbLike, ch: ChannelMatrix) -> float:
    """I(X;Y) for input law `px` through `ch`."""
    p = _as_array(px)
    if p.shape != (ch.rows,):
        raise ValueError(f"input has {p.shape[0]} symbols but the channel has {ch.rows} rows")
    return float(mi_batch(p[None, :], ch.entries)[0])


def conditional_mi_batch(joints: np.ndarray, ch: TwoWayChannel, direction: Direction) -> np.ndarray:
    """I(X1;Y2|X2) (forward) or I(X2;Y1|X1) (backward) for a stack of joints (N, nx1, nx2)."""
    if direction is Direction.FORWARD:
        law = ch.forward  # [x1][x2][y2]
        # P(x2, y2) = sum_x1 P(x1, x2) W(y2|x1, x2)
        pair = (joints[:, :, :, None] * law[None]).sum(axis=1)
        h_cond = entropy_rows(joints.sum(axis=1))
    else:
        law = ch.backward  # [x1][x2][y1]
        pair = (joints[:, :, :, None] * law[None]).sum(axis=2)
        h_cond = entropy_rows(joints.sum(axis=2))
    n = joints.shape[0]
    h_pair = entropy_rows(pair.reshape(n, -1))
    h_noise = (joints * entropy_rows(law)[None]).reshape(n, -1).sum(axis=1)
    return np.maximum(h_pair - h_cond - h_noise, 0.0)


def conditional_mi(joint: JointInput, ch: TwoWayChannel, direction: Direction) -> float:
    """Conditional mutual information of one direction under a joint input."""
    if joint.probs.shape != (ch.nx1, ch.nx2):
        raise ValueError(
            f"joint input is {joint.probs.shape} but the channel inputs are ({ch.nx1}, {ch.nx2})"
        )
    return float(conditional_mi_batch(joint.probs[None], ch, direction)[0])


def conditional_output_entropy(px2: ProbLike, ch: TwoWayChannel, x1: int) -> float:
    """H(Y1 | X1=x1) when terminal 2 uses `px2`."""
    if not 0 <= x1 < ch.nx1:
        raise IndexError(f"x1={x1} out of range for |X1|={ch.nx1}")
    p = _as_array(px2)
    if p.shape != (ch.nx2,):
        raise ValueError(f"px2 has {p.shape[0]} symbols, expected {ch.nx2}")
    return float(entropy_rows(output_distributions(p[None, :], ch.backward[x1]))[0])


def row_entropy_table(ch: TwoWayChannel, direction: Direction) -> np.ndarray:
    """H of every transition row, indexed [x1][x2]."""
    stack = sub_channel_stack(ch, direction)  # [state][input][output]
    table = entropy_rows(stack)
    return table.T if direction is Direction.FORWARD else table
