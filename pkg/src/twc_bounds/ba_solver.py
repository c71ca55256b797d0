"""One-way channel capacity via Blahut-Arimoto, and output-entropy maximization."""

from dataclasses import dataclass
from typing import Iterator, Tuple

import numpy as np

from .channel_model import ChannelMatrix, Distribution
from .info_measures import ZERO_PROB, entropy_rows, output_distributions
from .simplex_grid import GridSpec, grid_array, local_search

DEFAULT_TOL = 1e-10
DEFAULT_MAX_ITER = 10000

# Seed grid for the output-entropy maximizer.
ENTROPY_SEED_DELTA = 0.05


@dataclass(frozen=True)
class CapacityResult:
    """Outcome of a Blahut-Arimoto run."""

    capacity: float
    optimizer: Distribution
    gap: float
    iterations: int
    converged: bool = True


def _divergences(p: np.ndarray, w: np.ndarray) -> np.ndarray:
    """D(W(.|x) || pW) in bits for every input x."""
    q = (p[:, None] * w).sum(axis=0)
    mask = w > ZERO_PROB
    ratio = np.where(mask, w, 1.0) / np.where(mask, q[None, :], 1.0)
    return np.where(mask, w * np.log2(ratio), 0.0).sum(axis=1)


def ba_iterate(ch: ChannelMatrix) -> Iterator[Tuple[np.ndarray, float, float]]:
    """Blahut-Arimoto iterates from the uniform input.

    Each step computes D(x) = D(W(.|x) || pW) for the current p and yields
    (p_next, lower, upper), where lower = log2 sum_x p(x) 2^D(x) and
    upper = max_x D(x) bracket the capacity, p_next is the updated input
    and I(p_next, W) >= lower. The lower bounds are non-decreasing.
    """
    w = ch.entries
    p = np.full(ch.rows, 1.0 / ch.rows)
    while True:
        d = _divergences(p, w)
        # shift by max(d) so 2**d cannot overflow
        top = float(d.max())
        weights = p * np.exp2(d - top)
        total = float(weights.sum())
        lower = top + float(np.log2(total))
        p = weights / total
        yield p, lower, top


def ba_capacity(
    ch: ChannelMatrix, tol: float = DEFAULT_TOL, max_iter: int = DEFAULT_MAX_ITER
) -> CapacityResult:
    """Capacity of `ch` and a capacity-achieving input distribution.

    Stops when the upper/lower capacity bracket is within `tol`. After
    `max_iter` iterations the best iterate is returned with
    `converged=False` instead of raising.
    """
    if tol <= 0:
        raise ValueError(f"tol must be positive, got {tol!r}")
    if max_iter < 1:
        raise ValueError(f"max_iter must be >= 1, got {max_iter!r}")

    iterations = 0
    converged = False
    for p, lower, upper in ba_iterate(ch):
        iterations += 1
        gap = max(upper - lower, 0.0)
        if gap <= tol:
            converged = True
            break
        if iterations >= max_iter:
            break
    return CapacityResult(
        capacity=max(lower, 0.0),
        optimizer=Distribution.from_array(p),
        gap=gap,
        iterations=iterations,
        converged=converged,
    )


def max_output_entropy(ch: ChannelMatrix, tol: float = 1e-9) -> Tuple[float, Distribution]:
    """Maximize H(pW) over input laws p.

    The objective is concave: seed with the best point of the delta=0.05
    grid, then refine with halving pattern-search steps down to `tol`.
    """
    w = ch.entries

    def objective(points: np.ndarray) -> np.ndarray:
        return entropy_rows(output_distributions(points, w))

    seeds = grid_array(GridSpec(ch.rows, ENTROPY_SEED_DELTA))
    values = objective(seeds)
    start = seeds[int(np.argmax(values))]
    point, value, _ = local_search(objective, start, ENTROPY_SEED_DELTA, tol, maximize=True)
    return value, Distribution.from_array(point)
