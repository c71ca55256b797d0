"""Uniform quantization of the probability simplex and local refinement moves.

Grid points are the vectors (m_1, ..., m_k) * delta with non-negative integers
m_i summing to n = 1/delta. They are enumerated in lexicographic order of the
composition vector (m_1, ..., m_k), which coincides with the lexicographic
order of the "bar positions" of the stars-and-bars bijection, so
`itertools.combinations` does the enumeration in C.
"""

import itertools
import math
from dataclasses import dataclass
from typing import Callable, Iterator, List, Optional, Tuple

import numpy as np

from .channel_model import Distribution
from .errors import EvaluationCapError, GridSpecError

INDEX_LIMIT = 2**63 - 1

# Fixed chunk length for sweeps: chunk boundaries must not depend on the
# worker count, otherwise reductions could differ between runs.
CHUNK_ROWS = 1 << 14


@dataclass(frozen=True)
class GridSpec:
    """Quantization of the (dim-1)-simplex with step `delta`."""

    dim: int
    delta: float

    def __post_init__(self) -> None:
        if isinstance(self.dim, bool) or not isinstance(self.dim, int) or self.dim < 1:
            raise GridSpecError(f"grid dimension must be a positive integer, got {self.dim!r}")
        if not 0.0 < self.delta <= 1.0:
            raise GridSpecError(f"delta must be in (0, 1], got {self.delta!r}")
        steps = 1.0 / self.delta
        if abs(steps - round(steps)) > 1e-9:
            raise GridSpecError(f"1/delta must be an integer, got 1/{self.delta!r} = {steps!r}")

    @property
    def steps(self) -> int:
        """n = 1/delta, the number of quanta distributed over the coordinates."""
        return int(round(1.0 / self.delta))


def grid_count(spec: GridSpec) -> int:
    """Number of grid points, C(n + k - 1, n).

    Raises:
        EvaluationCapError: if the count does not fit a signed 64-bit index
    """
    count = math.comb(spec.steps + spec.dim - 1, spec.steps)
    if count > INDEX_LIMIT:
        raise EvaluationCapError(
            f"grid of dimension {spec.dim} at delta={spec.delta} has {count} points, "
            "beyond the 64-bit index range"
        )
    return count


def _compositions(bars: np.ndarray, n: int, k: int) -> np.ndarray:
    total = n + k - 1
    rows = bars.shape[0]
    left = np.full((rows, 1), -1, dtype=np.int64)
    right = np.full((rows, 1), total, dtype=np.int64)
    return np.diff(np.hstack([left, bars, right]), axis=1) - 1


def iter_grid_chunks(
    spec: GridSpec, rows: Optional[int] = None
) -> Iterator[Tuple[int, np.ndarray]]:
    """Yield (offset, points) blocks of the grid in lexicographic order.

    `points` is a float array of shape (<= rows, dim); `offset` is the
    lexicographic index of its first row.
    """
    if rows is None:
        rows = CHUNK_ROWS
    n, k = spec.steps, spec.dim
    bars_iter = itertools.combinations(range(n + k - 1), k - 1)
    offset = 0
    while True:
        block = list(itertools.islice(bars_iter, rows))
        if not block:
            return
        bars = np.array(block, dtype=np.int64).reshape(len(block), k - 1)
        yield offset, _compositions(bars, n, k) / n
        offset += len(block)


def grid_array(spec: GridSpec) -> np.ndarray:
    """The whole grid as one (grid_count, dim) array."""
    grid_count(spec)
    blocks = [points for _, points in iter_grid_chunks(spec)]
    return np.vstack(blocks)


def enumerate_grid(spec: GridSpec) -> Iterator[Distribution]:
    """Stream every grid distribution in lexicographic order."""
    for _, points in iter_grid_chunks(spec):
        for row in points:
            yield Distribution.from_array(row)


def neighborhood_array(p: np.ndarray, step: float) -> np.ndarray:
    """`p` followed by every feasible move of `step` mass from coordinate i to j."""
    k = p.shape[0]
    out = [p.copy()]
    for i in range(k):
        if p[i] < step - 1e-12:
            continue
        for j in range(k):
            if i == j:
                continue
            q = p.copy()
            q[i] = max(q[i] - step, 0.0)
            q[j] += step
            out.append(q)
    return np.vstack(out)


def refine_neighborhood(p: Distribution, step: float) -> List[Distribution]:
    """`p` plus all distributions reachable by moving `step` mass between two coordinates."""
    if step <= 0:
        raise ValueError(f"step must be positive, got {step!r}")
    return [Distribution.from_array(row) for row in neighborhood_array(p.as_array(), step)]


def local_search(
    objective: Callable[[np.ndarray], np.ndarray],
    start: np.ndarray,
    step: float,
    min_step: float,
    maximize: bool = False,
) -> Tuple[np.ndarray, float, int]:
    """Pattern search over refine moves with step halving.

    `objective` maps an (N, k) array of distributions to N values. From
    `start`, move to the best neighbour while it strictly improves; otherwise
    halve the step. Stops once the step falls below `min_step`.

    Returns (point, value, number of objective evaluations).
    """
    sign = -1.0 if maximize else 1.0
    current = np.asarray(start, dtype=float)
    value = float(objective(current[None, :])[0])
    evaluations = 1
    if current.shape[0] == 1:
        return current, value, evaluations
    while step >= min_step:
        candidates = neighborhood_array(current, step)
        values = objective(candidates)
        evaluations += len(candidates)
        best = int(np.argmin(sign * values))
        if sign * values[best] < sign * value - 1e-15:
            current, value = candidates[best], float(values[best])
        else:
            step /= 2.0
    return current, value, evaluations
