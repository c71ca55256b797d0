"""Rate regions and capacity bounds for two-way channels.

Every region here is convex, downward closed and lives in the first
quadrant, so it is represented by its upper-right boundary (`Frontier`):
a concave polyline running from (0, max r2) to (max r1, 0).
"""

import itertools
from dataclasses import dataclass
from typing import Any, Callable, Dict, List, NamedTuple, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import optimize

from ._parallel import run_chunks
from .ba_solver import CapacityResult, ba_capacity
from .channel_model import ChannelMatrix, Direction, Distribution, TwoWayChannel, sub_channel_stack
from .errors import EvaluationCapError
from .info_measures import conditional_mi_batch, mi_batch, mi_stack
from .simplex_grid import GridSpec, grid_array, grid_count, iter_grid_chunks, local_search

DEFAULT_DELTA = 0.025
DEFAULT_REFINE_TOL = 1e-6
DEFAULT_CAP = 10**8
DEFAULT_GRID_OUTER_DELTA = 0.1

# Rate pairs evaluated per inner-bound chunk.
CHUNK_EVALS = 1 << 18


@dataclass(frozen=True)
class RatePair:
    """A point (R1, R2) in bits per channel use."""

    r1: float
    r2: float

    def __post_init__(self) -> None:
        for name in ("r1", "r2"):
            value = float(getattr(self, name))
            if not np.isfinite(value) or value < 0.0:
                raise ValueError(f"{name} must be finite and >= 0, got {value!r}")
            object.__setattr__(self, name, value)


@dataclass(frozen=True)
class Frontier:
    """Upper-right boundary of a convex, downward-closed rate region."""

    vertices: Tuple[RatePair, ...]

    def as_array(self) -> np.ndarray:
        return np.array([[v.r1, v.r2] for v in self.vertices], dtype=float).reshape(-1, 2)

    @property
    def max_r1(self) -> float:
        return max(v.r1 for v in self.vertices)

    @property
    def max_r2(self) -> float:
        return max(v.r2 for v in self.vertices)

    def to_lists(self) -> List[List[float]]:
        return [[v.r1, v.r2] for v in self.vertices]


PointsLike = Union[Sequence[RatePair], np.ndarray]


# ---------------------------------------------------------------------------
# Frontier geometry
# ---------------------------------------------------------------------------


def _points_array(points: PointsLike) -> np.ndarray:
    if isinstance(points, np.ndarray):
        arr = points.astype(float).reshape(-1, 2)
    else:
        arr = np.array([[p.r1, p.r2] for p in points], dtype=float).reshape(-1, 2)
    if arr.shape[0] == 0:
        raise ValueError("need at least one rate pair")
    return np.maximum(arr, 0.0)


def _pareto(points: np.ndarray) -> np.ndarray:
    """Non-dominated points, sorted by r1 ascending (r2 then strictly descending)."""
    order = np.lexsort((-points[:, 1], -points[:, 0]))
    ranked = points[order]
    best_before = np.maximum.accumulate(np.concatenate([[-np.inf], ranked[:-1, 1]]))
    keep = ranked[:, 1] > best_before
    return ranked[keep][::-1]


def _cross(o: np.ndarray, a: np.ndarray, b: np.ndarray) -> float:
    return float((a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]))


def _frontier_vertices(points: np.ndarray) -> np.ndarray:
    """Vertices of the frontier of the downward-closed convex hull of `points`."""
    front = _pareto(points)
    if front[0, 0] > 0.0:
        front = np.vstack([[0.0, front[0, 1]], front])
    hull: List[np.ndarray] = []
    for p in front:
        while len(hull) >= 2 and _cross(hull[-2], hull[-1], p) >= 0.0:
            hull.pop()
        hull.append(p)
    if hull[-1][1] > 0.0:
        hull.append(np.array([hull[-1][0], 0.0]))
    return np.array(hull, dtype=float)


def hull_frontier(points: PointsLike) -> Frontier:
    """Frontier of the closed convex hull of `points` and their axis projections."""
    verts = _frontier_vertices(_points_array(points))
    return Frontier(tuple(RatePair(float(x), float(y)) for x, y in verts))


def height_at(frontier: Frontier, r1: float) -> float:
    """Largest r2 of the region at abscissa r1 (-inf beyond the region)."""
    verts = frontier.as_array()
    if r1 > verts[-1, 0] or r1 < 0.0:
        return -np.inf
    best = -np.inf
    if len(verts) == 1:
        return float(verts[0, 1])
    for (x0, y0), (x1, y1) in zip(verts[:-1], verts[1:]):
        if not x0 <= r1 <= x1:
            continue
        if x1 > x0:
            y = y0 + (y1 - y0) * (r1 - x0) / (x1 - x0)
        else:
            y = max(y0, y1)
        best = max(best, y)
    return float(best)


def frontier_contains(frontier: Frontier, point: RatePair, tol: float = 1e-9) -> bool:
    """Whether `point` lies in the region, allowing `tol` slack on both axes."""
    x = max(point.r1 - tol, 0.0)
    y = max(point.r2 - tol, 0.0)
    return y <= height_at(frontier, x)


def frontier_dominates(outer: Frontier, inner: Frontier, tol: float = 1e-9) -> bool:
    """Whether the region of `inner` is contained in the region of `outer`."""
    return all(frontier_contains(outer, v, tol) for v in inner.vertices)


def clip_frontier(frontier: Frontier, i1: float, i2: float) -> Frontier:
    """Intersect a region with the rectangle [0, i1] x [0, i2]."""
    verts = frontier.as_array()
    path = [verts[0]]
    for p, q in zip(verts[:-1], verts[1:]):
        crossings = []
        for axis, bound in ((0, i1), (1, i2)):
            if (p[axis] - bound) * (q[axis] - bound) < 0.0:
                crossings.append((bound - p[axis]) / (q[axis] - p[axis]))
        for t in sorted(crossings):
            path.append(p + t * (q - p))
        path.append(q)
    clamped = np.minimum(np.array(path), np.array([i1, i2]))
    return hull_frontier(clamped)


def shift_frontier(frontier: Frontier, d1: float, d2: float) -> np.ndarray:
    return frontier.as_array() + np.array([d1, d2])


# ---------------------------------------------------------------------------
# Grid sweeps: Shannon inner bound and grid outer bound
# ---------------------------------------------------------------------------


def _check_cap(evaluations: int, cap: int, what: str, delta: float) -> None:
    if evaluations > cap:
        raise EvaluationCapError(
            f"{what} at delta={delta} needs {evaluations} rate-pair evaluations, above the cap of "
            f"{cap}; use a coarser delta"
        )


def inner_bound_evaluations(ch: TwoWayChannel, delta: float) -> int:
    return grid_count(GridSpec(ch.nx1, delta)) * grid_count(GridSpec(ch.nx2, delta))


def inner_bound(
    ch: TwoWayChannel, delta: float = DEFAULT_DELTA, cap: int = DEFAULT_CAP, workers: int = 1
) -> Frontier:
    """Shannon inner bound C_I over product inputs P_X1 x P_X2 on the delta-grids.

    For product inputs I(X1;Y2|X2) = sum_x2 P_X2(x2) I(P_X1, W_x2), so the
    per-state mutual informations are computed once per grid and the sweep
    itself is a weighted sum.
    """
    _check_cap(inner_bound_evaluations(ch, delta), cap, "inner bound", delta)
    g1 = grid_array(GridSpec(ch.nx1, delta))
    g2 = grid_array(GridSpec(ch.nx2, delta))
    fwd = mi_stack(g1, sub_channel_stack(ch, Direction.FORWARD))  # [i][x2]
    bwd = mi_stack(g2, sub_channel_stack(ch, Direction.BACKWARD))  # [j][x1]

    rows = max(1, CHUNK_EVALS // len(g2))

    def work(bounds: Tuple[int, int]) -> np.ndarray:
        lo, hi = bounds
        r1 = (fwd[lo:hi, None, :] * g2[None, :, :]).sum(axis=-1)
        r2 = (g1[lo:hi, None, :] * bwd[None, :, :]).sum(axis=-1)
        return _frontier_vertices(np.stack([r1.ravel(), r2.ravel()], axis=1))

    chunks = [(lo, min(lo + rows, len(g1))) for lo in range(0, len(g1), rows)]
    vertices = list(run_chunks(work, chunks, workers))
    return hull_frontier(np.vstack(vertices))


def outer_bound_grid(
    ch: TwoWayChannel,
    delta: float = DEFAULT_GRID_OUTER_DELTA,
    cap: int = DEFAULT_CAP,
    workers: int = 1,
) -> Frontier:
    """Shannon outer bound C_O over joint inputs P_X1X2 on the delta-grid."""
    spec = GridSpec(ch.nx1 * ch.nx2, delta)
    _check_cap(grid_count(spec), cap, "joint-input outer bound", delta)

    def work(item: Tuple[int, np.ndarray]) -> np.ndarray:
        _, points = item
        joints = points.reshape(-1, ch.nx1, ch.nx2)
        r1 = conditional_mi_batch(joints, ch, Direction.FORWARD)
        r2 = conditional_mi_batch(joints, ch, Direction.BACKWARD)
        return _frontier_vertices(np.stack([r1, r2], axis=1))

    vertices = list(run_chunks(work, iter_grid_chunks(spec), workers))
    return hull_frontier(np.vstack(vertices))


# ---------------------------------------------------------------------------
# Single-letter maxima and the alpha*/beta* relaxations
# ---------------------------------------------------------------------------


def state_capacities(ch: TwoWayChannel, direction: Direction) -> List[CapacityResult]:
    """Blahut-Arimoto result for every sub-channel of `direction`."""
    stack = sub_channel_stack(ch, direction)
    return [ba_capacity(ChannelMatrix(stack[s])) for s in range(stack.shape[0])]


def trivial_outer(ch: TwoWayChannel) -> Tuple[float, float]:
    """(I*_1, I*_2): best single-state capacity in each direction."""
    i1 = max(r.capacity for r in state_capacities(ch, Direction.FORWARD))
    i2 = max(r.capacity for r in state_capacities(ch, Direction.BACKWARD))
    return i1, i2


def uniform_input_gap(
    ch: TwoWayChannel,
    direction: Direction = Direction.FORWARD,
    caps: Optional[Sequence[CapacityResult]] = None,
) -> float:
    """Worst per-state rate loss when the transmitter always sends uniformly."""
    stack = sub_channel_stack(ch, direction)
    if caps is None:
        caps = state_capacities(ch, direction)
    capacities = np.array([r.capacity for r in caps])
    uniform = np.full((1, stack.shape[1]), 1.0 / stack.shape[1])
    return max(float((capacities - mi_stack(uniform, stack)[0]).max()), 0.0)


def minimize_max_gap(
    values: Callable[[np.ndarray], np.ndarray],
    targets: Sequence[float],
    dim: int,
    delta: float,
    refine_tol: float,
    seeds: Sequence[np.ndarray] = (),
    workers: int = 1,
) -> Tuple[float, np.ndarray]:
    """min over the simplex of max_s (targets[s] - values(P)[s]).

    `values` maps an (N, dim) array of distributions to an (N, S) array and
    each component is concave in P, so the objective is convex: seed from the
    best delta-grid point (first in lexicographic order on ties) or a better
    explicit seed, refine by halving pattern search down to `refine_tol`, then
    polish with an SLSQP epigraph solve, which can slide along kinks that the
    coordinate-pair moves cannot follow.
    """
    goal = np.asarray(targets, dtype=float)

    def objective(points: np.ndarray) -> np.ndarray:
        return (goal[None, :] - values(points)).max(axis=1)

    def work(item: Tuple[int, np.ndarray]) -> Tuple[float, np.ndarray]:
        _, points = item
        scores = objective(points)
        i = int(np.argmin(scores))
        return float(scores[i]), points[i]

    best_value, start = np.inf, None
    for value, point in run_chunks(work, iter_grid_chunks(GridSpec(dim, delta)), workers):
        if value < best_value:
            best_value, start = value, point
    for seed in seeds:
        value = float(objective(np.asarray(seed, dtype=float)[None, :])[0])
        if value < best_value:
            best_value, start = value, np.asarray(seed, dtype=float)

    point, value, _ = local_search(objective, start, delta, refine_tol)
    if dim >= 3 and value > 0.0:
        point, value = _polish_epigraph(objective, values, goal, point, value)
    return max(value, 0.0), point


def _polish_epigraph(
    objective: Callable[[np.ndarray], np.ndarray],
    values: Callable[[np.ndarray], np.ndarray],
    goal: np.ndarray,
    point: np.ndarray,
    value: float,
) -> Tuple[float, np.ndarray]:
    dim = point.shape[0]

    def project(x: np.ndarray) -> np.ndarray:
        p = np.clip(x[:dim], 0.0, None)
        return p / p.sum()

    constraints = [
        {"type": "ineq", "fun": lambda x: x[dim] - (goal - values(project(x)[None, :])[0])},
        {"type": "eq", "fun": lambda x: x[:dim].sum() - 1.0},
    ]
    result = optimize.minimize(
        lambda x: x[dim],
        np.append(point, value),
        method="SLSQP",
        bounds=[(0.0, 1.0)] * dim + [(None, None)],
        constraints=constraints,
        options={"maxiter": 200, "ftol": 1e-12},
    )
    candidate = project(result.x)
    candidate_value = float(objective(candidate[None, :])[0])
    if np.isfinite(candidate_value) and candidate_value < value - 1e-15:
        return candidate, candidate_value
    return point, value


class AlphaResult(NamedTuple):
    alpha: float
    witness: Distribution


class BetaResult(NamedTuple):
    beta: float
    witness: Distribution
    pair: Tuple[int, int]


def alpha_star(
    ch: TwoWayChannel,
    direction: Direction = Direction.FORWARD,
    delta: float = DEFAULT_DELTA,
    refine_tol: float = DEFAULT_REFINE_TOL,
    workers: int = 1,
    caps: Optional[Sequence[CapacityResult]] = None,
) -> AlphaResult:
    """alpha*: distance of the best single input law from every state's capacity.

    Since I(P, W_s) <= C_s for every P, the absolute value in the definition
    is one-sided and alpha* = min_P max_s (C_s - I(P, W_s)). `caps` reuses
    per-state results from `state_capacities`.
    """
    stack = sub_channel_stack(ch, direction)
    if caps is None:
        caps = state_capacities(ch, direction)
    gap, point = minimize_max_gap(
        lambda points: mi_stack(points, stack),
        [r.capacity for r in caps],
        stack.shape[1],
        delta,
        refine_tol,
        seeds=[r.optimizer.as_array() for r in caps],
        workers=workers,
    )
    return AlphaResult(gap, Distribution.from_array(point))


def beta_star(
    ch: TwoWayChannel,
    direction: Direction = Direction.BACKWARD,
    delta: float = DEFAULT_DELTA,
    refine_tol: float = DEFAULT_REFINE_TOL,
    workers: int = 1,
) -> BetaResult:
    """beta*: largest mutual-information gap between two sub-channels under a shared input.

    The objective is not concave, so the result is the best value found by a
    full delta-grid sweep followed by local ascent from the best grid point
    of every sub-channel pair; it is a lower bound at grid resolution.
    """
    stack = sub_channel_stack(ch, direction)
    states, dim = stack.shape[0], stack.shape[1]
    if states < 2:
        return BetaResult(0.0, Distribution.uniform(dim), (0, 0))
    pairs = list(itertools.combinations(range(states), 2))
    left = np.array([i for i, _ in pairs])
    right = np.array([j for _, j in pairs])

    def work(item: Tuple[int, np.ndarray]) -> List[Tuple[float, np.ndarray]]:
        _, points = item
        mi = mi_stack(points, stack)
        gaps = np.abs(mi[:, left] - mi[:, right])
        best = np.argmax(gaps, axis=0)
        return [(float(gaps[best[k], k]), points[best[k]]) for k in range(len(pairs))]

    per_pair: List[Tuple[float, Optional[np.ndarray]]] = [(-np.inf, None)] * len(pairs)
    for chunk_best in run_chunks(work, iter_grid_chunks(GridSpec(dim, delta)), workers):
        per_pair = [new if new[0] > old[0] else old for old, new in zip(per_pair, chunk_best)]

    result = BetaResult(-np.inf, Distribution.uniform(dim), (0, 0))
    for (i, j), (_, start) in zip(pairs, per_pair):
        w_i, w_j = stack[i], stack[j]

        def objective(points: np.ndarray, w_i=w_i, w_j=w_j) -> np.ndarray:
            return np.abs(mi_batch(points, w_i) - mi_batch(points, w_j))

        point, value, _ = local_search(objective, start, delta, refine_tol, maximize=True)
        if value > result.beta:
            result = BetaResult(value, Distribution.from_array(point), (i, j))
    return result


# ---------------------------------------------------------------------------
# Derived regions
# ---------------------------------------------------------------------------


def theorem4_bound(
    inner: Frontier, alpha: float, beta: float, i1_star: float, i2_star: float
) -> Frontier:
    """Hull of C_I and C_I shifted by (alpha, 2 beta), clipped to the trivial rectangle."""
    if alpha < 0 or beta < 0:
        raise ValueError("alpha and beta must be non-negative")
    base = inner.as_array()
    union = np.vstack([base, shift_frontier(inner, alpha, 2.0 * beta)])
    return clip_frontier(hull_frontier(union), i1_star, i2_star)


def eps_region(inner: Frontier, eps: float, i1_star: float, i2_star: float) -> Frontier:
    """C_I,eps: points of the trivial rectangle within normalized box distance eps of C_I."""
    if eps < 0:
        raise ValueError(f"eps must be non-negative, got {eps!r}")
    shifted = shift_frontier(inner, eps * i1_star, eps * i2_star)
    return clip_frontier(hull_frontier(shifted), i1_star, i2_star)


def epsilon_of(alpha: float, beta: float, i1_star: float, i2_star: float) -> float:
    """eps = max(alpha / I*_1, 2 beta / I*_2); a zero I* contributes nothing."""
    first = alpha / i1_star if i1_star > 0 else 0.0
    second = 2.0 * beta / i2_star if i2_star > 0 else 0.0
    return max(first, second)


def rectangle(i1_star: float, i2_star: float) -> Frontier:
    return hull_frontier(np.array([[i1_star, i2_star]]))


@dataclass(frozen=True)
class BoundsReport:
    """All bound quantities for one channel."""

    i1_star: float
    i2_star: float
    alpha_star: float
    beta_star: float
    epsilon: float
    inner: Frontier
    outer_simple: Frontier
    outer_trivial: Frontier
    eps_region: Frontier
    outer_grid: Optional[Frontier] = None
    alpha_witness: Optional[Distribution] = None
    beta_witness: Optional[Distribution] = None
    beta_pair: Tuple[int, int] = (0, 0)
    uniform_gap: float = 0.0
    delta: float = DEFAULT_DELTA
    refine_tol: float = DEFAULT_REFINE_TOL
    grid_outer_delta: Optional[float] = None
    # per-state Blahut-Arimoto results, kept for convergence checks
    forward_capacities: Tuple[CapacityResult, ...] = ()
    backward_capacities: Tuple[CapacityResult, ...] = ()

    def to_dict(self) -> Dict[str, Any]:
        return {
            "i1_star": self.i1_star,
            "i2_star": self.i2_star,
            "alpha_star": self.alpha_star,
            "beta_star": self.beta_star,
            "epsilon": self.epsilon,
            "uniform_gap": self.uniform_gap,
            "alpha_witness": list(self.alpha_witness.probs) if self.alpha_witness else None,
            "beta_witness": list(self.beta_witness.probs) if self.beta_witness else None,
            "beta_pair": list(self.beta_pair),
            "delta": self.delta,
            "refine_tol": self.refine_tol,
            "grid_outer_delta": self.grid_outer_delta,
            "inner": self.inner.to_lists(),
            "outer_simple": self.outer_simple.to_lists(),
            "outer_trivial": self.outer_trivial.to_lists(),
            "eps_region": self.eps_region.to_lists(),
            "outer_grid": self.outer_grid.to_lists() if self.outer_grid else None,
        }


def full_report(
    ch: TwoWayChannel,
    delta: float = DEFAULT_DELTA,
    refine_tol: float = DEFAULT_REFINE_TOL,
    with_grid_outer: bool = False,
    grid_outer_delta: float = DEFAULT_GRID_OUTER_DELTA,
    cap: int = DEFAULT_CAP,
    workers: int = 1,
) -> BoundsReport:
    """Run every bound computation for one channel."""
    fwd_caps = state_capacities(ch, Direction.FORWARD)
    bwd_caps = state_capacities(ch, Direction.BACKWARD)
    i1 = max(r.capacity for r in fwd_caps)
    i2 = max(r.capacity for r in bwd_caps)
    inner = inner_bound(ch, delta, cap=cap, workers=workers)
    alpha = alpha_star(ch, Direction.FORWARD, delta, refine_tol, workers=workers, caps=fwd_caps)
    beta = beta_star(ch, Direction.BACKWARD, delta, refine_tol, workers=workers)
    eps = epsilon_of(alpha.alpha, beta.beta, i1, i2)
    outer_grid = (
        outer_bound_grid(ch, grid_outer_delta, cap=cap, workers=workers) if with_grid_outer else None
    )
    return BoundsReport(
        i1_star=i1,
        i2_star=i2,
        alpha_star=alpha.alpha,
        beta_star=beta.beta,
        epsilon=eps,
        inner=inner,
        outer_simple=theorem4_bound(inner, alpha.alpha, beta.beta, i1, i2),
        outer_trivial=rectangle(i1, i2),
        eps_region=eps_region(inner, eps, i1, i2),
        outer_grid=outer_grid,
        alpha_witness=alpha.witness,
        beta_witness=beta.witness,
        beta_pair=beta.pair,
        uniform_gap=uniform_input_gap(ch, Direction.FORWARD, caps=fwd_caps),
        delta=delta,
        refine_tol=refine_tol,
        grid_outer_delta=grid_outer_delta if with_grid_outer else None,
        forward_capacities=tuple(fwd_caps),
        backward_capacities=tuple(bwd_caps),
    )
