"""Symmetry screens for two-way channels.

Conditions (a) and (b1) make independent inputs optimal (C_I = C_O). The
theorem screens are necessary conditions: a failed screen certifies that its
parent condition fails, a passed one proves nothing. Every "holds" verdict is
qualified by the grid resolution and refinement tolerance it was found at.
"""

from dataclasses import dataclass
from typing import Any, Dict, Optional, Tuple

import numpy as np

from ._parallel import run_chunks
from .ba_solver import max_output_entropy
from .bound_engine import (
    DEFAULT_CAP,
    DEFAULT_DELTA,
    DEFAULT_GRID_OUTER_DELTA,
    DEFAULT_REFINE_TOL,
    alpha_star,
    beta_star,
    minimize_max_gap,
)
from .channel_model import ChannelMatrix, Direction, Distribution, TwoWayChannel, sub_channel_stack
from .errors import EvaluationCapError
from .info_measures import ZERO_PROB, JointInput, entropy_rows, output_entropy_stack, row_entropy_table
from .simplex_grid import GridSpec, grid_count, iter_grid_chunks

DEFAULT_SYM_TOL = 1e-6


@dataclass(frozen=True)
class ConditionA:
    holds: bool
    gap: float
    witness: Distribution

    def to_dict(self) -> Dict[str, Any]:
        return {"holds": self.holds, "gap": self.gap, "witness": list(self.witness.probs)}


@dataclass(frozen=True)
class ConditionB1:
    """Mutual-information invariance; `gap` is None when a screen ruled it out first."""

    holds: bool
    gap: Optional[float]
    witness: Optional[Distribution] = None
    pair: Optional[Tuple[int, int]] = None
    screened_out: bool = False

    def to_dict(self) -> Dict[str, Any]:
        return {
            "holds": self.holds,
            "gap": self.gap,
            "witness": list(self.witness.probs) if self.witness else None,
            "pair": list(self.pair) if self.pair else None,
            "screened_out": self.screened_out,
        }


@dataclass(frozen=True)
class Thm1Result:
    holds: bool
    gap: float
    witness: Distribution

    def to_dict(self) -> Dict[str, Any]:
        return {"holds": self.holds, "gap": self.gap, "witness": list(self.witness.probs)}


@dataclass(frozen=True)
class Thm2Result:
    holds: bool
    max_discrepancy: float
    worst_pair: Tuple[int, int, int]  # (x1', x1'', x2)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "holds": self.holds,
            "max_discrepancy": self.max_discrepancy,
            "worst_pair": list(self.worst_pair),
        }


@dataclass(frozen=True)
class Thm3Result:
    """Common output-entropy maximizer screen.

    `applicable` is False when the condition-(a) witness puts zero mass on
    some symbol, in which case the theorem says nothing about the channel.
    """

    holds: bool
    gap: float
    witness: Distribution
    applicable: bool = True

    def to_dict(self) -> Dict[str, Any]:
        return {
            "holds": self.holds if self.applicable else None,
            "gap": self.gap,
            "witness": list(self.witness.probs),
            "applicable": self.applicable,
        }


@dataclass(frozen=True)
class B2Search:
    counterexample_found: bool
    witness: Optional[JointInput]
    resolution: float
    violation: float = 0.0
    skipped: Optional[str] = None

    def __post_init__(self) -> None:
        if (self.witness is not None) != self.counterexample_found:
            raise ValueError("a witness must be present exactly when a counterexample was found")

    def to_dict(self) -> Dict[str, Any]:
        return {
            "counterexample_found": self.counterexample_found,
            "witness": self.witness.to_lists() if self.witness else None,
            "resolution": self.resolution,
            "violation": self.violation,
            "skipped": self.skipped,
        }


@dataclass(frozen=True)
class SymmetryReport:
    cond_a: ConditionA
    cond_b1: ConditionB1
    thm1_reverse_common_max: Thm1Result
    thm2_entropy_table_equal: Thm2Result
    thm3_common_entropy_max: Thm3Result
    b2_search: B2Search
    tol: float = DEFAULT_SYM_TOL
    delta: float = DEFAULT_DELTA
    refine_tol: float = DEFAULT_REFINE_TOL

    @property
    def prop1_holds(self) -> bool:
        """Conditions (a) and (b1) both hold at the search resolution."""
        return self.cond_a.holds and self.cond_b1.holds

    @property
    def prop2_possible(self) -> bool:
        """(a) holds, the (b2) screens pass and the (b2) search found nothing."""
        thm3 = self.thm3_common_entropy_max
        return (
            self.cond_a.holds
            and self.thm2_entropy_table_equal.holds
            and (thm3.holds or not thm3.applicable)
            and self.b2_search.skipped is None
            and not self.b2_search.counterexample_found
        )

    def to_dict(self) -> Dict[str, Any]:
        return {
            "cond_a": self.cond_a.to_dict(),
            "cond_b1": self.cond_b1.to_dict(),
            "thm1_reverse_common_max": self.thm1_reverse_common_max.to_dict(),
            "thm2_entropy_table_equal": self.thm2_entropy_table_equal.to_dict(),
            "thm3_common_entropy_max": self.thm3_common_entropy_max.to_dict(),
            "b2_search": self.b2_search.to_dict(),
            "prop1_holds": self.prop1_holds,
            "prop2_possible": self.prop2_possible,
            "tol": self.tol,
            "delta": self.delta,
            "refine_tol": self.refine_tol,
        }


def check_condition_a(
    ch: TwoWayChannel,
    direction: Direction = Direction.FORWARD,
    tol: float = DEFAULT_SYM_TOL,
    delta: float = DEFAULT_DELTA,
    refine_tol: float = DEFAULT_REFINE_TOL,
    workers: int = 1,
) -> ConditionA:
    """Condition (a): one input law achieves every sub-channel capacity."""
    result = alpha_star(ch, direction, delta, refine_tol, workers=workers)
    return ConditionA(holds=result.alpha <= tol, gap=result.alpha, witness=result.witness)


def check_condition_b1(
    ch: TwoWayChannel,
    direction: Direction = Direction.BACKWARD,
    tol: float = DEFAULT_SYM_TOL,
    delta: float = DEFAULT_DELTA,
    refine_tol: float = DEFAULT_REFINE_TOL,
    workers: int = 1,
) -> ConditionB1:
    """Condition (b1): I(P, W_s) does not depend on the state s."""
    result = beta_star(ch, direction, delta, refine_tol, workers=workers)
    return ConditionB1(
        holds=result.beta <= tol, gap=result.beta, witness=result.witness, pair=result.pair
    )


def check_thm1(
    ch: TwoWayChannel,
    tol: float = DEFAULT_SYM_TOL,
    delta: float = DEFAULT_DELTA,
    refine_tol: float = DEFAULT_REFINE_TOL,
    workers: int = 1,
) -> Thm1Result:
    """Common capacity-achieving P_X2 for the backward sub-channels (necessary for (b1))."""
    result = alpha_star(ch, Direction.BACKWARD, delta, refine_tol, workers=workers)
    return Thm1Result(holds=result.alpha <= tol, gap=result.alpha, witness=result.witness)


def check_thm2(ch: TwoWayChannel, tol: float = DEFAULT_SYM_TOL) -> Thm2Result:
    """Backward row entropies H(Y1|x1, x2) must not depend on x1 (necessary for (b2))."""
    table = row_entropy_table(ch, Direction.BACKWARD)  # [x1][x2]
    if ch.nx1 < 2:
        return Thm2Result(holds=True, max_discrepancy=0.0, worst_pair=(0, 0, 0))
    left, right = np.triu_indices(ch.nx1, k=1)
    diffs = np.abs(table[left] - table[right])  # [pair][x2]
    flat = int(np.argmax(diffs))
    k, x2 = divmod(flat, ch.nx2)
    worst = float(diffs[k, x2])
    return Thm2Result(
        holds=worst <= tol,
        max_discrepancy=worst,
        worst_pair=(int(left[k]), int(right[k]), int(x2)),
    )


def check_thm3(
    ch: TwoWayChannel,
    tol: float = DEFAULT_SYM_TOL,
    delta: float = DEFAULT_DELTA,
    refine_tol: float = DEFAULT_REFINE_TOL,
    cond_a_witness: Optional[Distribution] = None,
    workers: int = 1,
) -> Thm3Result:
    """Common maximizer of the backward output entropies H(P W_x1) (necessary for (b2))."""
    stack = sub_channel_stack(ch, Direction.BACKWARD)
    maxima = [max_output_entropy(ChannelMatrix(stack[s])) for s in range(stack.shape[0])]
    gap, point = minimize_max_gap(
        lambda points: output_entropy_stack(points, stack),
        [value for value, _ in maxima],
        ch.nx2,
        delta,
        refine_tol,
        seeds=[p.as_array() for _, p in maxima],
        workers=workers,
    )
    applicable = cond_a_witness is None or all(p > ZERO_PROB for p in cond_a_witness.probs)
    return Thm3Result(
        holds=gap <= tol, gap=gap, witness=Distribution.from_array(point), applicable=applicable
    )


def search_b2_violation(
    ch: TwoWayChannel,
    p_star: Distribution,
    delta: float = DEFAULT_GRID_OUTER_DELTA,
    tol: float = DEFAULT_SYM_TOL,
    cap: int = DEFAULT_CAP,
    workers: int = 1,
) -> B2Search:
    """Look for a joint input P1 with H1(Y1|X1) > H2(Y1|X1) under P2 = P* x P1_X2.

    Returns the first violation (in grid order) exceeding `tol`. Finding
    none only means there is no counterexample at resolution `delta`.
    """
    if len(p_star) != ch.nx1:
        raise ValueError(f"p_star has {len(p_star)} symbols, expected {ch.nx1}")
    spec = GridSpec(ch.nx1 * ch.nx2, delta)
    count = grid_count(spec)
    if count > cap:
        raise EvaluationCapError(
            f"(b2) search at delta={delta} needs {count} joint inputs, above the cap of {cap}; "
            "use a coarser delta"
        )
    law = ch.backward  # [x1][x2][y1]
    weights = p_star.as_array()

    def work(item: Tuple[int, np.ndarray]) -> Optional[Tuple[float, np.ndarray]]:
        _, points = item
        joints = points.reshape(-1, ch.nx1, ch.nx2)
        n = joints.shape[0]
        # H1(Y1|X1) = H(X1, Y1) - H(X1)
        x1_y1 = (joints[:, :, :, None] * law[None]).sum(axis=2)
        h1 = entropy_rows(x1_y1.reshape(n, -1)) - entropy_rows(joints.sum(axis=2))
        px2 = joints.sum(axis=1)
        out = (px2[:, None, :, None] * law[None]).sum(axis=2)  # [n][x1][y1]
        h2 = (weights[None, :] * entropy_rows(out)).sum(axis=1)
        excess = h1 - h2
        hits = np.flatnonzero(excess > tol)
        if hits.size == 0:
            return None
        return float(excess[hits[0]]), joints[hits[0]]

    chunks = run_chunks(work, iter_grid_chunks(spec), workers)
    try:
        for hit in chunks:
            if hit is not None:
                violation, joint = hit
                return B2Search(
                    counterexample_found=True,
                    witness=JointInput(joint),
                    resolution=delta,
                    violation=violation,
                )
    finally:
        chunks.close()
    return B2Search(counterexample_found=False, witness=None, resolution=delta)


def assess_symmetry(
    ch: TwoWayChannel,
    tol: float = DEFAULT_SYM_TOL,
    delta: float = DEFAULT_DELTA,
    refine_tol: float = DEFAULT_REFINE_TOL,
    b2_delta: float = DEFAULT_GRID_OUTER_DELTA,
    cap: int = DEFAULT_CAP,
    workers: int = 1,
) -> SymmetryReport:
    """Run the screening pipeline, cheap necessary-condition screens first.

    Order: Theorem 2, Theorem 1, condition (a), Theorem 3, condition (b1),
    then the (b2) search. A failed Theorem-1 screen rules out (b1) without
    computing beta*; the (b2) search runs only when (a) holds and the
    Theorem-2/3 screens pass.
    """
    thm2 = check_thm2(ch, tol)
    thm1 = check_thm1(ch, tol, delta, refine_tol, workers)
    cond_a = check_condition_a(ch, Direction.FORWARD, tol, delta, refine_tol, workers)
    thm3 = check_thm3(ch, tol, delta, refine_tol, cond_a.witness, workers)

    if thm1.holds:
        cond_b1 = check_condition_b1(ch, Direction.BACKWARD, tol, delta, refine_tol, workers)
    else:
        cond_b1 = ConditionB1(holds=False, gap=None, screened_out=True)

    if not cond_a.holds:
        skipped: Optional[str] = "condition (a) fails"
    elif not thm2.holds:
        skipped = "theorem 2 screen fails"
    elif thm3.applicable and not thm3.holds:
        skipped = "theorem 3 screen fails"
    else:
        skipped = None

    if skipped is None:
        b2 = search_b2_violation(ch, cond_a.witness, b2_delta, tol, cap, workers)
    else:
        b2 = B2Search(counterexample_found=False, witness=None, resolution=b2_delta, skipped=skipped)

    return SymmetryReport(
        cond_a=cond_a,
        cond_b1=cond_b1,
        thm1_reverse_common_max=thm1,
        thm2_entropy_table_equal=thm2,
        thm3_common_entropy_max=thm3,
        b2_search=b2,
        tol=tol,
        delta=delta,
        refine_tol=refine_tol,
    )
