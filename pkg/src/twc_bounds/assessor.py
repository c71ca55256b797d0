"""Capacity assessment runner: runs the bound and symmetry pipelines and writes outputs.

CLI parsing and entry points live in `cli.py` / `_cli_report.py` / `_cli_sweep.py`.
"""

import math
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

from ._parallel import run_chunks
from .bound_engine import (
    DEFAULT_CAP,
    DEFAULT_DELTA,
    DEFAULT_GRID_OUTER_DELTA,
    DEFAULT_REFINE_TOL,
    BoundsReport,
    full_report,
    inner_bound_evaluations,
)
from .channel_model import Direction, TwoWayChannel, declared_parameters, load_channel, swap_terminals
from .emit import plot_regions, plot_sweep, write_frontier_csv, write_json, write_sweep_table
from .errors import ChannelValidationError
from .simplex_grid import GridSpec, grid_count
from .symmetry_checks import DEFAULT_SYM_TOL, SymmetryReport, assess_symmetry

REGION_FILES = ("inner", "outer_simple", "outer_trivial", "eps_region", "outer_grid")


@dataclass(frozen=True)
class RunConfig:
    """Settings shared by the `report` and `sweep` commands."""

    channel_path: Path
    out_dir: Path = Path(".")
    delta: float = DEFAULT_DELTA
    refine_tol: float = DEFAULT_REFINE_TOL
    sym_tol: float = DEFAULT_SYM_TOL
    with_grid_outer: bool = False
    grid_outer_delta: float = DEFAULT_GRID_OUTER_DELTA
    gamma: Optional[float] = None
    cap: int = DEFAULT_CAP
    workers: int = 1
    verbose: bool = False

    def validate(self) -> None:
        """Raise ValueError (or GridSpecError) on an unusable configuration."""
        for name in ("refine_tol", "sym_tol"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ValueError(f"{name.replace('_', '-')} must be > 0, got {value!r}")
        GridSpec(1, self.delta)
        GridSpec(1, self.grid_outer_delta)
        if self.gamma is not None and not math.isfinite(self.gamma):
            raise ValueError(f"gamma must be a finite number, got {self.gamma!r}")
        if self.cap < 1:
            raise ValueError(f"cap must be >= 1, got {self.cap}")
        if self.workers < 1:
            raise ValueError(f"workers must be >= 1, got {self.workers}")


class CapacityAssessor:
    """Runs the assessment procedure for one channel file.

    Step 1 screens both terminal orientations for the symmetry conditions;
    Step 2 computes the inner bound and the bound sandwich around it.
    """

    def __init__(self, config: RunConfig):
        config.validate()
        self.config = config
        self.verbose = config.verbose
        self.stats = {
            "ba_solves": 0,
            "grid_points": 0,
            "rate_pairs": 0,
            "files_written": 0,
        }

    def _log(self, message: str, force: bool = False) -> None:
        """Print if verbose or forced."""
        if self.verbose or force:
            print(message)

    def _warn(self, message: str) -> None:
        print(f"Warning: {message}")

    def load(self, gamma: Optional[float] = None) -> TwoWayChannel:
        """Read the channel file, substituting `gamma` if the file declares it."""
        raw = Path(self.config.channel_path).read_bytes()
        declared = declared_parameters(raw)
        if gamma is not None and "gamma" not in declared:
            self._warn(f"{self.config.channel_path} has no gamma parameter; --gamma ignored")
        params = {"gamma": gamma} if gamma is not None else None
        ch = load_channel(raw, params)
        self._log(f"Loaded channel: |X1|={ch.nx1} |X2|={ch.nx2} |Y1|={ch.ny1} |Y2|={ch.ny2}")
        return ch

    def _check_convergence(self, bounds: BoundsReport) -> None:
        for direction, results in (
            (Direction.FORWARD, bounds.forward_capacities),
            (Direction.BACKWARD, bounds.backward_capacities),
        ):
            self.stats["ba_solves"] += len(results)
            for state, result in enumerate(results):
                if not result.converged:
                    self._warn(
                        f"Blahut-Arimoto did not converge for {direction.value} state {state} "
                        f"(gap {result.gap:.2e} after {result.iterations} iterations)"
                    )

    def _count_work(self, ch: TwoWayChannel) -> None:
        cfg = self.config
        pairs = inner_bound_evaluations(ch, cfg.delta)
        self.stats["rate_pairs"] += pairs
        self.stats["grid_points"] += grid_count(GridSpec(ch.nx1, cfg.delta)) + grid_count(
            GridSpec(ch.nx2, cfg.delta)
        )
        if cfg.with_grid_outer:
            joint = grid_count(GridSpec(ch.nx1 * ch.nx2, cfg.grid_outer_delta))
            self.stats["grid_points"] += joint
            self.stats["rate_pairs"] += joint

    def bounds(self, ch: TwoWayChannel, workers: Optional[int] = None) -> BoundsReport:
        cfg = self.config
        return full_report(
            ch,
            delta=cfg.delta,
            refine_tol=cfg.refine_tol,
            with_grid_outer=cfg.with_grid_outer,
            grid_outer_delta=cfg.grid_outer_delta,
            cap=cfg.cap,
            workers=cfg.workers if workers is None else workers,
        )

    def symmetry(self, ch: TwoWayChannel) -> Tuple[SymmetryReport, SymmetryReport]:
        """Symmetry screens for the channel as given and with the terminals swapped."""
        cfg = self.config
        reports = []
        for label, oriented in (("as given", ch), ("terminals swapped", swap_terminals(ch))):
            self._log(f"Symmetry screens ({label})...")
            report = assess_symmetry(
                oriented,
                tol=cfg.sym_tol,
                delta=cfg.delta,
                refine_tol=cfg.refine_tol,
                b2_delta=cfg.grid_outer_delta,
                cap=cfg.cap,
                workers=cfg.workers,
            )
            thm3 = report.thm3_common_entropy_max
            if not thm3.applicable:
                self._warn(
                    f"Theorem 3 screen not applicable ({label}): the condition (a) witness "
                    "has a zero-probability symbol"
                )
            if report.b2_search.skipped:
                self._log(f"  (b2) search skipped: {report.b2_search.skipped}")
            reports.append(report)
        return reports[0], reports[1]

    def run_report(self) -> Dict[str, Any]:
        """Run both assessment steps and write report.json, the CSVs and regions.svg."""
        cfg = self.config
        self._print_header("report")
        start_time = time.time()

        ch = self.load(cfg.gamma)
        self._count_work(ch)

        self._log("Step 1: symmetry screens", force=True)
        sym, sym_swapped = self.symmetry(ch)
        self._log("Step 2: rate region bounds", force=True)
        bounds = self.bounds(ch)
        self._check_convergence(bounds)

        payload: Dict[str, Any] = {
            "channel": str(cfg.channel_path),
            "gamma": cfg.gamma,
            **bounds.to_dict(),
            "symmetry": sym.to_dict(),
            "symmetry_swapped": sym_swapped.to_dict(),
        }

        out_dir = Path(cfg.out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        self._write(write_json(payload, out_dir / "report.json"))
        regions = {name: getattr(bounds, name) for name in REGION_FILES}
        for name, frontier in regions.items():
            if frontier is not None:
                self._write(write_frontier_csv(frontier, out_dir / f"{name}.csv"))
        title = Path(cfg.channel_path).stem + (f" (gamma={cfg.gamma:g})" if cfg.gamma is not None else "")
        self._write(plot_regions(regions, out_dir / "regions.svg", title=title))

        self._print_summary(bounds, sym, sym_swapped, time.time() - start_time)
        return payload

    def _sweep_point(self, gamma: float) -> Tuple[float, BoundsReport]:
        ch = load_channel(Path(self.config.channel_path).read_bytes(), {"gamma": gamma})
        return gamma, self.bounds(ch, workers=1)

    def run_sweep(self, gammas: Sequence[float], xlsx: bool = False) -> List[Dict[str, float]]:
        """Compute alpha*, beta*, eps and I* for every gamma and write the sweep table."""
        cfg = self.config
        if not gammas:
            raise ValueError("no gamma values given")
        self._print_header("sweep")
        self._log(f"Gammas: {', '.join(f'{g:g}' for g in gammas)}", force=True)
        start_time = time.time()

        raw = Path(cfg.channel_path).read_bytes()
        if "gamma" not in declared_parameters(raw):
            raise ChannelValidationError(
                f"{cfg.channel_path} declares no gamma parameter; sweep needs a parameterised channel"
            )
        # Validates every gamma before the expensive part starts.
        for gamma in gammas:
            self._count_work(self.load(gamma))

        rows: List[Dict[str, float]] = []
        curves: List[Dict[str, Any]] = []
        for gamma, report in run_chunks(self._sweep_point, list(gammas), cfg.workers):
            self._check_convergence(report)
            self._log(
                f"  gamma={gamma:g}: alpha*={report.alpha_star:.4f} beta*={report.beta_star:.4f} "
                f"eps={report.epsilon:.4f}",
                force=True,
            )
            rows.append(
                {
                    "gamma": gamma,
                    "alpha_star": report.alpha_star,
                    "beta_star": report.beta_star,
                    "epsilon": report.epsilon,
                    "i1_star": report.i1_star,
                    "i2_star": report.i2_star,
                }
            )
            curves.append({"gamma": gamma, "inner": report.inner, "eps_region": report.eps_region})

        out_dir = Path(cfg.out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        for path in write_sweep_table(
            rows, out_dir / "sweep.csv", out_dir / "sweep.xlsx" if xlsx else None
        ):
            self._write(path)
        self._write(plot_sweep(curves, out_dir / "sweep.svg"))

        print(f"\nCompleted in {time.time() - start_time:.1f} seconds")
        print(f"Sweep table written to {out_dir / 'sweep.csv'} ({len(rows)} rows)")
        return rows

    def _write(self, path: Path) -> None:
        self.stats["files_written"] += 1
        self._log(f"  wrote {path}")

    def _print_header(self, command: str) -> None:
        cfg = self.config
        print(f"Two-way channel capacity bounds: {command}")
        print(f"{'=' * 50}")
        print(f"Channel: {cfg.channel_path}")
        if cfg.gamma is not None and command == "report":
            print(f"Gamma: {cfg.gamma:g}")
        print(f"Grid step: {cfg.delta:g}  refine tol: {cfg.refine_tol:g}  symmetry tol: {cfg.sym_tol:g}")
        if cfg.with_grid_outer:
            print(f"Joint-input outer bound grid step: {cfg.grid_outer_delta:g}")
        print(f"Worker threads: {cfg.workers}")
        print(f"Output directory: {cfg.out_dir}")
        print(f"{'=' * 50}\n")

    def _print_summary(
        self, bounds: BoundsReport, sym: SymmetryReport, sym_swapped: SymmetryReport, elapsed: float
    ) -> None:
        print(f"\n{'=' * 50}")
        print("SUMMARY")
        print(f"{'=' * 50}")
        print(f"I*_1 = {bounds.i1_star:.4f}   I*_2 = {bounds.i2_star:.4f}")
        print(f"alpha* = {bounds.alpha_star:.4f}   beta* = {bounds.beta_star:.4f}")
        print(f"epsilon = {bounds.epsilon:.4f}")
        print(f"Uniform-input rate loss (terminal 1): {bounds.uniform_gap:.4f}")
        for label, report in (("as given", sym), ("swapped", sym_swapped)):
            print(
                f"Symmetry ({label}): condition (a) {_verdict(report.cond_a.holds)}, "
                f"(b1) {_verdict(report.cond_b1.holds)}, "
                f"Proposition 1 {_verdict(report.prop1_holds)}"
            )
        if sym.prop1_holds or sym_swapped.prop1_holds:
            print("\nIndependent inputs are optimal: the inner bound is the capacity region.")
        else:
            print(
                f"\nCapacity region lies between the inner bound and the outer bound; "
                f"the outer bound is an {bounds.epsilon:.4f}-approximated capacity region."
            )
        print(f"Blahut-Arimoto solves: {self.stats['ba_solves']}")
        print(f"Rate pairs evaluated: {self.stats['rate_pairs']}")
        print(f"Files written: {self.stats['files_written']}")
        print(f"Completed in {elapsed:.1f} seconds")


def _verdict(holds: bool) -> str:
    return "holds" if holds else "fails"
