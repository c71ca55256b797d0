"""Output files: report JSON, frontier CSVs, the sweep table and SVG plots."""

import json
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Sequence, Union

import matplotlib

matplotlib.use("Agg")
# fixed ids so repeated runs write identical SVG
matplotlib.rcParams["svg.hashsalt"] = "twc-bounds"

import pandas as pd  # noqa: E402
from matplotlib.figure import Figure  # noqa: E402

from .bound_engine import Frontier  # noqa: E402

PathLike = Union[str, Path]

SWEEP_COLUMNS = ["gamma", "alpha_star", "beta_star", "epsilon", "i1_star", "i2_star"]

# 800 x 600 SVG user units (points).
FIGURE_SIZE = (800 / 72, 600 / 72)
FIGURE_DPI = 72

REGION_STYLES = {
    "inner": {"label": "Shannon inner bound", "color": "tab:blue", "linestyle": "-"},
    "outer_simple": {"label": "alpha*/beta* outer bound", "color": "tab:red", "linestyle": "--"},
    "outer_trivial": {"label": "trivial outer bound", "color": "tab:gray", "linestyle": ":"},
    "eps_region": {"label": "eps-approximated region", "color": "tab:green", "linestyle": "-."},
    "outer_grid": {"label": "Shannon outer bound (grid)", "color": "tab:purple", "linestyle": "-"},
}


def frontier_frame(frontier: Frontier) -> pd.DataFrame:
    """Frontier vertices as an (r1, r2) table at 6-decimal resolution.

    Vertices closer than the written precision collapse onto one row.
    """
    frame = pd.DataFrame(frontier.to_lists(), columns=["r1", "r2"]).round(6)
    return frame.drop_duplicates(ignore_index=True)


def write_frontier_csv(frontier: Frontier, path: PathLike) -> Path:
    path = Path(path)
    frontier_frame(frontier).to_csv(path, index=False, float_format="%.6f")
    return path


def write_json(payload: Mapping[str, Any], path: PathLike) -> Path:
    """Write `payload` with a stable layout (no timestamps, fixed key order)."""
    path = Path(path)
    path.write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
    return path


def sweep_frame(rows: Sequence[Mapping[str, float]]) -> pd.DataFrame:
    return pd.DataFrame(list(rows), columns=SWEEP_COLUMNS)


def write_sweep_table(
    rows: Sequence[Mapping[str, float]], csv_path: PathLike, xlsx_path: Optional[PathLike] = None
) -> List[Path]:
    """Write the gamma sweep as CSV and optionally as an Excel sheet."""
    frame = sweep_frame(rows)
    written = [Path(csv_path)]
    frame.to_csv(csv_path, index=False, float_format="%.6f")
    if xlsx_path is not None:
        frame.to_excel(xlsx_path, index=False, sheet_name="sweep", engine="openpyxl")
        written.append(Path(xlsx_path))
    return written


def _new_axes(title: str):
    fig = Figure(figsize=FIGURE_SIZE, dpi=FIGURE_DPI)
    ax = fig.add_subplot(1, 1, 1)
    ax.set_xlabel("R1 (bits per channel use)")
    ax.set_ylabel("R2 (bits per channel use)")
    ax.set_title(title)
    ax.set_xlim(left=0.0)
    ax.set_ylim(bottom=0.0)
    ax.grid(True, alpha=0.3)
    return fig, ax


def _save_svg(fig: Figure, path: PathLike) -> Path:
    path = Path(path)
    fig.savefig(path, format="svg", metadata={"Date": None})
    return path


def plot_regions(regions: Mapping[str, Optional[Frontier]], path: PathLike, title: str = "") -> Path:
    """Overlay every region frontier on one plot."""
    fig, ax = _new_axes(title or "Rate region bounds")
    for name, frontier in regions.items():
        if frontier is None:
            continue
        style = REGION_STYLES.get(name, {"label": name})
        pts = frontier.as_array()
        ax.plot(pts[:, 0], pts[:, 1], **style)
    ax.legend(loc="upper right")
    return _save_svg(fig, path)


def plot_sweep(
    curves: Sequence[Dict[str, Any]], path: PathLike, title: str = "Bounds across gamma"
) -> Path:
    """One inner-bound and one eps-region curve per gamma.

    Each entry of `curves` has keys "gamma", "inner" and "eps_region".
    """
    fig, ax = _new_axes(title)
    cmap = matplotlib.colormaps["viridis"]
    for i, curve in enumerate(curves):
        color = cmap(i / max(len(curves) - 1, 1))
        inner = curve["inner"].as_array()
        eps = curve["eps_region"].as_array()
        ax.plot(inner[:, 0], inner[:, 1], color=color, linestyle="-", label=f"gamma={curve['gamma']:g}")
        ax.plot(eps[:, 0], eps[:, 1], color=color, linestyle="--")
    ax.legend(loc="upper right", title="solid: inner, dashed: eps-region")
    return _save_svg(fig, path)
