"""Capacity-region bounds and symmetry screens for discrete memoryless two-way channels."""

__version__ = "0.1.0"

from .ba_solver import CapacityResult, ba_capacity, max_output_entropy  # noqa: E402
from .bound_engine import (  # noqa: E402
    BoundsReport,
    Frontier,
    RatePair,
    alpha_star,
    beta_star,
    eps_region,
    full_report,
    hull_frontier,
    inner_bound,
    outer_bound_grid,
    theorem4_bound,
    trivial_outer,
)
from .channel_model import (  # noqa: E402
    ChannelMatrix,
    Direction,
    Distribution,
    TwoWayChannel,
    load_channel,
    read_channel,
    save_channel,
    sub_channel,
    swap_terminals,
)
from .errors import (  # noqa: E402
    ChannelFormatError,
    ChannelValidationError,
    EvaluationCapError,
    GridSpecError,
    TwcError,
)
from .symmetry_checks import SymmetryReport, assess_symmetry  # noqa: E402

__all__ = [
    "BoundsReport",
    "CapacityResult",
    "ChannelFormatError",
    "ChannelMatrix",
    "ChannelValidationError",
    "Direction",
    "Distribution",
    "EvaluationCapError",
    "Frontier",
    "GridSpecError",
    "RatePair",
    "SymmetryReport",
    "TwcError",
    "TwoWayChannel",
    "alpha_star",
    "assess_symmetry",
    "ba_capacity",
    "beta_star",
    "eps_region",
    "full_report",
    "hull_frontier",
    "inner_bound",
    "load_channel",
    "max_output_entropy",
    "outer_bound_grid",
    "read_channel",
    "save_channel",
    "sub_channel",
    "swap_terminals",
    "theorem4_bound",
    "trivial_outer",
    "__version__",
]
