"""Two-way channel model: distributions, one-way sub-channels and the channel file format.

A DM-TWC is stored through its two marginal transition tensors

    forward[x1][x2][y2]  = P(y2 | x1, x2)   (terminal 1 -> terminal 2)
    backward[x1][x2][y1] = P(y1 | x1, x2)   (terminal 2 -> terminal 1)

which is all the bound and symmetry computations need.
"""

import ast
import json
import math
import operator
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from .errors import ChannelFormatError, ChannelValidationError

SUM_TOL = 1e-9

_ALLOWED_KEYS = {"nx1", "nx2", "ny1", "ny2", "forward", "backward", "joint", "parameters", "description"}


class Direction(Enum):
    """Transmission direction of a two-way channel."""

    FORWARD = "forward"  # terminal 1 -> terminal 2, P(y2|x1,x2), states are x2
    BACKWARD = "backward"  # terminal 2 -> terminal 1, P(y1|x1,x2), states are x1

    @property
    def opposite(self) -> "Direction":
        return Direction.BACKWARD if self is Direction.FORWARD else Direction.FORWARD


def _frozen(values: Any) -> np.ndarray:
    arr = np.array(values, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class Distribution:
    """Probability vector on a finite alphabet."""

    probs: Tuple[float, ...]

    def __post_init__(self) -> None:
        probs = tuple(float(p) for p in self.probs)
        object.__setattr__(self, "probs", probs)
        if not probs:
            raise ValueError("distribution must have at least one entry")
        if any(not np.isfinite(p) or p < 0.0 for p in probs):
            raise ValueError(f"distribution has negative or non-finite entries: {probs}")
        if abs(sum(probs) - 1.0) > SUM_TOL:
            raise ValueError(f"distribution sums to {sum(probs)!r}, expected 1")

    @classmethod
    def from_array(cls, values: Iterable[float]) -> "Distribution":
        return cls(tuple(float(v) for v in values))

    @classmethod
    def uniform(cls, size: int) -> "Distribution":
        return cls(tuple([1.0 / size] * size))

    @classmethod
    def point_mass(cls, size: int, index: int) -> "Distribution":
        probs = [0.0] * size
        probs[index] = 1.0
        return cls(tuple(probs))

    def __len__(self) -> int:
        return len(self.probs)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.probs, dtype=float)


@dataclass(frozen=True, eq=False)
class ChannelMatrix:
    """Row-stochastic one-way channel: entries[x][y] = P(y|x)."""

    entries: np.ndarray

    def __post_init__(self) -> None:
        arr = _frozen(self.entries)
        if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ChannelValidationError(f"channel matrix must be 2-D and non-empty, got shape {arr.shape}")
        _check_stochastic(arr, "channel matrix")
        object.__setattr__(self, "entries", arr)

    @property
    def rows(self) -> int:
        return int(self.entries.shape[0])

    @property
    def cols(self) -> int:
        return int(self.entries.shape[1])

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ChannelMatrix):
            return NotImplemented
        return np.array_equal(self.entries, other.entries)

    def __hash__(self) -> int:
        return hash(self.entries.tobytes())


@dataclass(frozen=True, eq=False)
class TwoWayChannel:
    """A DM-TWC given by its forward and backward marginal transition tensors."""

    forward: np.ndarray
    backward: np.ndarray

    def __post_init__(self) -> None:
        fwd = _frozen(self.forward)
        bwd = _frozen(self.backward)
        if fwd.ndim != 3 or bwd.ndim != 3:
            raise ChannelValidationError("forward and backward must be 3-D tensors [x1][x2][y]")
        if fwd.shape[:2] != bwd.shape[:2]:
            raise ChannelValidationError(
                f"input alphabets disagree: forward {fwd.shape[:2]} vs backward {bwd.shape[:2]}"
            )
        if min(fwd.shape) < 1 or min(bwd.shape) < 1:
            raise ChannelValidationError("all alphabet sizes must be >= 1")
        _check_stochastic(fwd, "forward")
        _check_stochastic(bwd, "backward")
        object.__setattr__(self, "forward", fwd)
        object.__setattr__(self, "backward", bwd)

    @property
    def nx1(self) -> int:
        return int(self.forward.shape[0])

    @property
    def nx2(self) -> int:
        return int(self.forward.shape[1])

    @property
    def ny1(self) -> int:
        return int(self.backward.shape[2])

    @property
    def ny2(self) -> int:
        return int(self.forward.shape[2])

    def input_size(self, direction: Direction) -> int:
        """Alphabet size of the transmitting terminal in `direction`."""
        return self.nx1 if direction is Direction.FORWARD else self.nx2

    def state_count(self, direction: Direction) -> int:
        """Number of sub-channels (opposite terminal's symbols) in `direction`."""
        return self.nx2 if direction is Direction.FORWARD else self.nx1

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TwoWayChannel):
            return NotImplemented
        return np.array_equal(self.forward, other.forward) and np.array_equal(
            self.backward, other.backward
        )

    def __hash__(self) -> int:
        return hash((self.forward.tobytes(), self.backward.tobytes()))


def _check_stochastic(arr: np.ndarray, what: str) -> None:
    if not np.all(np.isfinite(arr)):
        raise ChannelValidationError(f"{what}: non-finite entry")
    if np.any(arr < 0.0):
        idx = tuple(int(i) for i in np.argwhere(arr < 0.0)[0])
        raise ChannelValidationError(f"{what}: negative entry {arr[idx]!r} at {list(idx)}")
    if np.any(arr > 1.0 + SUM_TOL):
        idx = tuple(int(i) for i in np.argwhere(arr > 1.0 + SUM_TOL)[0])
        raise ChannelValidationError(f"{what}: entry {arr[idx]!r} at {list(idx)} exceeds 1")
    sums = arr.sum(axis=-1)
    bad = np.abs(sums - 1.0) > SUM_TOL
    if np.any(bad):
        idx = tuple(int(i) for i in np.argwhere(bad)[0])
        raise ChannelValidationError(f"{what}: row {list(idx)} sums to {sums[idx]!r}, expected 1")


def sub_channel(ch: TwoWayChannel, direction: Direction, fixed_symbol: int) -> ChannelMatrix:
    """One-way channel obtained by freezing the opposite terminal's input.

    Forward with fixed x2 gives the |X1| x |Y2| matrix P(y2|x1, x2);
    Backward with fixed x1 gives the |X2| x |Y1| matrix P(y1|x1, x2).
    """
    count = ch.state_count(direction)
    if not 0 <= fixed_symbol < count:
        raise IndexError(f"symbol {fixed_symbol} out of range for {count} states ({direction.value})")
    if direction is Direction.FORWARD:
        return ChannelMatrix(ch.forward[:, fixed_symbol, :])
    return ChannelMatrix(ch.backward[fixed_symbol, :, :])


def sub_channel_stack(ch: TwoWayChannel, direction: Direction) -> np.ndarray:
    """All sub-channels of `direction` as an array [state][input][output]."""
    if direction is Direction.FORWARD:
        return np.ascontiguousarray(ch.forward.transpose(1, 0, 2))
    return np.ascontiguousarray(ch.backward)


def swap_terminals(ch: TwoWayChannel) -> TwoWayChannel:
    """Relabel terminal 1 as terminal 2 and vice versa."""
    return TwoWayChannel(
        forward=ch.backward.transpose(1, 0, 2),
        backward=ch.forward.transpose(1, 0, 2),
    )


# ---------------------------------------------------------------------------
# Channel file format
# ---------------------------------------------------------------------------

_BINOPS = {
    ast.Add: operator.add,
    ast.Sub: operator.sub,
    ast.Mult: operator.mul,
    ast.Div: operator.truediv,
}
_UNARYOPS = {ast.USub: operator.neg, ast.UAdd: operator.pos}


def _eval_expression(text: str, params: Mapping[str, float]) -> float:
    """Evaluate an arithmetic entry such as "0.8 - gamma"."""
    try:
        tree = ast.parse(text, mode="eval")
    except SyntaxError as e:
        raise ChannelFormatError(f"cannot parse entry expression {text!r}: {e.msg}") from e

    def visit(node: ast.AST) -> float:
        if isinstance(node, ast.Expression):
            return visit(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)) and not isinstance(
            node.value, bool
        ):
            return float(node.value)
        if isinstance(node, ast.Name):
            if node.id not in params:
                raise ChannelValidationError(
                    f"entry {text!r} uses parameter {node.id!r} with no value supplied"
                )
            return float(params[node.id])
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            return _BINOPS[type(node.op)](visit(node.left), visit(node.right))
        if isinstance(node, ast.UnaryOp) and type(node.op) in _UNARYOPS:
            return _UNARYOPS[type(node.op)](visit(node.operand))
        raise ChannelFormatError(f"unsupported syntax in entry expression {text!r}")

    try:
        return visit(tree)
    except ZeroDivisionError as e:
        raise ChannelValidationError(f"division by zero in entry {text!r}") from e


def _declared_ranges(declared: Any) -> Dict[str, Tuple[float, float]]:
    if declared is None:
        return {}
    if not isinstance(declared, dict):
        raise ChannelFormatError('"parameters" must map names to [low, high] ranges')
    ranges: Dict[str, Tuple[float, float]] = {}
    for name, bounds in declared.items():
        if (
            not isinstance(bounds, list)
            or len(bounds) != 2
            or not all(isinstance(b, (int, float)) and not isinstance(b, bool) for b in bounds)
        ):
            raise ChannelFormatError(f"parameter {name!r}: range must be [low, high]")
        low, high = float(bounds[0]), float(bounds[1])
        if not (math.isfinite(low) and math.isfinite(high)):
            raise ChannelFormatError(f"parameter {name!r}: range bounds must be finite")
        if low > high:
            raise ChannelFormatError(f"parameter {name!r}: low {low} is above high {high}")
        ranges[name] = (low, high)
    return ranges


def _resolve_params(
    declared: Any, supplied: Optional[Mapping[str, float]]
) -> Dict[str, float]:
    supplied = dict(supplied or {})
    resolved: Dict[str, float] = {}
    for name, (low, high) in _declared_ranges(declared).items():
        if name not in supplied or supplied[name] is None:
            raise ChannelValidationError(
                f"channel has free parameter {name!r} in [{low}, {high}]; supply a value "
                f"(e.g. --{name} {low})"
            )
        value = float(supplied[name])
        if not low <= value <= high:
            raise ChannelValidationError(f"parameter {name!r}={value} outside [{low}, {high}]")
        resolved[name] = value
    return resolved


def _to_tensor(
    raw: Any, shape: Sequence[int], what: str, params: Mapping[str, float]
) -> np.ndarray:
    def walk(node: Any, depth: int, path: List[int]) -> Any:
        if depth == len(shape):
            if isinstance(node, bool):
                raise ChannelFormatError(f"{what}{path}: expected a number, got {node!r}")
            if isinstance(node, (int, float)):
                return float(node)
            if isinstance(node, str):
                return _eval_expression(node, params)
            raise ChannelFormatError(f"{what}{path}: expected a number, got {type(node).__name__}")
        if not isinstance(node, list):
            raise ChannelFormatError(f"{what}{path}: expected a list of length {shape[depth]}")
        if len(node) != shape[depth]:
            raise ChannelValidationError(
                f"{what}{path}: dimension mismatch, expected {shape[depth]} entries, got {len(node)}"
            )
        return [walk(child, depth + 1, path + [i]) for i, child in enumerate(node)]

    return np.array(walk(raw, 0, []), dtype=float).reshape(tuple(shape))


def load_channel(
    text: Union[str, bytes], params: Optional[Mapping[str, float]] = None
) -> TwoWayChannel:
    """Parse and validate a channel file.

    Args:
        text: JSON document (str or UTF-8 bytes) in the channel file format
        params: values for the parameters the file declares (e.g. {"gamma": 0.3})

    Raises:
        ChannelFormatError: malformed syntax or structure
        ChannelValidationError: negative entries, bad row sums, dimension mismatch
    """
    if isinstance(text, bytes):
        try:
            text = text.decode("utf-8")
        except UnicodeDecodeError as e:
            raise ChannelFormatError(f"channel file is not UTF-8: {e}") from e
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ChannelFormatError(f"invalid JSON at line {e.lineno} column {e.colno}: {e.msg}") from e
    if not isinstance(doc, dict):
        raise ChannelFormatError("channel file must be a JSON object")

    unknown = sorted(set(doc) - _ALLOWED_KEYS)
    if unknown:
        raise ChannelFormatError(f"unknown key(s) in channel file: {', '.join(unknown)}")

    sizes: Dict[str, int] = {}
    for key in ("nx1", "nx2", "ny1", "ny2"):
        value = doc.get(key)
        if isinstance(value, bool) or not isinstance(value, int):
            raise ChannelFormatError(f'"{key}" must be an integer')
        if value < 1:
            raise ChannelValidationError(f'"{key}" must be >= 1, got {value}')
        sizes[key] = value
    for key in ("forward", "backward"):
        if key not in doc:
            raise ChannelFormatError(f'missing "{key}" tensor')

    values = _resolve_params(doc.get("parameters"), params)
    nx1, nx2, ny1, ny2 = sizes["nx1"], sizes["nx2"], sizes["ny1"], sizes["ny2"]
    forward = _to_tensor(doc["forward"], (nx1, nx2, ny2), "forward", values)
    backward = _to_tensor(doc["backward"], (nx1, nx2, ny1), "backward", values)
    ch = TwoWayChannel(forward=forward, backward=backward)

    if "joint" in doc:
        joint = _to_tensor(doc["joint"], (nx1, nx2, ny1, ny2), "joint", values)
        _check_joint(joint, ch)
    return ch


def _check_joint(joint: np.ndarray, ch: TwoWayChannel) -> None:
    if np.any(joint < 0.0):
        raise ChannelValidationError("joint: negative entry")
    if np.any(np.abs(joint.sum(axis=2) - ch.forward) > SUM_TOL):
        raise ChannelValidationError("joint: summing out y1 does not reproduce the forward marginal")
    if np.any(np.abs(joint.sum(axis=3) - ch.backward) > SUM_TOL):
        raise ChannelValidationError("joint: summing out y2 does not reproduce the backward marginal")


def read_channel(path: Union[str, Path], params: Optional[Mapping[str, float]] = None) -> TwoWayChannel:
    """Load a channel file from disk (see `load_channel`)."""
    return load_channel(Path(path).read_bytes(), params)


def declared_parameters(text: Union[str, bytes]) -> Dict[str, Tuple[float, float]]:
    """Parameter ranges declared by a channel file, without substituting them.

    Raises:
        ChannelFormatError: invalid JSON or a malformed "parameters" block
    """
    try:
        doc = json.loads(text)
    except UnicodeDecodeError as e:
        raise ChannelFormatError(f"channel file is not UTF-8: {e}") from e
    except json.JSONDecodeError as e:
        raise ChannelFormatError(f"invalid JSON: {e.msg}") from e
    return _declared_ranges(doc.get("parameters") if isinstance(doc, dict) else None)


def _format_tensor(arr: np.ndarray, indent: str) -> str:
    blocks = []
    for block in arr:
        rows = ", ".join("[" + ", ".join(f"{v:.17g}" for v in row) + "]" for row in block)
        blocks.append(f"{indent}  [{rows}]")
    return "[\n" + ",\n".join(blocks) + f"\n{indent}]"


def save_channel(ch: TwoWayChannel) -> str:
    """Serialize a channel in the channel file format.

    Entries are written with 17 significant digits, so
    `load_channel(save_channel(ch)) == ch` holds exactly.
    """
    return (
        "{\n"
        f'  "nx1": {ch.nx1}, "nx2": {ch.nx2}, "ny1": {ch.ny1}, "ny2": {ch.ny2},\n'
        f'  "forward": {_format_tensor(ch.forward, "  ")},\n'
        f'  "backward": {_format_tensor(ch.backward, "  ")}\n'
        "}\n"
    )
