"""Pytest configuration and shared fixtures.

The `twc_bounds` package is expected to be installed in dev mode
(`pip install -e .`) before running the tests. CI does this automatically.
Channel fixture files live in `fixtures/` at the repository root.
"""

from pathlib import Path

import numpy as np
import pytest

from twc_bounds.channel_model import TwoWayChannel, read_channel

FIXTURES_DIR = Path(__file__).resolve().parent.parent / "fixtures"


def _random_stochastic(rng: np.random.Generator, shape) -> np.ndarray:
    raw = rng.random(shape) + 1e-3
    return raw / raw.sum(axis=-1, keepdims=True)


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES_DIR


@pytest.fixture
def table1() -> TwoWayChannel:
    return read_channel(FIXTURES_DIR / "table1.json")


@pytest.fixture
def table2():
    """Factory: the gamma-parameterised fixture channel at a given gamma."""

    def make(gamma: float) -> TwoWayChannel:
        return read_channel(FIXTURES_DIR / "table2.json", {"gamma": gamma})

    return make


@pytest.fixture
def bsc_channel() -> TwoWayChannel:
    return read_channel(FIXTURES_DIR / "bsc.json")


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240611)


@pytest.fixture
def random_stochastic():
    """Factory: random row-stochastic tensor, rows along the last axis."""
    return _random_stochastic


@pytest.fixture
def random_channel():
    """Factory: random two-way channel with all alphabets in [2, max_alphabet]."""

    def make(rng: np.random.Generator, max_alphabet: int = 3) -> TwoWayChannel:
        nx1, nx2, ny1, ny2 = (int(n) for n in rng.integers(2, max_alphabet + 1, size=4))
        return TwoWayChannel(
            forward=_random_stochastic(rng, (nx1, nx2, ny2)),
            backward=_random_stochastic(rng, (nx1, nx2, ny1)),
        )

    return make
