"""Shared fixtures and hypothesis strategies for the test suite."""

from __future__ import annotations

import numpy as np
import pytest
from hypothesis import HealthCheck, settings, strategies as st

from gazekit import GazeMap, normalize_to_simplex

settings.register_profile(
    "gazekit",
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("gazekit")


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def random_map(rng, height, width, low=0.05, high=1.0) -> GazeMap:
    """A strictly positive random map; every cell clears typical KL floors."""
    return normalize_to_simplex(rng.uniform(low, high, size=(height, width)))


@st.composite
def map_pairs(draw, min_side=2, max_side=10):
    """Two equally shaped strictly positive random maps."""
    h = draw(st.integers(min_side, max_side))
    w = draw(st.integers(min_side, max_side))
    seed = draw(st.integers(0, 2**32 - 1))
    gen = np.random.default_rng(seed)
    return random_map(gen, h, w), random_map(gen, h, w)


@st.composite
def gaze_maps(draw, min_side=2, max_side=10):
    return draw(map_pairs(min_side, max_side))[0]


@st.composite
def logit_grids(draw, min_side=2, max_side=10, scale=3.0):
    h = draw(st.integers(min_side, max_side))
    w = draw(st.integers(min_side, max_side))
    seed = draw(st.integers(0, 2**32 - 1))
    gen = np.random.default_rng(seed)
    return gen.normal(0.0, scale, size=(h, w))
