from __future__ import annotations

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from vemmhd.mesh import build_mesh

settings.register_profile(
    "vemmhd",
    max_examples=25,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("vemmhd")


def random_polygon(seed: int, n_min: int = 3, n_max: int = 7):
    """Convex polygon inscribed in a randomly scaled and shifted circle."""
    rng = np.random.default_rng(seed)
    n = int(rng.integers(n_min, n_max + 1))
    gaps = rng.uniform(0.5, 1.5, size=n)
    angles = np.cumsum(gaps / gaps.sum() * 2 * np.pi) + rng.uniform(0, 2 * np.pi)
    radius = rng.uniform(0.05, 2.0)
    center = rng.uniform(-3, 3, size=2)
    pts = center + radius * np.column_stack([np.cos(angles), np.sin(angles)])
    return build_mesh(pts, [list(range(n))]).geometry[0]


@pytest.fixture
def unit_square():
    return build_mesh([[0, 0], [1, 0], [1, 1], [0, 1]], [[0, 1, 2, 3]]).geometry[0]


@pytest.fixture
def pentagon():
    ang = np.pi / 2 + 2 * np.pi * np.arange(5) / 5
    pts = np.column_stack([0.3 + 0.7 * np.cos(ang), -0.2 + 0.6 * np.sin(ang)])
    return build_mesh(pts, [list(range(5))]).geometry[0]


@pytest.fixture(scope="session")
def make_polygon():
    return random_polygon
