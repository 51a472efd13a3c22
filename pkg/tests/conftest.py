"""Shared helpers for building random on-surface states and polygons."""

import math
import random

import numpy as np
import pytest

from curvednbody import BodySystem, Curvature, project_tangent


def random_surface_points(rng: np.random.Generator, n: int, c: Curvature) -> np.ndarray:
    """n points on the surface, resampled until pair denominators are safe."""
    while True:
        if c.kappa > 0:
            raw = rng.normal(size=(n, 3))
            norms = np.linalg.norm(raw, axis=1, keepdims=True)
            q = raw / norms / math.sqrt(c.kappa)
        else:
            xy = rng.normal(scale=0.8, size=(n, 2))
            zsq = xy[:, 0] ** 2 + xy[:, 1] ** 2 + 1.0 / abs(c.kappa)
            q = np.column_stack((xy, np.sqrt(zsq)))
        metric = np.array([1.0, 1.0, float(c.sigma)])
        w = c.kappa * (q @ (q * metric).T)
        np.fill_diagonal(w, 0.0)
        d = c.sigma * (1.0 - w * w)
        np.fill_diagonal(d, 1.0)
        if n == 1 or np.min(np.abs(d)) > 1e-6:
            return q


def random_state(rng: np.random.Generator, n: int, c: Curvature) -> BodySystem:
    q = random_surface_points(rng, n, c)
    v = project_tangent(q, rng.normal(size=(n, 3)), c)
    m = rng.uniform(0.5, 2.0, size=n)
    return BodySystem(c, m, q, v)


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


@pytest.fixture
def pyrng():
    return random.Random(20240817)
