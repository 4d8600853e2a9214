"""Shared fixture sets and interior-point samplers for the test suite."""

import numpy as np
import pytest

from toriccut import polylattice as pl


def f1():
    """Unit interval [0, 1] in R^1."""
    return pl.normalize(pl.polyhedral_set(1, [((-1,), 0), ((1,), 1)]))


def f2():
    """Standard unimodular triangle in R^2."""
    return pl.normalize(
        pl.polyhedral_set(2, [((-1, 0), 0), ((0, -1), 0), ((1, 1), 1)]))


def f3():
    """Half-plane cone {x1 >= 0} in R^2."""
    return pl.normalize(pl.polyhedral_set(2, [((-1, 0), 0)], kind=pl.CONE))


def f4():
    """First-quadrant cone in R^2, given with inward (lower) conormals."""
    return pl.normalize(
        pl.polyhedral_set(2, [((1, 0), 0), ((0, 1), 0)], kind=pl.CONE,
                          orientation=pl.LOWER))


def f5():
    """Triangle with a determinant-2 vertex at (1, 0)."""
    return pl.normalize(
        pl.polyhedral_set(2, [((-1, 0), 0), ((0, -1), 0), ((2, 1), 2)]))


def slab():
    """Vertical slab 0 <= x1 <= 1, unconstrained x2."""
    return pl.normalize(
        pl.polyhedral_set(2, [((-1, 0), 0), ((1, 0), 1)]))


def lens_cone():
    """Pointed cone with inward conormals (1,0) and (1,2)."""
    return pl.normalize(
        pl.polyhedral_set(2, [((-1, 0), 0), ((-1, -2), 0)], kind=pl.CONE))


def halfspace_r3():
    """Weakly convex half-space cone {x1 >= 0} in R^3."""
    return pl.normalize(pl.polyhedral_set(3, [((-1, 0, 0), 0)], kind=pl.CONE))


def f5_lift_cone():
    """Cone in R^3 over the determinant-2 triangle; not good off the apex."""
    return pl.normalize(
        pl.polyhedral_set(
            3,
            [((-1, 0, 0), 0), ((0, -1, 0), 0), ((2, 1, -2), 0), ((0, 0, -1), 0)],
            kind=pl.CONE))


def pyramid():
    """Square pyramid in R^3 whose apex has four active facets."""
    return pl.normalize(
        pl.polyhedral_set(
            3,
            [((0, 0, -1), 0), ((1, 0, 1), 1), ((-1, 0, 1), 1),
             ((0, 1, 1), 1), ((0, -1, 1), 1)]))


def sample_interior(name, rng, count, margin=0.05):
    """Deterministic strictly interior samples for the named fixture."""
    pts = []
    for _ in range(count):
        if name == "f1":
            pts.append(np.array([rng.uniform(margin, 1 - margin)]))
        elif name == "f2":
            while True:
                u, v = rng.uniform(margin, 1, size=2)
                if u + v < 1 - margin:
                    pts.append(np.array([u, v]))
                    break
        elif name == "slab":
            pts.append(np.array([rng.uniform(margin, 1 - margin),
                                 rng.uniform(-3, 3)]))
        elif name == "f3":
            pts.append(np.array([rng.uniform(margin, 5), rng.uniform(-3, 3)]))
        elif name == "f4":
            pts.append(np.array([rng.uniform(margin, 5), rng.uniform(margin, 5)]))
        elif name == "f5":
            while True:
                u, v = rng.uniform(margin, 1, size=2)
                if 2 * u + v < 2 - margin:
                    pts.append(np.array([u, v]))
                    break
        else:
            raise KeyError(name)
    return pts


FIXTURES = {
    "f1": f1,
    "f2": f2,
    "f3": f3,
    "f4": f4,
    "f5": f5,
    "slab": slab,
    "lens": lens_cone,
    "halfspace_r3": halfspace_r3,
    "f5_lift": f5_lift_cone,
}


def pytest_addoption(parser):
    parser.addoption(
        "--regen-goldens", action="store_true", default=False,
        help="rewrite CLI golden files instead of comparing against them")


@pytest.fixture
def regen_goldens(request):
    return request.config.getoption("--regen-goldens")
