import numpy as np
import pytest

from robbo import (
    ObjectivePoint,
    RotatedPoint,
    ToleranceVec,
    build_dataset,
    from_vq,
    make_transform,
)


def rotated_dataset(pairs, delta=(1.0, 1.0)):
    """Dataset whose rotated coordinates equal the given (v, q) pairs."""
    tv = ToleranceVec(*delta)
    t = make_transform(tv)
    points = [from_vq(t, RotatedPoint(v, q)) for v, q in pairs]
    return build_dataset(tv, points)


def random_pareto_dataset(rng, n=None, delta=None):
    """Random mutually non-dominated points with well-separated coordinates."""
    n = int(n if n is not None else rng.integers(3, 51))
    z1 = np.cumsum(rng.uniform(0.05, 1.0, size=n))
    z2 = np.cumsum(rng.uniform(0.05, 1.0, size=n))[::-1]
    tv = delta or ToleranceVec(*rng.uniform(0.3, 3.0, size=2))
    points = [ObjectivePoint(z1=float(a), z2=float(b)) for a, b in zip(z1, z2)]
    return build_dataset(tv, points)


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
