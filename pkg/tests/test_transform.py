import json
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from robbo import (
    DuplicateSampleError,
    InsufficientDataError,
    InvalidToleranceError,
    NonParetoDatasetError,
    ObjectivePoint,
    RotatedPoint,
    ToleranceVec,
    build_dataset,
    dataset_from_dict,
    dataset_from_json,
    dataset_to_dict,
    dataset_to_json,
    from_vq,
    make_transform,
    to_vq,
)
from conftest import random_pareto_dataset

deltas = st.floats(min_value=1e-3, max_value=1e3, allow_nan=False, allow_infinity=False)
coords = st.floats(min_value=-1e6, max_value=1e6, allow_nan=False, allow_infinity=False)


def test_forward_matrix_unit_tolerances():
    t = make_transform(ToleranceVec(1.0, 1.0))
    expected = np.array([[0.70711, -0.70711], [0.70711, 0.70711]])
    np.testing.assert_allclose(t.forward, expected, atol=1e-5)


def test_forward_matrix_scaled_tolerances():
    t = make_transform(ToleranceVec(1.0, 2.0))
    expected = np.array([[0.70711, -0.35355], [0.70711, 0.35355]])
    np.testing.assert_allclose(t.forward, expected, atol=1e-5)


@pytest.mark.parametrize("bad", [(1.0, 0.0), (0.0, 1.0), (-1.0, 1.0),
                                 (float("nan"), 1.0), (float("inf"), 1.0)])
def test_invalid_tolerances_rejected(bad):
    with pytest.raises(InvalidToleranceError):
        ToleranceVec(*bad)


def test_to_vq_examples():
    t = make_transform(ToleranceVec(1.0, 1.0))
    assert to_vq(t, ObjectivePoint(0.0, 0.0)) == RotatedPoint(0.0, 0.0)
    r = to_vq(t, ObjectivePoint(10.0, 0.0))
    assert r.v == pytest.approx(7.0711, abs=1e-4)
    assert r.q == pytest.approx(7.0711, abs=1e-4)
    t2 = make_transform(ToleranceVec(1.0, 2.0))
    r2 = to_vq(t2, ObjectivePoint(2.0, 4.0))
    assert r2.v == pytest.approx(0.0, abs=1e-12)
    assert r2.q == pytest.approx(2.8284, abs=1e-4)


def test_from_vq_examples():
    t = make_transform(ToleranceVec(1.0, 1.0))
    assert from_vq(t, RotatedPoint(0.0, 0.0)) == ObjectivePoint(0.0, 0.0)
    p = from_vq(t, RotatedPoint(7.0711, 7.0711))
    assert p.z1 == pytest.approx(10.0, abs=1e-3)
    assert p.z2 == pytest.approx(0.0, abs=1e-3)


@given(d1=deltas, d2=deltas, z1=coords, z2=coords)
def test_round_trip_identity(d1, d2, z1, z2):
    # The attainable float accuracy scales with the tolerance-normalized
    # magnitudes (the rotation cancels when z1/d1 and z2/d2 are close).
    t = make_transform(ToleranceVec(d1, d2))
    p = ObjectivePoint(z1, z2)
    back = from_vq(t, to_vq(t, p))
    load = abs(z1) / d1 + abs(z2) / d2
    assert abs(back.z1 - z1) <= 1e-12 * max(1.0, d1 * load)
    assert abs(back.z2 - z2) <= 1e-12 * max(1.0, d2 * load)


@given(z1=coords, z2=coords)
def test_round_trip_identity_unit_tolerances(z1, z2):
    t = make_transform(ToleranceVec(1.0, 1.0))
    p = ObjectivePoint(z1, z2)
    back = from_vq(t, to_vq(t, p))
    scale = max(1.0, abs(z1), abs(z2))
    assert abs(back.z1 - z1) <= 1e-12 * scale
    assert abs(back.z2 - z2) <= 1e-12 * scale


@given(d1=deltas, d2=deltas)
def test_forward_times_inverse_is_identity(d1, d2):
    t = make_transform(ToleranceVec(d1, d2))
    np.testing.assert_allclose(t.forward @ t.inverse, np.eye(2), atol=1e-12)


def test_build_dataset_orders_by_z1():
    d = build_dataset(
        ToleranceVec(1.0, 1.0),
        [ObjectivePoint(10.0, 0.0), ObjectivePoint(0.0, 10.0)],
    )
    np.testing.assert_allclose(d.z1, [0.0, 10.0])
    np.testing.assert_allclose(d.v, [-7.0711, 7.0711], atol=1e-4)
    a1, a2 = d.anchors
    assert (a1.z1, a1.z2) == (0.0, 10.0)
    assert (a2.z1, a2.z2) == (10.0, 0.0)


def test_build_dataset_rejects_dominated_point():
    points = [ObjectivePoint(0.0, 10.0), ObjectivePoint(5.0, 6.0), ObjectivePoint(6.0, 6.0)]
    with pytest.raises(NonParetoDatasetError):
        build_dataset(ToleranceVec(1.0, 1.0), points)


def test_build_dataset_needs_two_points():
    with pytest.raises(InsufficientDataError):
        build_dataset(ToleranceVec(1.0, 1.0), [ObjectivePoint(0.0, 10.0)])


def test_build_dataset_rejects_duplicate_v():
    points = [
        ObjectivePoint(0.0, 10.0),
        ObjectivePoint(5.0, 5.0),
        ObjectivePoint(5.0 + 1e-14, 5.0 - 1e-14),
        ObjectivePoint(10.0, 0.0),
    ]
    with pytest.raises(DuplicateSampleError):
        build_dataset(ToleranceVec(1.0, 1.0), points)


def test_order_preserved_on_random_pareto_sets(rng):
    for _ in range(50):
        d = random_pareto_dataset(rng)
        assert np.all(np.diff(d.v) > 0)


def test_rotated_images_have_sub_unit_slope(rng):
    # |dq| < |dv| for any two mutually non-dominated points.
    for _ in range(50):
        d = random_pareto_dataset(rng)
        v, q = d.v, d.q
        dv = v[:, None] - v[None, :]
        dq = q[:, None] - q[None, :]
        off = ~np.eye(d.size, dtype=bool)
        assert np.all(np.abs(dq[off]) < np.abs(dv[off]))


def test_dataset_json_round_trip(rng):
    d = random_pareto_dataset(rng)
    d2 = dataset_from_json(dataset_to_json(d))
    np.testing.assert_array_equal(d.z1, d2.z1)
    np.testing.assert_array_equal(d.z2, d2.z2)
    np.testing.assert_array_equal(d.v, d2.v)
    assert d.delta == d2.delta


def test_dataset_json_accepts_unordered_points_and_keeps_x():
    payload = {
        "delta": [1.0, 2.0],
        "points": [
            {"z": [10.0, 0.0], "x": [1.5, 2.5]},
            {"z": [0.0, 10.0]},
            {"z": [4.0, 6.0], "x": [0.25]},
        ],
    }
    d = dataset_from_dict(payload)
    np.testing.assert_allclose(d.z1, [0.0, 4.0, 10.0])
    assert d.xs == (None, (0.25,), (1.5, 2.5))
    out = dataset_to_dict(d)
    assert out["points"][1] == {"z": [4.0, 6.0], "x": [0.25]}
    assert "x" not in out["points"][0]
    assert json.loads(dataset_to_json(d)) == out
