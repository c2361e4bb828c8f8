import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from resmeta import operators as ops
from resmeta.oracle import projection_reference
from resmeta.suites import zoo_operators

ZOO = zoo_operators()
coords = st.floats(-5, 5, allow_nan=False)
gammas = st.floats(0.05, 20)


def points(d):
    return st.lists(coords, min_size=d, max_size=d).map(np.array)


def test_resolve_examples():
    assert ops.resolve(ops.Zero(1), 1.0, [3.0]) == pytest.approx([3.0])
    assert ops.resolve(ops.LinearPSD(np.eye(1)), 1.0, [2.0]) == pytest.approx([1.0])
    assert ops.resolve(ops.NormalConeBox([0.0], [1.0]), 1.0, [2.5]) == pytest.approx([1.0])


def test_reflected_examples():
    assert ops.reflected(ops.LinearPSD(np.eye(1)), 1.0, [2.0]) == pytest.approx([0.0])
    assert ops.reflected(ops.NormalConeBox([0.0], [1.0]), 1.0, [2.5]) == pytest.approx([-0.5])


def test_identity_and_scaling_reports():
    op = ops.Zero(1)
    rep = ops.check_resolvent_identity(op, 1.0, 2.0, [1.0])
    assert rep.lhs == pytest.approx(0.0) and rep.ok
    rep = ops.check_resolvent_scaling(ops.NormalConeBox([0.0], [1.0]), 1.0, 2.0, [3.5])
    assert rep.slack == pytest.approx(2.5)


def test_rejects_bad_input():
    with pytest.raises(ValueError):
        ops.LinearPSD(np.array([[-1.0]]))
    with pytest.raises(ValueError):
        ops.Quadratic(np.array([[1.0, 1.0], [0.0, 1.0]]), [0.0, 0.0])
    with pytest.raises(ValueError):
        ops.NormalConeBox([1.0], [0.0])
    with pytest.raises(ValueError):
        ops.resolve(ops.Zero(1), 0.0, [1.0])
    with pytest.raises(ValueError):
        ops.resolve(ops.Zero(2), 1.0, [1.0])


@pytest.mark.parametrize("name", sorted(ZOO))
def test_resolve_many_matches_pointwise(name):
    op = ZOO[name]
    X = np.random.default_rng(1).normal(0, 2, (50, op.dim))
    single = np.array([op.resolve(0.7, x) for x in X])
    assert np.allclose(op.resolve_many(0.7, X), single, atol=1e-12)


@pytest.mark.parametrize("name", sorted(ZOO))
@given(data=st.data())
def test_firmly_nonexpansive(name, data):
    op = ZOO[name]
    x, y = data.draw(points(op.dim)), data.draw(points(op.dim))
    g = data.draw(gammas)
    jx, jy = op.resolve(g, x), op.resolve(g, y)
    lhs = np.sum((jx - jy) ** 2)
    rhs = np.sum((x - y) ** 2) - np.sum(((x - jx) - (y - jy)) ** 2)
    assert lhs <= rhs + 1e-9


@pytest.mark.parametrize("name", sorted(ZOO))
@given(data=st.data())
def test_reflection_nonexpansive(name, data):
    op = ZOO[name]
    x, y = data.draw(points(op.dim)), data.draw(points(op.dim))
    g = data.draw(gammas)
    d = np.linalg.norm(ops.reflected(op, g, x) - ops.reflected(op, g, y))
    assert d <= np.linalg.norm(x - y) + 1e-9


@pytest.mark.parametrize("name", sorted(ZOO))
@given(data=st.data())
def test_resolvent_identity_and_scaling(name, data):
    op = ZOO[name]
    x = data.draw(points(op.dim))
    a, b = sorted((data.draw(gammas), data.draw(gammas)))
    assert ops.check_resolvent_identity(op, a, b, x).slack >= -1e-9
    assert ops.check_resolvent_identity(op, b, a, x).slack >= -1e-9
    assert ops.check_resolvent_scaling(op, a, b, x).slack >= -1e-9


@pytest.mark.parametrize("name", sorted(ZOO))
@given(data=st.data())
def test_graph_pairs_are_monotone(name, data):
    op = ZOO[name]
    g = data.draw(gammas)
    (p, v), (q, w) = ops.graph_pair(op, data.draw(points(op.dim)), g), ops.graph_pair(op, data.draw(points(op.dim)), g)
    assert (p - q) @ (v - w) >= -1e-9


@pytest.mark.parametrize("name", sorted(ZOO))
def test_zero_set_points_are_fixed(name):
    op = ZOO[name]
    q = op.zero_set.sample()
    for g in (0.1, 1.0, 10.0):
        assert np.allclose(op.resolve(g, q), q, atol=1e-10)


def test_common_zero_projection_examples():
    box1, box2 = ops.NormalConeBox([0.0], [1.0]), ops.NormalConeBox([0.0], [2.0])
    assert ops.common_zero_projection(box1, box2, [1.5]) == pytest.approx([1.0])
    quad = ops.Quadratic(np.eye(1), [0.0])
    assert ops.common_zero_projection(quad, quad, [0.7]) == pytest.approx([0.0])
    sq = ops.NormalConeBox([0.0, 0.0], [1.0, 1.0])
    assert ops.common_zero_projection(sq, ops.Zero(2), [-1.0, 0.5]) == pytest.approx([0.0, 0.5])


def test_projection_reference_matches_scenario(line_scenario):
    assert projection_reference(line_scenario) == pytest.approx([0.0], abs=1e-12)


def test_translated_zero_set():
    op = ops.Translated(ops.LinearPSD(np.eye(2)), [1.0, -2.0])
    assert np.allclose(op.resolve(3.0, [1.0, -2.0]), [1.0, -2.0])
    assert op.zero_set.contains(np.array([1.0, -2.0]))
