import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from resmeta import operators as ops
from resmeta.iterations import Trajectory
from resmeta.nat import Nat
from resmeta.oracle import (
    WitnessQuery,
    WitnessResult,
    XU_KINDS,
    check_domination,
    check_mainge,
    check_monotone_inner_bound,
    check_xu_lemma,
    find_meta_witness,
    find_quasi_witness,
    make_mainge_fixture,
    make_xu_fixture,
    manufacture_graph_pair,
)
from resmeta.rates.counterfunctions import affine, constant, identity


def naive_meta(Y, k, f, cap):
    """Direct double loop over every pair in each window."""
    eps = 1.0 / (k + 1)
    for n in range(cap + 1):
        hi = f(n)
        ok = all(abs(Y[i] - Y[j]) <= eps for i in range(n, hi + 1) for j in range(i, hi + 1))
        if ok:
            return n
    return None


def naive_quasi(a, k, f, cap):
    eps = 1.0 / (k + 1)
    for n in range(cap + 1):
        if all(abs(a[m]) <= eps for m in range(n, f(n) + 1)):
            return n
    return None


def test_singleton_windows_give_zero(line_scenario):
    w = find_meta_witness(WitnessQuery(Trajectory(line_scenario), 50, identity(), 100))
    assert w.found and w.n_star == 0


def test_constant_orbit_gives_zero(zero_scenario):
    for k in range(4):
        w = find_meta_witness(WitnessQuery(Trajectory(zero_scenario), k, affine(2, 7), 100))
        assert w.n_star == 0


def test_line_regression_fixture(line_scenario):
    traj = Trajectory(line_scenario)
    f = affine(1, 5)
    w = find_meta_witness(WitnessQuery(traj, 9, f, 1000))
    assert w.found and w.n_star == 5
    Y = np.asarray(traj.points(50))[:, 0]
    assert naive_meta(Y, 9, lambda n: n + 5, 40) == 5


@pytest.mark.parametrize("k,shift", [(2, 3), (5, 10), (20, 1), (40, 7)])
def test_meta_witness_matches_naive_and_is_minimal(line_scenario, k, shift):
    traj = Trajectory(line_scenario)
    w = find_meta_witness(WitnessQuery(traj, k, affine(1, shift), 500))
    Y = np.asarray(traj.points(600))[:, 0]
    assert w.found
    assert w.n_star == naive_meta(Y, k, lambda n: n + shift, 500)
    if w.n_star > 0:
        n = w.n_star - 1
        window = Y[n : n + shift + 1]
        assert window.max() - window.min() > 1.0 / (k + 1)


def test_quasi_examples():
    a = [1.0 / (m + 1) for m in range(200)]
    assert find_quasi_witness([0.0] * 50, 3, identity(), 10).n_star == 0
    assert find_quasi_witness(a, 1, affine(1, 3), 50).n_star == 1
    assert find_quasi_witness(a, 0, affine(2, 1), 50).n_star == 0


def test_quasi_not_found_within_cap():
    w = find_quasi_witness([1.0] * 100, 2, identity(), 20)
    assert not w.found and w.checked_upto >= 20


@given(st.lists(st.floats(0, 1), min_size=60, max_size=60), st.integers(0, 5), st.integers(0, 6))
def test_quasi_matches_naive(a, k, shift):
    w = find_quasi_witness(a, k, affine(1, shift), 40)
    expect = naive_quasi(a, k, lambda n: n + shift, 40)
    assert w.found == (expect is not None)
    if w.found:
        assert w.n_star == expect
        if w.n_star:
            m = w.n_star - 1
            assert max(abs(x) for x in a[m : m + shift + 1]) > 1.0 / (k + 1)


def test_residual_metric_uses_resolvent_gaps(line_scenario):
    traj = Trajectory(line_scenario)
    w = find_meta_witness(WitnessQuery(traj, 3, affine(1, 2), 1000, metric="residual-both"))
    Y = np.asarray(traj.points(w.n_star + 3))[:, 0]
    # J_1 of the identity halves the point, so the residual is |y|/2
    assert np.all(np.abs(Y[w.n_star :]) / 2 <= 0.25)
    assert np.any(np.abs(Y[w.n_star - 1 : w.n_star + 2]) / 2 > 0.25)


def test_query_validation(line_scenario):
    traj = Trajectory(line_scenario)
    with pytest.raises(ValueError):
        WitnessQuery(traj, 0, identity(), metric="bogus")
    with pytest.raises(ValueError):
        WitnessQuery(traj, 0, identity(), cap=10**7)
    with pytest.raises(ValueError):
        WitnessQuery(traj, 0, identity(), metric="gap-to-point")


def test_check_domination_examples():
    assert check_domination(Nat.top(0), WitnessResult(True, 17, 17)) == "pass"
    assert check_domination(7, WitnessResult(True, 7, 7)) == "pass"
    assert check_domination(7, WitnessResult(True, 8, 8)) == "fail"
    assert check_domination(7, WitnessResult(False, 0, 100)) == "inconclusive"


def test_inner_bound_example():
    rep = check_monotone_inner_bound(ops.LinearPSD(np.eye(1)), 1.0, [2.0], [2.0], [3.0])
    assert rep.lhs == pytest.approx(-2.0)
    assert rep.rhs == pytest.approx(-3.75)
    assert rep.slack == pytest.approx(1.75)


def test_inner_bound_rejects_non_graph_pair():
    with pytest.raises(ValueError):
        check_monotone_inner_bound(ops.LinearPSD(np.eye(1)), 1.0, [2.0], [5.0], [3.0])


@given(st.lists(st.floats(-5, 5), min_size=2, max_size=2), st.lists(st.floats(-5, 5), min_size=2, max_size=2), st.floats(0.1, 5))
def test_inner_bound_on_box(p, x, lam):
    op = ops.NormalConeBox([-1.0, -1.0], [1.0, 1.0])
    a, b = manufacture_graph_pair(op, p, 1.0)
    assert check_monotone_inner_bound(op, lam, a, b, x).slack >= -1e-10


def test_mainge_examples():
    assert check_mainge([1, 2, 0, 0, 3, 1], 0, 0)["verdict"] == "pass"
    assert check_mainge([3, 2, 1], 0, 0)["verdict"] == "invalid-fixture"
    rng = np.random.default_rng(3)
    for _ in range(200):
        s, m, r = make_mainge_fixture(rng)
        assert check_mainge(s, m, r)["verdict"] == "pass"


@pytest.mark.parametrize("kind", ["sigma1", "sigma2", "rho1", "rho2", "lemma212"])
def test_xu_fixtures_pass(kind):
    for seed in range(3):
        fx = make_xu_fixture(kind, seed=seed)
        assert check_xu_lemma(kind, fx)["verdict"] == "pass"


def test_xu_fixture_kind_mismatch():
    fx = make_xu_fixture("rho1", seed=0)
    assert check_xu_lemma("sigma1", fx)["verdict"] == "invalid-fixture"
    with pytest.raises(ValueError):
        check_xu_lemma("nope", fx)
    assert set(XU_KINDS) >= {"sigma1", "sigma2", "rho1", "rho2", "lemma212"}
