import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from resmeta import operators as ops
from resmeta.iterations import (
    MAX_INDEX,
    Scenario,
    Trajectory,
    export_rows,
    identity_residuals,
    residuals,
    smallest_N,
    to_csv,
    translate_halpern_to_mar,
    translate_mar_to_halpern,
)
from resmeta.schedules import builtin, halving_errors
from resmeta.suites import zoo_scenarios


def test_first_steps_by_hand(line_scenario):
    t = Trajectory(line_scenario)
    assert t[1] == pytest.approx([0.5])
    assert t[2] == pytest.approx([3 / 8])


def test_halpern_first_step(line_scenario):
    z = translate_mar_to_halpern(Trajectory(line_scenario).extend(4))
    assert z[1] == pytest.approx([0.75])


def test_mar_equals_exact_without_errors(line_scenario):
    x = Trajectory(line_scenario, "MAR").points(1000)
    y = Trajectory(line_scenario, "MAR*").points(1000)
    assert np.array_equal(x, y)


def test_extension_is_deterministic(line_scenario):
    a = Trajectory(line_scenario)
    a.extend(300)
    a.extend(1000)
    b = Trajectory(line_scenario).points(1000)
    assert np.array_equal(a.points(1000), b)


def test_overflow_rejected(line_scenario):
    with pytest.raises(OverflowError):
        Trajectory(line_scenario).extend(MAX_INDEX + 1)


def test_boundedness_on_zoo():
    for sc in zoo_scenarios():
        Y = Trajectory(sc).points(2000)
        assert np.max(np.linalg.norm(Y - sc.q, axis=1)) <= sc.N + 1e-9


def test_smallest_N():
    assert smallest_N(np.array([1.0]), np.array([1.0]), np.array([0.0])) == 2
    assert smallest_N(np.array([0.0]), np.array([0.0]), np.array([0.0])) == 1
    # sqrt(8) rounds up to 3
    assert smallest_N(np.array([0.0, 0.0]), np.array([2.0, 2.0]), np.array([0.0, 0.0])) == 3


def test_scenario_rejects_non_zero_q():
    with pytest.raises(ValueError):
        Scenario(ops.LinearPSD(np.eye(1)), ops.LinearPSD(np.eye(1)), [1.0], [1.0], builtin("harmonic", 1), q=[1.0])


def test_zero_scenario_stays_at_zero(zero_scenario):
    y = Trajectory(zero_scenario)
    assert np.all(y.points(50) == 0)
    z = translate_mar_to_halpern(y.extend(50))
    assert np.all(z.points(50) == 0)


def test_halpern_back_translation_start(line_scenario):
    z = translate_mar_to_halpern(Trajectory(line_scenario).extend(20))
    y2 = translate_halpern_to_mar(z)
    b = z.scenario.bundle
    assert y2[0] == pytest.approx(z.scenario.opA.resolve(b.eval("beta", 0), z[0]))


@pytest.mark.parametrize("sc", zoo_scenarios(), ids=lambda s: s.name)
def test_translation_identities(sc):
    y = Trajectory(sc).extend(1002)
    z = translate_mar_to_halpern(y)
    assert identity_residuals(y, z, 1000) <= 1e-12
    # independent generation of the Halpern orbit from z0
    fresh = Trajectory(z.scenario, "HPPA2*").points(1000)
    assert np.max(np.abs(fresh - z.points(1000))) <= 1e-12
    y2 = translate_halpern_to_mar(z)
    assert identity_residuals(z, y2, 1000) <= 1e-12


def test_round_trip_reproduces_shifted_orbit(line_scenario):
    y = Trajectory(line_scenario).extend(1002)
    y2 = translate_halpern_to_mar(translate_mar_to_halpern(y))
    direct = Trajectory(y2.scenario, "MAR*", start=y2[0]).points(1000)
    assert np.max(np.abs(direct - y2.points(1000))) <= 1e-12


def test_residuals(line_scenario):
    t = Trajectory(line_scenario)
    assert residuals(t, 1, 0) == pytest.approx((0.5, 0.5))
    r = [residuals(t, 1, n)[0] for n in (10, 100, 1000)]
    assert r[0] > r[1] > r[2]
    sc = line_scenario.with_(x0=[0.0], u=[0.0])
    assert residuals(Trajectory(sc), 1, 5) == (0.0, 0.0)


def test_errors_change_the_orbit(line_scenario):
    sc = line_scenario.with_(errors=halving_errors([1.0]))
    x = Trajectory(sc, "MAR").points(200)
    y = Trajectory(sc, "MAR*").points(200)
    gap = np.abs(x - y).ravel()
    assert gap[1] > 0 and gap[-1] < 1e-2


def test_csv_export(tmp_path, line_scenario):
    t = Trajectory(line_scenario)
    path = to_csv(t, tmp_path / "t.csv", 10, extra={"gap": np.zeros(11)})
    raw = path.read_bytes()
    assert b"\r" not in raw
    lines = raw.decode().splitlines()
    assert lines[0] == "n,coord_0,resA,resB,dist_to_projection_ref,gap"
    assert len(lines) == 12
    assert lines[2].split(",")[1] == "0.5"
    names, rows = export_rows(t, 10)
    assert names[-1] == "dist_to_projection_ref"


@given(st.floats(-3, 3), st.floats(-3, 3), st.integers(1, 200))
def test_box_orbit_bounded_and_in_box_after_even_steps(u, x0, n):
    sc = Scenario(ops.NormalConeBox([-1.0], [1.0]), ops.NormalConeBox([0.0], [2.0]), [u], [x0], builtin("harmonic", 1))
    Y = Trajectory(sc).points(2 * n)
    assert np.max(np.abs(Y - sc.q)) <= sc.N + 1e-9
    assert 0.0 <= Y[2 * n][0] <= 2.0
