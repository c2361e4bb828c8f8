import pathlib

import numpy as np
import pytest

from resmeta.config import ConfigError, load, loads, parse_f_family

SCEN = pathlib.Path(__file__).resolve().parent.parent / "scenarios"

BASE = """[scenario]
dim = 1
u = [1.0]
x0 = [1.0]

[operators.A]
kind = "linear"
matrix = [[1.0]]

[operators.B]
kind = "box"
lo = [0.0]
hi = [2.0]

[schedule]
alpha = "harmonic(1)"
"""


@pytest.mark.parametrize("path", sorted(SCEN.glob("*.toml")), ids=lambda p: p.name)
def test_shipped_scenarios_parse(path):
    cfg = load(path)
    sc = cfg.scenario()
    assert sc.dim == cfg.dim
    assert cfg.f_families()


def test_minimal_config_defaults():
    cfg = loads(BASE)
    assert cfg.tag == "MAR*" and cfg.steps == 10_000 and cfg.cap == 100_000
    assert cfg.k_grid == [0, 1, 2, 3, 4]
    assert np.allclose(cfg.scenario().u, [1.0])
    assert cfg.errors().is_zero


def test_table_schedule():
    text = BASE.replace('alpha = "harmonic(1)"', 'alpha = { table = [0.9, 0.8], tail = "harmonic(1)" }')
    b = loads(text).bundle()
    assert b.eval("alpha", 1) == 0.8


def _error(text):
    with pytest.raises(ConfigError) as exc:
        loads(text)
    return exc.value


def test_hex_literal_rejected_with_line():
    e = _error(BASE.replace("dim = 1", "dim = 0x1"))
    assert e.line == 2 and "decimal" in str(e)


def test_unknown_key_reports_line_and_field():
    e = _error(BASE.replace("x0 = [1.0]", "x0 = [1.0]\nbogus = 3"))
    assert e.field == "scenario.bogus" and e.line == 5


def test_dimension_mismatch():
    e = _error(BASE.replace("u = [1.0]", "u = [1.0, 2.0]"))
    assert e.field == "scenario.u" and e.line == 3


def test_unknown_family():
    e = _error(BASE.replace("harmonic(1)", "harmonix(1)"))
    assert e.field == "schedule.alpha" and e.line == 16


def test_other_errors():
    assert _error(BASE.replace('kind = "box"', 'kind = "blob"')).field == "operators.B.kind"
    assert _error(BASE + "[grid]\nf = [\"cubic\"]\n").field == "grid.f"
    assert _error(BASE + "[run]\nsteps = -1\n").field == "run.steps"
    assert _error(BASE.replace("[schedule]", "[sched]")).field == "sched"
    assert _error(BASE.replace('alpha = "harmonic(1)"', "")).field == "schedule.alpha"
    assert _error(BASE + "[errors]\nkind = \"halving\"\n").field == "errors.direction"
    assert _error("[scenario\n").line == 1


def test_missing_file():
    with pytest.raises(ConfigError):
        load("/nonexistent/x.toml")


def test_f_families():
    assert parse_f_family("identity")(4) == 4
    assert parse_f_family("doubling")(4) == 8
    assert parse_f_family("affine(1, 10)")(4) == 14
    with pytest.raises(ValueError):
        parse_f_family("n^2")
