"""Scenario configuration files.

The format is TOML.  Numbers are decimal literals; every table and key is
listed below.  Unknown keys are rejected so typos do not pass silently.

::

    [scenario]
    name = "r1-linear"          # optional
    dim = 1
    u = [1.0]
    x0 = [1.0]
    q = [0.0]                   # optional known common zero
    tag = "MAR*"                # MAR, MAR*, HPPA2*, HPPA2

    [operators.A]               # and [operators.B]
    kind = "linear"             # zero | linear | quadratic | box | ball | halfspace
    matrix = [[1.0]]            # linear, quadratic
    center = [0.0]              # quadratic, ball
    lo = [0.0]                  # box
    hi = [1.0]                  # box
    radius = 1.0                # ball
    normal = [1.0]              # halfspace
    offset = 0.0                # halfspace
    shift = [0.0]               # optional translation of any kind

    [schedule]
    alpha = "harmonic(1)"       # harmonic(p) | constant(c) | power(q) | decaying(c,d)
    lambda = "harmonic(1)"      # optional, defaults to alpha
    beta = "constant(1)"
    mu = "constant(1)"          # optional, defaults to beta

    [errors]
    kind = "zero"               # zero | halving
    direction = [1.0]           # halving
    direction_prime = [1.0]     # optional
    scale = 1

    [grid]
    k = [0, 1, 2, 3, 4]
    f = ["identity", "affine(1,10)", "doubling"]

    [run]
    steps = 10000
    cap = 100000
    seed = 0
    out = "out"

A table entry may instead be given for a sequence as
``alpha = { table = [0.5, 0.25], tail = "harmonic(1)" }``.
"""

import dataclasses
import re

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

import numpy as np

from . import operators as ops
from .iterations import TAGS, Scenario
from .rates.counterfunctions import affine, doubling, identity
from .schedules import halving_errors, make_bundle, parse_family, zero_errors

__all__ = ["ConfigError", "ScenarioConfig", "load", "loads", "parse_f_family", "build_operator"]


class ConfigError(ValueError):
    """Invalid configuration; ``where`` names the field and, when known, the line."""

    def __init__(self, message, field=None, line=None):
        self.field = field
        self.line = line
        where = []
        if line is not None:
            where.append("line %d" % line)
        if field is not None:
            where.append("field %s" % field)
        super().__init__(("%s: %s" % (", ".join(where), message)) if where else message)


_ALLOWED = {
    "scenario": {"name", "dim", "u", "x0", "q", "tag"},
    "operators": {"A", "B"},
    "op": {"kind", "matrix", "center", "lo", "hi", "radius", "normal", "offset", "shift"},
    "schedule": {"alpha", "lambda", "beta", "mu"},
    "errors": {"kind", "direction", "direction_prime", "scale"},
    "grid": {"k", "f"},
    "run": {"steps", "cap", "seed", "out"},
}


@dataclasses.dataclass
class ScenarioConfig:
    name: str
    dim: int
    u: np.ndarray
    x0: np.ndarray
    q: np.ndarray
    tag: str
    op_specs: dict
    schedule: dict
    errors_spec: dict
    k_grid: list
    f_grid: list
    steps: int = 10_000
    cap: int = 100_000
    seed: int = 0
    out: str = "out"
    source: str = None

    def operators(self):
        return build_operator(self.op_specs["A"], self.dim, "operators.A"), build_operator(
            self.op_specs["B"], self.dim, "operators.B"
        )

    def bundle(self):
        s = self.schedule
        return make_bundle(s["alpha"], s.get("lambda"), s.get("beta", "constant(1)"), s.get("mu"))

    def errors(self):
        spec = self.errors_spec
        kind = spec.get("kind", "zero")
        if kind == "zero":
            return zero_errors(self.dim)
        return halving_errors(spec["direction"], spec.get("direction_prime"), spec.get("scale", 1))

    def scenario(self):
        A, B = self.operators()
        return Scenario(A, B, self.u, self.x0, self.bundle(), errors=self.errors(), q=self.q, name=self.name)

    def f_families(self):
        return [(text, parse_f_family(text)) for text in self.f_grid]


def parse_f_family(text):
    """``identity``, ``doubling`` or ``affine(a,b)`` (``n -> a n + b``)."""
    t = str(text).replace(" ", "")
    if t in ("identity", "id"):
        return identity()
    if t == "doubling":
        return doubling()
    m = re.fullmatch(r"affine\((\d+),(\d+)\)", t)
    if m:
        return affine(int(m.group(1)), int(m.group(2)))
    raise ValueError("unknown f family %r" % (text,))


def _line_of(text, table, key):
    """Best-effort line number of ``key`` inside ``[table]``."""
    if text is None:
        return None
    current = None
    for i, line in enumerate(text.splitlines(), 1):
        s = line.strip()
        if s.startswith("["):
            current = s.strip("[]").strip()
            if key is None and current == table:
                return i
            continue
        if current == table and re.match(r"%s\s*=" % re.escape(key or "\0"), s):
            return i
    return None


def _vector(value, dim, field, text, table, key):
    try:
        return ops.as_point(value, dim)
    except (ValueError, TypeError) as exc:
        raise ConfigError(str(exc), field, _line_of(text, table, key)) from None


def build_operator(spec, dim, field="operator"):
    kind = spec.get("kind")
    try:
        if kind == "zero":
            op = ops.Zero(dim)
        elif kind == "linear":
            op = ops.LinearPSD(np.asarray(spec["matrix"], dtype=float))
        elif kind == "quadratic":
            op = ops.Quadratic(np.asarray(spec["matrix"], dtype=float), spec.get("center", [0.0] * dim))
        elif kind == "box":
            op = ops.NormalConeBox(spec["lo"], spec["hi"])
        elif kind == "ball":
            op = ops.NormalConeBall(spec["center"], float(spec["radius"]))
        elif kind == "halfspace":
            op = ops.NormalConeHalfspace(spec["normal"], float(spec["offset"]))
        else:
            raise ConfigError("unknown operator kind %r" % (kind,), field + ".kind")
        if "shift" in spec:
            op = ops.Translated(op, spec["shift"])
    except KeyError as exc:
        raise ConfigError("missing parameter %s" % exc.args[0], field) from None
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(str(exc), field) from None
    if op.dim != dim:
        raise ConfigError("operator has dimension %d, scenario %d" % (op.dim, dim), field)
    return op


_NON_DECIMAL = re.compile(r"^[^#\"'\n]*=[^#\"'\n]*(?<![\w.])[+-]?0[xXoObB][0-9a-fA-F_]+", re.M)


def loads(text, source=None):
    m = _NON_DECIMAL.search(text)
    if m:
        line = text.count("\n", 0, m.start()) + 1
        raise ConfigError("only decimal literals are accepted", line=line)
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        m = re.search(r"line (\d+)", str(exc))
        raise ConfigError(str(exc), line=int(m.group(1)) if m else None) from None
    return _from_dict(data, text, source)


def load(path):
    try:
        with open(path, "rb") as fh:
            raw = fh.read()
    except OSError as exc:
        raise ConfigError("cannot read %s: %s" % (path, exc.strerror)) from None
    return loads(raw.decode("utf-8"), source=str(path))


def _check_keys(table, allowed, name, text):
    for key in table:
        if key not in allowed:
            raise ConfigError("unknown key", "%s.%s" % (name, key), _line_of(text, name, key))


def _from_dict(data, text=None, source=None):
    for section in data:
        if section not in ("scenario", "operators", "schedule", "errors", "grid", "run"):
            raise ConfigError("unknown table", section, _line_of(text, section, None))
    for section, table in data.items():
        if section != "operators":
            _check_keys(table, _ALLOWED[section], section, text)
    for section in ("scenario", "operators", "schedule"):
        if section not in data:
            raise ConfigError("missing table", section)
    sc = data["scenario"]
    for key in ("dim", "u", "x0"):
        if key not in sc:
            raise ConfigError("missing key", "scenario." + key)
    dim = sc["dim"]
    if not isinstance(dim, int) or dim < 1:
        raise ConfigError("dimension must be a positive integer", "scenario.dim", _line_of(text, "scenario", "dim"))
    u = _vector(sc["u"], dim, "scenario.u", text, "scenario", "u")
    x0 = _vector(sc["x0"], dim, "scenario.x0", text, "scenario", "x0")
    q = _vector(sc["q"], dim, "scenario.q", text, "scenario", "q") if "q" in sc else None
    tag = sc.get("tag", "MAR*")
    if tag not in TAGS:
        raise ConfigError("unknown iteration tag %r" % (tag,), "scenario.tag", _line_of(text, "scenario", "tag"))
    opt = data["operators"]
    _check_keys(opt, _ALLOWED["operators"], "operators", text)
    for name in ("A", "B"):
        if name not in opt:
            raise ConfigError("missing operator", "operators." + name)
        _check_keys(opt[name], _ALLOWED["op"], "operators." + name, text)
    sched = data["schedule"]
    _check_keys(sched, _ALLOWED["schedule"], "schedule", text)
    if "alpha" not in sched:
        raise ConfigError("missing key", "schedule.alpha")
    for key, value in sched.items():
        try:
            parse_family(value)
        except (ValueError, TypeError, KeyError) as exc:
            raise ConfigError(str(exc), "schedule." + key, _line_of(text, "schedule", key)) from None
    errs = data.get("errors", {"kind": "zero"})
    _check_keys(errs, _ALLOWED["errors"], "errors", text)
    if errs.get("kind", "zero") not in ("zero", "halving"):
        raise ConfigError("unknown error kind", "errors.kind", _line_of(text, "errors", "kind"))
    if errs.get("kind") == "halving":
        if "direction" not in errs:
            raise ConfigError("missing key", "errors.direction")
        _vector(errs["direction"], dim, "errors.direction", text, "errors", "direction")
    grid = data.get("grid", {})
    _check_keys(grid, _ALLOWED["grid"], "grid", text)
    k_grid = grid.get("k", [0, 1, 2, 3, 4])
    if not all(isinstance(k, int) and k >= 0 for k in k_grid):
        raise ConfigError("k values must be natural numbers", "grid.k", _line_of(text, "grid", "k"))
    f_grid = grid.get("f", ["identity", "affine(1,10)", "doubling"])
    for item in f_grid:
        try:
            parse_f_family(item)
        except ValueError as exc:
            raise ConfigError(str(exc), "grid.f", _line_of(text, "grid", "f")) from None
    run = data.get("run", {})
    _check_keys(run, _ALLOWED["run"], "run", text)
    for key in ("steps", "cap", "seed"):
        if key in run and (not isinstance(run[key], int) or run[key] < 0):
            raise ConfigError("must be a natural number", "run." + key, _line_of(text, "run", key))
    cfg = ScenarioConfig(
        name=sc.get("name", "scenario"),
        dim=dim,
        u=u,
        x0=x0,
        q=q,
        tag=tag,
        op_specs={"A": dict(opt["A"]), "B": dict(opt["B"])},
        schedule=dict(sched),
        errors_spec=dict(errs),
        k_grid=list(k_grid),
        f_grid=list(f_grid),
        steps=run.get("steps", 10_000),
        cap=run.get("cap", 100_000),
        seed=run.get("seed", 0),
        out=run.get("out", "out"),
        source=source,
    )
    # build once so operator and schedule errors surface at load time
    cfg.operators()
    try:
        cfg.bundle()
        cfg.errors()
    except (ValueError, TypeError) as exc:
        raise ConfigError(str(exc), "schedule") from None
    return cfg
