"""Alternating-resolvent and Halpern-type orbits, their translations, and
residual diagnostics.

Iteration tags:

``MAR*``    y[2n+1] = J^A_{beta_n}(alpha_n u + (1-alpha_n) y[2n])
            y[2n+2] = J^B_{mu_n}(lambda_n u + (1-lambda_n) y[2n+1])
``MAR``     as ``MAR*`` with ``e_n`` / ``e'_n`` added inside the resolvents
``HPPA2*``  z[2n+1] = alpha_n u + (1-alpha_n) J^A_{beta_n}(z[2n])
            z[2n+2] = lambda_n u + (1-lambda_n) J^B_{mu_n}(z[2n+1])
``HPPA2``   as ``HPPA2*`` with ``e_n`` / ``e'_n`` added outside
"""

import csv
import dataclasses
import json
import math
from fractions import Fraction

import numpy as np

from .operators import TOL, UnsupportedShape, as_point, common_zero_projection
from .schedules import ScheduleBundle, shifted_bundle, zero_errors

__all__ = [
    "TAGS",
    "Scenario",
    "smallest_N",
    "Trajectory",
    "extend",
    "translate_mar_to_halpern",
    "translate_halpern_to_mar",
    "identity_residuals",
    "residuals",
    "residual_series",
    "export_rows",
    "to_csv",
    "to_json",
]

TAGS = ("MAR", "MAR*", "HPPA2*", "HPPA2")
MAX_INDEX = 2**63 - 1


def _sqdist(a, b):
    return sum(((Fraction(float(s)) - Fraction(float(t))) ** 2 for s, t in zip(a, b)), Fraction(0))


def smallest_N(u, x0, q):
    """Least integer ``N >= 1`` with ``N >= 2|u-q|``, ``N >= |x0-q|`` and
    ``N >= |q|``, decided exactly on the binary values."""
    u, x0, q = as_point(u), as_point(x0), as_point(q)
    need = max(4 * _sqdist(u, q), _sqdist(x0, q), _sqdist(q, np.zeros_like(q)))
    N = max(1, math.isqrt(need.numerator // need.denominator))
    while Fraction(N * N) < need:
        N += 1
    while N > 1 and Fraction((N - 1) ** 2) >= need:
        N -= 1
    return N


@dataclasses.dataclass
class Scenario:
    """Operators, anchor ``u``, start ``x0``, parameter bundle and errors.

    ``q`` defaults to the projection of ``u`` onto the common zeros when
    that projection has a closed form.  ``N`` is derived, never supplied.
    """

    opA: object
    opB: object
    u: np.ndarray
    x0: np.ndarray
    bundle: ScheduleBundle
    errors: object = None
    q: np.ndarray = None
    name: str = "scenario"
    projection_ref: np.ndarray = dataclasses.field(default=None)
    N: int = dataclasses.field(default=None, init=False)

    def __post_init__(self):
        if self.opA.dim != self.opB.dim:
            raise ValueError("operators act on different dimensions")
        d = self.opA.dim
        self.u = as_point(self.u, d)
        self.x0 = as_point(self.x0, d)
        if self.errors is None:
            self.errors = zero_errors(d)
        if self.errors.dim != d:
            raise ValueError("error schedule dimension mismatch")
        if self.projection_ref is None:
            try:
                self.projection_ref = common_zero_projection(self.opA, self.opB, self.u)
            except UnsupportedShape:
                self.projection_ref = None
        else:
            self.projection_ref = as_point(self.projection_ref, d)
        if self.q is None:
            if self.projection_ref is None:
                raise ValueError("no common zero given and none computable")
            self.q = self.projection_ref.copy()
        self.q = as_point(self.q, d)
        for op, label in ((self.opA, "A"), (self.opB, "B")):
            for gamma in (0.1, 1.0, 10.0):
                if np.linalg.norm(op.resolve(gamma, self.q) - self.q) > 1e-8:
                    raise ValueError("q is not a zero of operator %s" % label)
        self.N = smallest_N(self.u, self.x0, self.q)

    @property
    def dim(self):
        return self.opA.dim

    def with_(self, **changes):
        fields = {f.name: getattr(self, f.name) for f in dataclasses.fields(self) if f.init}
        fields.update(changes)
        if "opA" in changes or "opB" in changes or "u" in changes:
            fields.setdefault("projection_ref", None)
            if "projection_ref" not in changes:
                fields["projection_ref"] = None
            if "q" not in changes:
                fields["q"] = self.q
        return Scenario(**fields)


class Trajectory:
    """Lazily extended, cached orbit of one of the four iterations."""

    def __init__(self, scenario, tag="MAR*", start=None):
        if tag not in TAGS:
            raise ValueError("unknown iteration tag %r" % (tag,))
        self.scenario = scenario
        self.tag = tag
        d = scenario.dim
        self._pts = np.empty((64, d))
        self._pts[0] = as_point(scenario.x0 if start is None else start, d)
        self._len = 1

    def __len__(self):
        return self._len

    @property
    def last_index(self):
        return self._len - 1

    def extend(self, upto):
        upto = int(upto)
        if upto > MAX_INDEX:
            raise OverflowError("index beyond the platform counter")
        if upto < self._len:
            return self
        if upto >= self._pts.shape[0]:
            cap = self._pts.shape[0]
            while cap <= upto:
                cap *= 2
            grown = np.empty((cap, self._pts.shape[1]))
            grown[: self._len] = self._pts[: self._len]
            self._pts = grown
        sc = self.scenario
        b = sc.bundle
        opA, opB, u = sc.opA, sc.opB, sc.u
        with_errors = self.tag in ("MAR", "HPPA2") and not sc.errors.is_zero
        halpern = self.tag in ("HPPA2*", "HPPA2")
        pts = self._pts
        i = self._len
        n0 = (i - 1) // 2
        n1 = (upto - 1) // 2 + 1
        al = b.terms("alpha", n0, n1)
        la = b.terms("lambda", n0, n1)
        be = b.terms("beta", n0, n1)
        mu = b.terms("mu", n0, n1)
        while i <= upto:
            n = (i - 1) // 2
            j = n - n0
            prev = pts[i - 1]
            if i % 2 == 1:
                w, op, gamma = al[j], opA, be[j]
                err = sc.errors.e(n) if with_errors else None
            else:
                w, op, gamma = la[j], opB, mu[j]
                err = sc.errors.eprime(n) if with_errors else None
            if halpern:
                nxt = w * u + (1.0 - w) * op._resolve(gamma, prev)
                if err is not None:
                    nxt = nxt + err
            else:
                arg = w * u + (1.0 - w) * prev
                if err is not None:
                    arg = arg + err
                nxt = op._resolve(gamma, arg)
            pts[i] = nxt
            i += 1
        self._len = i
        return self

    def snapshot(self):
        """Independent copy of the cache, for use by another thread."""
        other = Trajectory.__new__(Trajectory)
        other.scenario = self.scenario
        other.tag = self.tag
        other._pts = self._pts[: max(self._len, 64)].copy()
        other._len = self._len
        return other

    def points(self, upto=None):
        """Read-only view of the cached points ``0..upto``."""
        if upto is None:
            upto = self._len - 1
        self.extend(upto)
        view = self._pts[: upto + 1]
        view = view.view()
        view.flags.writeable = False
        return view

    def __getitem__(self, n):
        self.extend(n)
        return self._pts[n].copy()


def extend(traj, upto):
    return traj.extend(upto)


def translate_mar_to_halpern(traj):
    """Halpern-type orbit attached to an exact alternating-resolvent orbit.

    Parameters: ``alpha~ = lambda``, ``lambda~ = alpha`` shifted by one,
    same step sizes; start ``z0 = alpha_0 u + (1-alpha_0) y0``.
    """
    if traj.tag != "MAR*":
        raise ValueError("expected an exact alternating-resolvent orbit")
    sc = traj.scenario
    a0 = sc.bundle.eval("alpha", 0)
    z0 = a0 * sc.u + (1.0 - a0) * traj[0]
    bundle = shifted_bundle(sc.bundle, alpha="lambda", lam="alpha+1", beta="beta", mu="mu")
    new = sc.with_(bundle=bundle, x0=z0, name=sc.name + ":halpern")
    out = Trajectory(new, "HPPA2*")
    out.extend(max(traj.last_index, 0))
    return out


def translate_halpern_to_mar(traj):
    """Alternating-resolvent orbit attached to an exact Halpern-type orbit.

    Operators swap roles (``A = B~``, ``B = A~``); parameters ``alpha =
    alpha~``, ``lambda = lambda~``, ``beta = mu~``, ``mu = beta~`` shifted by
    one; start ``y0 = J^{A~}_{beta~_0}(z0)``.
    """
    if traj.tag != "HPPA2*":
        raise ValueError("expected an exact Halpern-type orbit")
    sc = traj.scenario
    y0 = sc.opA.resolve(sc.bundle.eval("beta", 0), traj[0])
    bundle = shifted_bundle(sc.bundle, alpha="alpha", lam="lambda", beta="mu", mu="beta+1")
    new = sc.with_(opA=sc.opB, opB=sc.opA, bundle=bundle, x0=y0, name=sc.name + ":mar")
    out = Trajectory(new, "MAR*")
    out.extend(max(traj.last_index, 0))
    return out


def identity_residuals(source, image, upto=None):
    """Largest pointwise defect of the translation identities.

    ``source`` MAR* and ``image`` HPPA2*:
    ``z[2n+1] = lambda_n u + (1-lambda_n) y[2n+1]``,
    ``z[2n+2] = alpha_{n+1} u + (1-alpha_{n+1}) y[2n+2]`` and the start.
    ``source`` HPPA2* and ``image`` MAR*:
    ``z[2n+1] = alpha_n u + (1-alpha_n) y[2n]``,
    ``z[2n+2] = lambda_n u + (1-lambda_n) y[2n+1]``.
    """
    if upto is None:
        upto = min(source.last_index, image.last_index)
    m = (upto - 1) // 2
    if source.tag == "MAR*" and image.tag == "HPPA2*":
        y, z = source.points(2 * m + 2), image.points(2 * m + 2)
        b, u = source.scenario.bundle, source.scenario.u
        lam = b.terms("lambda", 0, m + 1)[:, None]
        alp = b.terms("alpha", 0, m + 2)[:, None]
        odd = z[1::2][: m + 1] - (lam * u + (1 - lam) * y[1::2][: m + 1])
        even = z[0::2][: m + 2] - (alp * u + (1 - alp) * y[0::2][: m + 2])
        parts = [odd, even]
    elif source.tag == "HPPA2*" and image.tag == "MAR*":
        z, y = source.points(2 * m + 2), image.points(2 * m + 2)
        b, u = image.scenario.bundle, image.scenario.u
        alp = b.terms("alpha", 0, m + 1)[:, None]
        lam = b.terms("lambda", 0, m + 1)[:, None]
        odd = z[1::2][: m + 1] - (alp * u + (1 - alp) * y[0::2][: m + 1])
        even = z[2::2][: m + 1] - (lam * u + (1 - lam) * y[1::2][: m + 1])
        parts = [odd, even]
    else:
        raise ValueError("identities relate MAR* and HPPA2* orbits")
    return max(float(np.max(np.linalg.norm(p, axis=1))) if len(p) else 0.0 for p in parts)


def residuals(traj, R, n):
    """``(|J^A_{1/R}(y_n) - y_n|, |J^B_{1/R}(y_n) - y_n|)``."""
    y = traj[int(n)]
    g = 1.0 / int(R)
    sc = traj.scenario
    return (float(np.linalg.norm(sc.opA.resolve(g, y) - y)), float(np.linalg.norm(sc.opB.resolve(g, y) - y)))


def residual_series(traj, R, upto):
    """Both residual sequences on ``0..upto`` as arrays."""
    Y = traj.points(upto)
    g = 1.0 / int(R)
    sc = traj.scenario
    ra = np.linalg.norm(sc.opA.resolve_many(g, Y) - Y, axis=1)
    rb = np.linalg.norm(sc.opB.resolve_many(g, Y) - Y, axis=1)
    return ra, rb


def export_rows(traj, upto, R=None, extra=None):
    """Column names and rows; ``extra`` maps further column names to arrays
    indexed like the trajectory."""
    sc = traj.scenario
    R = sc.bundle.R if R is None else R
    Y = np.array(traj.points(upto))
    ra, rb = residual_series(traj, R, upto)
    if sc.projection_ref is not None:
        dist = np.linalg.norm(Y - sc.projection_ref, axis=1)
    else:
        dist = np.full(len(Y), np.nan)
    names = ["n"] + ["coord_%d" % i for i in range(sc.dim)] + ["resA", "resB", "dist_to_projection_ref"]
    extra = dict(extra or {})
    cols = [np.asarray(v, dtype=float) for v in extra.values()]
    names += list(extra)
    rows = []
    for n in range(len(Y)):
        row = [n] + [float(c) for c in Y[n]] + [float(ra[n]), float(rb[n]), float(dist[n])]
        rows.append(row + [float(c[n]) for c in cols])
    return names, rows


def to_csv(traj, path, upto, R=None, extra=None):
    names, rows = export_rows(traj, upto, R, extra)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(names)
        for row in rows:
            w.writerow([row[0]] + [repr(v) if not math.isnan(v) else "" for v in row[1:]])
    return path


def to_json(traj, path, upto, R=None, extra=None):
    names, rows = export_rows(traj, upto, R, extra)
    payload = {
        "scenario": traj.scenario.name,
        "tag": traj.tag,
        "N": traj.scenario.N,
        "columns": names,
        "rows": [dict(zip(names, [r[0]] + [None if math.isnan(v) else v for v in r[1:]])) for r in rows],
    }
    with open(path, "w") as fh:
        json.dump(payload, fh)
    return path


_ = TOL
