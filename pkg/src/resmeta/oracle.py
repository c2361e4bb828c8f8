"""Brute-force ground truth for the closed-form bounds.

Witness searches scan an orbit for the least ``n`` whose window
``[n, f(n)]`` satisfies a smallness condition; the remaining checkers test
the auxiliary lemmas on synthetic data.
"""

import dataclasses
import math

import numpy as np

from .iterations import Trajectory
from .nat import Nat, ceil_exp, ceil_log2, nat
from .operators import TOL, ResidualReport, as_point, common_zero_projection, graph_pair
from .rates.counterfunctions import BiCounterfunction, Counterfunction, as_counterfunction, majorize
from .rates.functionals import QuasiRateHook, RateFunctional
from .rates.improved import tau
from .rates.xu import rho1, rho2, sigma1, sigma2

__all__ = [
    "METRICS",
    "MAX_POINTS",
    "WitnessQuery",
    "WitnessResult",
    "find_meta_witness",
    "find_quasi_witness",
    "check_domination",
    "projection_reference",
    "XuFixture",
    "make_xu_fixture",
    "check_xu_lemma",
    "check_monotone_inner_bound",
    "manufacture_graph_pair",
    "make_mainge_fixture",
    "check_mainge",
    "residual_sequence",
    "step_sequence",
    "odd_gap_sequence",
    "empirical_functional",
    "empirical_hook",
]

METRICS = ("cauchy-pair", "residual-A", "residual-B", "residual-both", "gap-to-point")
MAX_CAP = 10**6
MAX_POINTS = 5_000_000
DEFAULT_CAP = 100_000


@dataclasses.dataclass
class WitnessQuery:
    """Search for the least ``n <= cap`` with ``metric <= scale/(k+1)`` on
    ``[n, f(n)]``.  ``subsequence="even"`` searches along ``y[2m]``."""

    trajectory: Trajectory
    k: int
    f: object
    cap: int = DEFAULT_CAP
    metric: str = "cauchy-pair"
    point: object = None
    R: int = None
    scale: float = 1.0
    subsequence: str = "all"

    def __post_init__(self):
        if self.metric not in METRICS:
            raise ValueError("unknown metric %r" % (self.metric,))
        if not 0 <= int(self.cap) <= MAX_CAP:
            raise ValueError("search cap must lie in [0, %d]" % MAX_CAP)
        if self.subsequence not in ("all", "even", "odd"):
            raise ValueError("subsequence must be 'all', 'even' or 'odd'")
        if self.metric == "gap-to-point" and self.point is None:
            raise ValueError("gap-to-point needs a point")
        self.f = majorize(as_counterfunction(self.f))

    @property
    def tag(self):
        return self.trajectory.tag


@dataclasses.dataclass(frozen=True)
class WitnessResult:
    found: bool
    n_star: int
    checked_upto: int


# -- range queries ------------------------------------------------------------


class _SparseTable:
    """Idempotent range max (or min) of a 1-d array in O(1) per query."""

    def __init__(self, values, op=np.maximum):
        levels = [np.asarray(values, dtype=float)]
        span = 1
        while 2 * span <= len(levels[0]):
            prev = levels[-1]
            levels.append(op(prev[:-span], prev[span:]))
            span *= 2
        self.levels = levels
        self.op = op

    def query(self, lo, hi):
        """Vectorized over index arrays with ``lo <= hi``."""
        lo, hi = np.asarray(lo), np.asarray(hi)
        length = hi - lo + 1
        j = np.floor(np.log2(length)).astype(int)
        out = np.empty(lo.shape)
        for level in np.unique(j):
            sel = j == level
            arr = self.levels[level]
            out[sel] = self.op(arr[lo[sel]], arr[hi[sel] - (1 << level) + 1])
        return out


def _window_ends(f, n0, n1, limit=MAX_POINTS):
    """``f(n)`` for ``n`` in ``[n0, n1]`` as ints; ``-1`` marks a saturated
    value or one at or beyond ``limit`` (the window cannot be materialized)."""
    out = np.full(n1 - n0 + 1, -1, dtype=np.int64)
    for i, n in enumerate(range(n0, n1 + 1)):
        v = f(n)
        if v.is_top or v.value >= limit:
            break
        out[i] = v.value
    return out


def _scan(ends_of, values_upto, passes, cap):
    """Least ``n <= cap`` with ``passes(lo, hi, values)`` on ``[n, f(n)]``.

    ``values_upto(m)`` materializes the data through index ``m``.  Windows
    with ``f(n) < n`` are empty and pass.  Scanning stops at the first window
    that cannot be materialized.
    """
    n0 = 0
    h = min(cap, 15)
    while n0 <= cap:
        ends = ends_of(n0, h)
        bad = np.nonzero(ends < 0)[0]
        stop = h if len(bad) == 0 else n0 + int(bad[0]) - 1
        if stop >= n0:
            ns = np.arange(n0, stop + 1)
            hi = ends[: stop - n0 + 1]
            need = int(max(hi.max(), stop))
            data = values_upto(need)
            ok = np.ones(len(ns), dtype=bool)
            live = hi >= ns
            if live.any():
                ok[live] = passes(ns[live], hi[live], data)
            hits = np.nonzero(ok)[0]
            if len(hits):
                return WitnessResult(True, int(ns[hits[0]]), int(ns[hits[0]]))
        if stop < h:
            return WitnessResult(False, -1, stop)
        n0 = h + 1
        h = min(cap, 2 * h + 1)
    return WitnessResult(False, -1, cap)


def _scalar_passes(eps):
    def passes(lo, hi, data):
        table = _SparseTable(data)
        return table.query(lo, hi) <= eps

    return passes


def _diameter_passes(eps):
    """Windowed diameter test; per-coordinate ranges decide most windows and
    the rest are settled by exact pairwise distances."""

    def passes(lo, hi, data):
        P = data
        d = P.shape[1]
        spans = np.empty((len(lo), d))
        for c in range(d):
            mx = _SparseTable(P[:, c], np.maximum).query(lo, hi)
            mn = _SparseTable(P[:, c], np.minimum).query(lo, hi)
            spans[:, c] = mx - mn
        lower = spans.max(axis=1)
        upper = np.linalg.norm(spans, axis=1)
        ok = upper <= eps
        unsure = np.nonzero((~ok) & (lower <= eps))[0]
        for i in unsure:
            W = P[lo[i] : hi[i] + 1]
            diam = 0.0
            for s in range(0, len(W), 512):
                block = W[s : s + 512]
                dist = np.sqrt(((block[:, None, :] - W[None, :, :]) ** 2).sum(axis=2))
                diam = max(diam, float(dist.max()))
                if diam > eps:
                    break
            ok[i] = diam <= eps
        return ok

    return passes


def residual_sequence(traj, R, which="both"):
    """Callable ``upto -> array`` of the residuals along ``traj``."""
    sc = traj.scenario
    g = 1.0 / int(R)

    def values(upto):
        Y = traj.points(upto)
        out = []
        if which in ("A", "both"):
            out.append(np.linalg.norm(sc.opA.resolve_many(g, Y) - Y, axis=1))
        if which in ("B", "both"):
            out.append(np.linalg.norm(sc.opB.resolve_many(g, Y) - Y, axis=1))
        return np.max(out, axis=0)

    values.batched = True
    return values


def step_sequence(traj):
    """``m -> |y[m+1] - y[m]|``."""

    def values(upto):
        Y = traj.points(upto + 1)
        return np.linalg.norm(Y[1:] - Y[:-1], axis=1)

    values.batched = True
    return values


def odd_gap_sequence(traj):
    """``m -> |y[2m+1] - y[2m-1]|`` with an infinite entry at ``m = 0``."""

    def values(upto):
        Y = traj.points(2 * upto + 1)
        out = np.empty(upto + 1)
        out[0] = np.inf
        out[1:] = np.linalg.norm(Y[3::2] - Y[1:-1:2], axis=1)
        return out

    values.batched = True
    return values


def _subsequence_points(traj, which):
    def values(upto):
        if which == "all":
            return traj.points(upto)
        if which == "even":
            return traj.points(2 * upto)[0::2]
        return traj.points(2 * upto + 1)[1::2]

    return values


def find_meta_witness(q):
    """Least ``n <= q.cap`` such that the metric is at most ``scale/(k+1)``
    across the window ``[n, f(n)]``."""
    eps = float(q.scale) / (int(q.k) + 1)
    traj = q.trajectory
    f = q.f

    def ends_of(n0, n1):
        return _window_ends(f, n0, n1)

    if q.metric == "cauchy-pair":
        return _scan(ends_of, _subsequence_points(traj, q.subsequence), _diameter_passes(eps), int(q.cap))
    pts = _subsequence_points(traj, q.subsequence)
    sc = traj.scenario
    R = sc.bundle.R if q.R is None else int(q.R)
    g = 1.0 / R
    x = as_point(q.point, sc.dim) if q.metric == "gap-to-point" else None

    def values(upto):
        Y = np.asarray(pts(upto))
        if x is not None:
            return np.linalg.norm(Y - x, axis=1)
        ra = np.linalg.norm(sc.opA.resolve_many(g, Y) - Y, axis=1)
        rb = np.linalg.norm(sc.opB.resolve_many(g, Y) - Y, axis=1)
        return {"residual-A": ra, "residual-B": rb, "residual-both": np.maximum(ra, rb)}[q.metric]

    return _scan(ends_of, values, _scalar_passes(eps), int(q.cap))


def find_quasi_witness(seq, k, f, cap=DEFAULT_CAP, scale=1.0, max_points=MAX_POINTS):
    """Least ``n <= cap`` with ``|a_m| <= scale/(k+1)`` for all ``m`` in
    ``[n, f(n)]``.

    ``seq`` is an array, a callable ``upto -> array`` (see
    :func:`residual_sequence`) or a per-index callable ``m -> float``.
    The scan stops at the first window reaching ``max_points``.
    """
    f = majorize(as_counterfunction(f))
    eps = float(scale) / (int(k) + 1)
    cap = int(cap)
    if cap > MAX_CAP or cap < 0:
        raise ValueError("search cap must lie in [0, %d]" % MAX_CAP)
    values = _as_values(seq)
    return _scan(lambda a, b: _window_ends(f, a, b, max_points), lambda m: np.abs(values(m)), _scalar_passes(eps), cap)


def _as_values(seq):
    if isinstance(seq, (list, tuple, np.ndarray)):
        arr = np.asarray(seq, dtype=float)

        def values(upto):
            if upto >= len(arr):
                raise OverflowError("sequence has %d terms, index %d requested" % (len(arr), upto))
            return arr[: upto + 1]

        return values
    if getattr(seq, "batched", False):
        return seq
    return lambda upto: np.array([float(seq(m)) for m in range(upto + 1)])


def check_domination(bound, witness):
    """``"pass"`` iff the witness lies at or below the bound; a saturated
    bound dominates every witness.  No witness gives ``"inconclusive"``."""
    if not witness.found:
        return "inconclusive"
    bound = nat(bound)
    if bound.is_top:
        return "pass"
    return "pass" if witness.n_star <= bound.value else "fail"


def projection_reference(scenario):
    return common_zero_projection(scenario.opA, scenario.opB, scenario.u)


# -- Xu-type recurrences -------------------------------------------------------


@dataclasses.dataclass
class XuFixture:
    """Synthetic data for the quantitative Xu lemmas.

    Sequences ``s, alpha, lam, b, c, d, v`` are arrays of equal length.
    ``params`` holds the moduli (``A`` or ``Aprime``, ``B``, ``C``, ``D``),
    the bound ``M``, and for the local lemmas ``k, n, p``.
    """

    kind: str
    s: np.ndarray
    alpha: np.ndarray
    lam: np.ndarray
    b: np.ndarray
    c: np.ndarray
    d: np.ndarray
    v: np.ndarray
    params: dict
    seed: int = None


XU_KINDS = ("lemma212", "sigma1", "sigma2", "rho1", "rho2")


def _harmonic_divergence():
    # sum_{i<=N} 1/(i+2) >= ln(N+3) - 1, which reaches k once N >= e^(k+1) - 3
    return Counterfunction(lambda x: ceil_exp(x + 1) - 3, name="A_harm", monotone=True, key=("xu_A_harm",))


def make_xu_fixture(kind, seed=0, length=400, step="half", spike=False, k=0, n=0, p=None):
    """Random data satisfying the hypotheses of the chosen lemma.

    ``step`` is ``"half"`` (``alpha = 1/2``, ``A(m) = 2m``,
    ``A'(m, k) = m + ceil(log2(k+1))``) or ``"harmonic"``
    (``alpha_m = 1/(m+2)``).  ``spike`` adds one large ``d`` term that still
    respects the Cauchy rate.
    """
    if kind not in XU_KINDS:
        raise ValueError("unknown lemma kind %r" % (kind,))
    rng = np.random.default_rng(seed)
    L = int(length)
    m = np.arange(L)
    if step == "half":
        alpha = np.full(L, 0.5)
        A = Counterfunction.from_int(lambda x: 2 * x, name="2m", monotone=True, key=("xu_A_half",), affine=(2, 0))
        Ap = BiCounterfunction.from_int(lambda mm, kk: mm + ceil_log2(kk + 1).value, name="Ap_half", monotone=True, key=("xu_Ap_half",))
    elif step == "harmonic":
        alpha = 1.0 / (m + 2.0)
        A = _harmonic_divergence()
        # prod_{i=m}^{j} (1 - 1/(i+2)) = (m+1)/(j+2) <= 1/(k+1) once j >= (m+1)(k+1) - 2
        Ap = BiCounterfunction.from_int(
            lambda mm, kk: max((mm + 1) * (kk + 1) - 2, mm), name="Ap_harm", monotone=True, key=("xu_Ap_harm",)
        )
    else:
        raise ValueError("step must be 'half' or 'harmonic'")
    lam = rng.uniform(0.0, 0.9, L)
    local = kind in ("sigma1", "sigma2")
    if local:
        k, n = int(k), int(n)
        p = L - 2 if p is None else int(p)
        inside = (m >= n) & (m <= p)
        vb = 1.0 / (4 * (k + 1) * (p + 1))
        bb = 1.0 / (4 * (k + 1))
        v = np.where(inside, rng.uniform(-vb, vb, L), rng.uniform(0, 1, L))
        b = np.where(inside, rng.uniform(-bb, bb, L), rng.uniform(-1, 1, L))
        c = np.where(inside, rng.uniform(-bb, bb, L), rng.uniform(-1, 1, L))
        d = np.zeros(L)
        s = np.empty(L)
        s[0] = rng.uniform(0, 1)
        for i in range(L - 1):
            rhs = (1 - alpha[i]) * (1 - lam[i]) * (s[i] + v[i]) + alpha[i] * b[i] + lam[i] * c[i]
            s[i + 1] = rhs - rng.uniform(0, 0.1) * abs(rhs)
        params = {"k": k, "n": n, "p": p}
    else:
        # b_n = 1/(n+1) has limsup rate B(k) = k; c = 0 has rate 0;
        # d_n = 2^-(n+1) has Cauchy rate D(k) = ceil(log2(k+1))
        b = 1.0 / (m + 1.0)
        c = np.zeros(L)
        v = np.zeros(L)
        d = 0.5 ** (m + 1.0)
        if spike:
            # pull the next few terms forward: no tail sum grows
            j = int(rng.integers(5, 20))
            d[j] = d[j : j + 6].sum()
            d[j + 1 : j + 6] = 0.0
        s = np.empty(L)
        s[0] = rng.uniform(0.5, 1.0)
        for i in range(L - 1):
            rhs = (1 - alpha[i]) * (1 - lam[i]) * s[i] + alpha[i] * b[i] + lam[i] * c[i] + d[i]
            s[i + 1] = rng.uniform(0.5, 1.0) * rhs
        params = {}
    M = max(1, math.ceil(float(np.max(np.abs(s)))))
    params.update(
        A=A,
        Aprime=Ap,
        B=Counterfunction.from_int(lambda x: x, name="B", monotone=True, key=("xu_B",), affine=(1, 0)),
        C=Counterfunction.from_int(lambda x: 0, name="C", monotone=True, key=("xu_C",), at_top=0),
        D=Counterfunction.from_int(lambda x: ceil_log2(x + 1).value, name="D", monotone=True, key=("xu_D",)),
        M=M,
        k_max=6,
    )
    return XuFixture(kind, s, alpha, lam, b, c, d, v, params, seed)


def _validate_xu(fx, slack=1e-12):
    """Reasons the fixture breaks the lemma's hypotheses (empty if none)."""
    s, al, la, b, c, d, v = fx.s, fx.alpha, fx.lam, fx.b, fx.c, fx.d, fx.v
    P = fx.params
    L = len(s)
    why = []
    if np.any((al < 0) | (al > 1)) or np.any((la < 0) | (la > 1)):
        why.append("step weights leave [0, 1]")
    if np.max(np.abs(s)) > P["M"]:
        why.append("M does not bound the sequence")
    local = fx.kind in ("sigma1", "sigma2")
    if local:
        rhs = (1 - al[:-1]) * (1 - la[:-1]) * (s[:-1] + v[:-1]) + al[:-1] * b[:-1] + la[:-1] * c[:-1]
        k, n, p = P["k"], P["n"], P["p"]
        w = slice(n, p + 1)
        if np.any(v[w] > 1.0 / (4 * (k + 1) * (p + 1)) + slack):
            why.append("v too large on [n, p]")
        if np.any(b[w] > 1.0 / (4 * (k + 1)) + slack) or np.any(c[w] > 1.0 / (4 * (k + 1)) + slack):
            why.append("b or c too large on [n, p]")
    else:
        rhs = (1 - al[:-1]) * (1 - la[:-1]) * s[:-1] + al[:-1] * b[:-1] + la[:-1] * c[:-1] + d[:-1]
        if np.any(s < 0) or np.any(d < 0):
            why.append("negative s or d")
        csum = np.concatenate([[0.0], np.cumsum(d)])
        for k in range(P["k_max"] + 1):
            Bk, Ck, Dk = int(P["B"](k)), int(P["C"](k)), int(P["D"](k))
            if np.any(b[Bk:] > 1.0 / (k + 1) + slack) or np.any(c[Ck:] > 1.0 / (k + 1) + slack):
                why.append("limsup rate violated at k=%d" % k)
            if Dk + 1 < L and csum[L] - csum[Dk + 1] > 1.0 / (k + 1) + slack:
                why.append("Cauchy rate violated at k=%d" % k)
    if np.any(s[1:] > rhs + slack):
        why.append("recurrence violated")
    if fx.kind in ("sigma1", "rho1", "lemma212"):
        csum = np.concatenate([[0.0], np.cumsum(al)])
        A = P["A"]
        for k in range(8):
            a = int(A(k))
            for n in range(0, 20):
                if a + n < L and csum[a + n + 1] < k - slack:
                    why.append("divergence rate violated at k=%d" % k)
                    break
    else:
        Ap = P["Aprime"]
        for mm in range(0, 20):
            for kk in range(0, 8):
                j = int(Ap(mm, kk))
                if j < L and np.prod(1 - al[mm : j + 1]) > 1.0 / (kk + 1) + slack:
                    why.append("product modulus violated at (%d, %d)" % (mm, kk))
    return why


def check_xu_lemma(kind, fixture, k_grid=None):
    """Verdict ``"pass"``, ``"fail"``, ``"invalid-fixture"`` or
    ``"inconclusive"`` (bound beyond the data) with details."""
    if kind not in XU_KINDS:
        raise ValueError("unknown lemma kind %r" % (kind,))
    fx = fixture
    if (kind in ("sigma1", "sigma2")) != (fx.kind in ("sigma1", "sigma2")):
        return {"verdict": "invalid-fixture", "why": ["fixture built for %s" % fx.kind]}
    fx = dataclasses.replace(fx, kind=kind)
    why = _validate_xu(fx)
    if why:
        return {"verdict": "invalid-fixture", "why": why}
    P = fx.params
    s = fx.s
    L = len(s)
    checked = []
    failures = []
    if kind in ("sigma1", "sigma2"):
        k, n, p = P["k"], P["n"], P["p"]
        if kind == "sigma1":
            idx = sigma1(P["A"], P["M"])(k, n)
        else:
            idx = sigma2(P["Aprime"], P["M"])(k, n)
        start = int(idx.value) if not idx.is_top else None
        if start is not None and start <= p:
            bad = np.nonzero(s[start : p + 1] > 1.0 / (k + 1))[0]
            checked.append((k, start))
            if len(bad):
                failures.append({"k": k, "index": start + int(bad[0])})
        out = {"bound": str(idx), "checked": checked}
    elif kind == "lemma212":
        ks = range(P["k_max"] + 1) if k_grid is None else k_grid
        tail = np.maximum.accumulate(s[::-1])[::-1]
        for k in ks:
            hit = np.nonzero(tail <= 1.0 / (k + 1))[0]
            checked.append(k)
            if not len(hit):
                failures.append({"k": k})
        out = {"checked": checked}
    else:
        D, B, C = P["D"], P["B"], P["C"]
        rate = rho1(P["A"], B, C, D, P["M"]) if kind == "rho1" else rho2(P["Aprime"], B, C, D, P["M"])
        ks = range(P["k_max"] + 1) if k_grid is None else k_grid
        for k in ks:
            r = rate(k)
            if r.is_top or r.value >= L:
                continue
            checked.append((k, r.value))
            bad = np.nonzero(s[r.value :] > 1.0 / (k + 1))[0]
            if len(bad):
                failures.append({"k": k, "index": r.value + int(bad[0])})
        out = {"checked": checked}
    if failures:
        verdict = "fail"
    elif not checked:
        verdict = "inconclusive"
    else:
        verdict = "pass"
    out.update(verdict=verdict, failures=failures)
    return out


# -- monotone operator bounds ---------------------------------------------------


def manufacture_graph_pair(op, x, lam=1.0):
    """``(a, b)`` with ``b`` in ``A(a)``: ``a = J_lam(x)``, ``b = (x - a)/lam``."""
    return graph_pair(op, x, lam)


def check_monotone_inner_bound(op, lam, a, b, x, tol=1e-9):
    """``<a - x, b>`` against ``-|J(x) - x| (|J(x) - a|/lam + |b|)``."""
    lam = float(lam)
    if not lam > 0:
        raise ValueError("lambda must be positive")
    a, b, x = as_point(a, op.dim), as_point(b, op.dim), as_point(x, op.dim)
    # b in A(a) iff a = J_1(a + b)
    if np.linalg.norm(op.resolve(1.0, a + b) - a) > tol * max(1.0, np.linalg.norm(a) + np.linalg.norm(b)):
        raise ValueError("(a, b) is not a graph pair of the operator")
    j = op.resolve(lam, x)
    lhs = float((a - x) @ b)
    rhs = -float(np.linalg.norm(j - x)) * (float(np.linalg.norm(j - a)) / lam + float(np.linalg.norm(b)))
    return ResidualReport(lhs=lhs, rhs=rhs, slack=lhs - rhs)


# -- last-ascent lemma ----------------------------------------------------------


def make_mainge_fixture(rng, length=40):
    """Random integer sequence with a forced ascent at a random ``m`` and a
    random ``r <= m``."""
    length = max(int(length), 3)
    s = rng.integers(0, 10, length).astype(float)
    m = int(rng.integers(0, length - 1))
    if s[m] >= s[m + 1]:
        s[m + 1] = s[m] + 1 + rng.integers(0, 3)
    r = int(rng.integers(0, m + 1))
    return s, m, r


def check_mainge(s, m, r):
    """``"pass"`` when for all ``i`` in ``[m, len(s)-2]``:
    ``tau_m(i) >= r`` and ``max{s[tau], s[i]} <= s[tau+1]``."""
    s = list(s)
    m, r = int(m), int(r)
    if not (m >= r and m + 1 < len(s) and s[m] < s[m + 1]):
        return {"verdict": "invalid-fixture"}
    for i in range(m, len(s) - 1):
        t = tau(s, m, i)
        if t < r or max(s[t], s[i]) > s[t + 1]:
            return {"verdict": "fail", "i": i, "tau": t}
    return {"verdict": "pass"}


# -- empirical quasi-rates --------------------------------------------------------


def empirical_functional(values, cap=20_000, tag="empirical", max_k=10**6, hook=None, max_points=50_000):
    """Quasi-rate obtained by witness search on ``values``.

    Where the search finds the least witness, that witness is the value and
    is recorded on ``hook``.  Otherwise (``k`` beyond ``max_k``, saturated
    arguments, or no witness within ``cap``) the answer is the saturation
    mark, which is uninformative but never wrong.
    """
    values = _as_values(values)

    def rule(k, f):
        if k.is_top or k.value > max_k:
            return Nat.top(0)
        try:
            res = find_quasi_witness(values, k.value, f, cap, max_points=max_points)
        except OverflowError:
            return Nat.top(0)
        if not res.found:
            return Nat.top(0)
        if hook is not None:
            hook.record(k.value, f.key, res.n_star)
        return nat(res.n_star)

    return RateFunctional(rule, tag=tag)


def empirical_hook(traj, cap=20_000):
    """Quasi-rate hook backed by witness search on ``|y[2m+1] - y[2m-1]|``,
    the difference sequence whose quasi-rate feeds the asymptotic
    regularity chain."""
    values = odd_gap_sequence(traj)
    hook = QuasiRateHook(None, tag="empirical")
    fn = empirical_functional(values, cap=cap, hook=hook)
    hook.builder = lambda a_param, nu, bound: fn
    return hook


_ = TOL
