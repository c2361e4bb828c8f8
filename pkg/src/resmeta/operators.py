"""Maximal monotone operators on R^d with closed-form resolvents.

Each operator stores an analytic description of its zero set so that the
projection of an anchor point onto the common zeros of two operators can be
computed exactly for the supported shape combinations.
"""

import dataclasses
import threading

import numpy as np

__all__ = [
    "TOL",
    "ConvexSet",
    "Whole",
    "Affine",
    "Box",
    "Ball",
    "Halfspace",
    "intersection_projection",
    "MonotoneOp",
    "Zero",
    "LinearPSD",
    "Quadratic",
    "NormalConeBox",
    "NormalConeBall",
    "NormalConeHalfspace",
    "Translated",
    "as_point",
    "resolve",
    "reflected",
    "ResidualReport",
    "check_resolvent_identity",
    "check_resolvent_scaling",
    "graph_pair",
    "common_zero_projection",
]

TOL = 1e-10
PSD_THRESHOLD = -1e-12


def as_point(x, dim=None):
    p = np.atleast_1d(np.asarray(x, dtype=float))
    if p.ndim != 1:
        raise ValueError("a point is a 1-d vector")
    if not np.all(np.isfinite(p)):
        raise ValueError("point has non-finite coordinates")
    if dim is not None and p.size != dim:
        raise ValueError("dimension mismatch: expected %d, got %d" % (dim, p.size))
    return p


# -- convex sets (zero sets) --------------------------------------------------


class ConvexSet:
    dim = 0

    def project(self, x):
        raise NotImplementedError

    def contains(self, x, tol=TOL):
        return float(np.linalg.norm(self.project(x) - x)) <= tol

    def translated(self, t):
        raise NotImplementedError

    def sample(self):
        """A point of the set."""
        return self.project(np.zeros(self.dim))


@dataclasses.dataclass(frozen=True, eq=False)
class Whole(ConvexSet):
    dim: int

    def project(self, x):
        return as_point(x, self.dim).copy()

    def translated(self, t):
        return self


@dataclasses.dataclass(frozen=True, eq=False)
class Affine(ConvexSet):
    """``{x : C x = c}`` with consistent data."""

    C: np.ndarray
    c: np.ndarray

    def __post_init__(self):
        C = np.atleast_2d(np.asarray(self.C, dtype=float))
        c = np.atleast_1d(np.asarray(self.c, dtype=float))
        object.__setattr__(self, "C", C)
        object.__setattr__(self, "c", c)
        pinv = np.linalg.pinv(C, rcond=1e-12)
        object.__setattr__(self, "_pinv", pinv)
        base = pinv @ c
        if np.linalg.norm(C @ base - c) > 1e-9 * max(1.0, np.linalg.norm(c)):
            raise ValueError("inconsistent affine constraints (empty set)")

    @property
    def dim(self):
        return self.C.shape[1]

    def project(self, x):
        x = as_point(x, self.dim)
        return x - self._pinv @ (self.C @ x - self.c)

    def translated(self, t):
        return Affine(self.C, self.c + self.C @ as_point(t, self.dim))


@dataclasses.dataclass(frozen=True, eq=False)
class Box(ConvexSet):
    lo: np.ndarray
    hi: np.ndarray

    def __post_init__(self):
        lo, hi = as_point(self.lo), as_point(self.hi)
        if lo.shape != hi.shape or np.any(lo > hi):
            raise ValueError("box needs lo <= hi coordinatewise")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @property
    def dim(self):
        return self.lo.size

    def project(self, x):
        return np.clip(as_point(x, self.dim), self.lo, self.hi)

    def translated(self, t):
        t = as_point(t, self.dim)
        return Box(self.lo + t, self.hi + t)


@dataclasses.dataclass(frozen=True, eq=False)
class Ball(ConvexSet):
    center: np.ndarray
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", as_point(self.center))
        if not self.radius >= 0:
            raise ValueError("ball radius must be nonnegative")
        object.__setattr__(self, "radius", float(self.radius))

    @property
    def dim(self):
        return self.center.size

    def project(self, x):
        x = as_point(x, self.dim)
        d = x - self.center
        nd = float(np.linalg.norm(d))
        if nd <= self.radius:
            return x.copy()
        return self.center + d * (self.radius / nd)

    def translated(self, t):
        return Ball(self.center + as_point(t, self.dim), self.radius)


@dataclasses.dataclass(frozen=True, eq=False)
class Halfspace(ConvexSet):
    """``{x : <w, x> <= b}`` with ``w != 0``."""

    w: np.ndarray
    b: float

    def __post_init__(self):
        w = as_point(self.w)
        if not np.any(w):
            raise ValueError("halfspace normal must be nonzero")
        object.__setattr__(self, "w", w)
        object.__setattr__(self, "b", float(self.b))
        object.__setattr__(self, "_ww", float(w @ w))

    @property
    def dim(self):
        return self.w.size

    def project(self, x):
        x = as_point(x, self.dim)
        excess = float(self.w @ x) - self.b
        if excess <= 0:
            return x.copy()
        return x - (excess / self._ww) * self.w

    def translated(self, t):
        return Halfspace(self.w, self.b + float(self.w @ as_point(t, self.dim)))


class UnsupportedShape(ValueError):
    pass


def intersection_projection(S1, S2, u, tol=1e-9):
    """Projection of ``u`` onto ``S1 ∩ S2`` in closed form.

    Handled exactly: either set is the whole space; box with box; affine with
    affine; and any pair where the projection onto one set already lies in
    the other (then it is the projection onto the intersection).  Other
    combinations raise :class:`UnsupportedShape`.
    """
    u = as_point(u)
    if isinstance(S1, Whole):
        return S2.project(u)
    if isinstance(S2, Whole):
        return S1.project(u)
    if isinstance(S1, Box) and isinstance(S2, Box):
        lo, hi = np.maximum(S1.lo, S2.lo), np.minimum(S1.hi, S2.hi)
        if np.any(lo > hi + tol):
            raise ValueError("boxes do not intersect")
        return np.clip(u, lo, np.maximum(lo, hi))
    if isinstance(S1, Affine) and isinstance(S2, Affine):
        return Affine(np.vstack([S1.C, S2.C]), np.concatenate([S1.c, S2.c])).project(u)
    p1 = S1.project(u)
    if S2.contains(p1, tol):
        return p1
    p2 = S2.project(u)
    if S1.contains(p2, tol):
        return p2
    raise UnsupportedShape(
        "no closed-form projection onto %s ∩ %s" % (type(S1).__name__, type(S2).__name__)
    )


# -- operators ----------------------------------------------------------------


class MonotoneOp:
    """Base class.  Subclasses implement ``_resolve(gamma, x)`` and set
    ``zero_set``."""

    kind = "op"

    def __init__(self, dim):
        self.dim = int(dim)
        if self.dim < 1:
            raise ValueError("dimension must be at least 1")

    def resolve(self, gamma, x):
        gamma = float(gamma)
        if not gamma > 0:
            raise ValueError("resolvent parameter must be positive")
        return self._resolve(gamma, as_point(x, self.dim))

    def resolve_many(self, gamma, X):
        """Resolvent applied to each row of ``X``."""
        X = np.asarray(X, dtype=float)
        return np.array([self._resolve(float(gamma), x) for x in X]).reshape(X.shape)

    def _resolve(self, gamma, x):
        raise NotImplementedError

    def describe(self):
        return {"kind": self.kind, "dim": self.dim}

    def __repr__(self):
        return "%s(dim=%d)" % (type(self).__name__, self.dim)


class Zero(MonotoneOp):
    kind = "zero"

    def __init__(self, dim):
        super().__init__(dim)
        self.zero_set = Whole(self.dim)

    def _resolve(self, gamma, x):
        return x.copy()

    def resolve_many(self, gamma, X):
        return np.array(X, dtype=float)


class _FactorCache:
    """Inverse of ``I + gamma M`` cached per gamma (small dense problems)."""

    def __init__(self, M):
        self.M = M
        self._cache = {}
        self._lock = threading.Lock()

    def get(self, gamma):
        inv = self._cache.get(gamma)
        if inv is None:
            inv = np.linalg.inv(np.eye(self.M.shape[0]) + gamma * self.M)
            with self._lock:
                if len(self._cache) > 4096:
                    self._cache.clear()
                self._cache[gamma] = inv
        return inv


def _check_psd(M, symmetric):
    M = np.atleast_2d(np.asarray(M, dtype=float))
    if M.shape[0] != M.shape[1]:
        raise ValueError("matrix must be square")
    if not np.all(np.isfinite(M)):
        raise ValueError("matrix has non-finite entries")
    if symmetric and not np.allclose(M, M.T, atol=1e-12):
        raise ValueError("matrix must be symmetric")
    sym = 0.5 * (M + M.T)
    if np.linalg.eigvalsh(sym).min() < PSD_THRESHOLD:
        raise ValueError("matrix is not positive semidefinite")
    return M


class LinearPSD(MonotoneOp):
    """``x -> M x`` with positive semidefinite symmetric part."""

    kind = "linear"

    def __init__(self, M):
        M = _check_psd(M, symmetric=False)
        super().__init__(M.shape[0])
        self.M = M
        self._factors = _FactorCache(M)
        self.zero_set = Affine(M, np.zeros(self.dim))

    def _resolve(self, gamma, x):
        return self._factors.get(gamma) @ x

    def resolve_many(self, gamma, X):
        X = np.asarray(X, dtype=float)
        return X @ self._factors.get(float(gamma)).T

    def describe(self):
        return {"kind": self.kind, "dim": self.dim, "matrix": self.M.tolist()}


class Quadratic(MonotoneOp):
    """Gradient ``x -> Q (x - a)`` of ``(1/2)<Q(x-a), x-a>``, ``Q`` symmetric PSD."""

    kind = "quadratic"

    def __init__(self, Q, center):
        Q = _check_psd(Q, symmetric=True)
        super().__init__(Q.shape[0])
        self.Q = Q
        self.center = as_point(center, self.dim)
        self._Qa = Q @ self.center
        self._factors = _FactorCache(Q)
        self.zero_set = Affine(Q, self._Qa)

    def _resolve(self, gamma, x):
        return self._factors.get(gamma) @ (x + gamma * self._Qa)

    def resolve_many(self, gamma, X):
        gamma = float(gamma)
        X = np.asarray(X, dtype=float)
        return (X + gamma * self._Qa) @ self._factors.get(gamma).T

    def describe(self):
        return {"kind": self.kind, "dim": self.dim, "matrix": self.Q.tolist(), "center": self.center.tolist()}


class _NormalCone(MonotoneOp):
    """Normal cone of a closed convex set; its resolvent is the projection."""

    def _resolve(self, gamma, x):
        # the vectorized projection also accepts a single point
        return self.resolve_many(gamma, x)


class NormalConeBox(_NormalCone):
    kind = "box"

    def __init__(self, lo, hi):
        box = Box(lo, hi)
        super().__init__(box.dim)
        self.zero_set = box

    def resolve_many(self, gamma, X):
        return np.clip(np.asarray(X, dtype=float), self.zero_set.lo, self.zero_set.hi)

    def describe(self):
        return {"kind": self.kind, "dim": self.dim, "lo": self.zero_set.lo.tolist(), "hi": self.zero_set.hi.tolist()}


class NormalConeBall(_NormalCone):
    kind = "ball"

    def __init__(self, center, radius):
        ball = Ball(center, radius)
        super().__init__(ball.dim)
        self.zero_set = ball

    def resolve_many(self, gamma, X):
        X = np.asarray(X, dtype=float)
        D = X - self.zero_set.center
        nd = np.linalg.norm(D, axis=-1, keepdims=True)
        r = self.zero_set.radius
        scale = np.where(nd > r, r / np.where(nd > 0, nd, 1.0), 1.0)
        return self.zero_set.center + D * scale

    def describe(self):
        return {"kind": self.kind, "dim": self.dim, "center": self.zero_set.center.tolist(), "radius": self.zero_set.radius}


class NormalConeHalfspace(_NormalCone):
    kind = "halfspace"

    def __init__(self, w, b):
        hs = Halfspace(w, b)
        super().__init__(hs.dim)
        self.zero_set = hs

    def resolve_many(self, gamma, X):
        X = np.asarray(X, dtype=float)
        hs = self.zero_set
        excess = np.maximum(X @ hs.w - hs.b, 0.0)
        return X - (excess / hs._ww)[..., None] * hs.w

    def describe(self):
        return {"kind": self.kind, "dim": self.dim, "normal": self.zero_set.w.tolist(), "offset": self.zero_set.b}


class Translated(MonotoneOp):
    """``x -> A(x - t)``; resolvent ``x -> t + J_A(x - t)``."""

    kind = "translated"

    def __init__(self, op, shift):
        super().__init__(op.dim)
        self.op = op
        self.shift = as_point(shift, op.dim)
        self.zero_set = op.zero_set.translated(self.shift)

    def _resolve(self, gamma, x):
        return self.shift + self.op._resolve(gamma, x - self.shift)

    def resolve_many(self, gamma, X):
        return self.shift + self.op.resolve_many(gamma, np.asarray(X, dtype=float) - self.shift)

    def describe(self):
        return {"kind": self.kind, "dim": self.dim, "shift": self.shift.tolist(), "inner": self.op.describe()}


def resolve(op, gamma, x):
    return op.resolve(gamma, x)


def reflected(op, gamma, x):
    """``2 J_gamma(x) - x``."""
    x = as_point(x, op.dim)
    return 2.0 * op.resolve(gamma, x) - x


@dataclasses.dataclass(frozen=True)
class ResidualReport:
    lhs: float
    rhs: float
    slack: float

    @property
    def ok(self):
        return self.slack >= -TOL


def check_resolvent_identity(op, a, b, x):
    """``J_a(x)`` against ``J_b((b/a) x + (1 - b/a) J_a(x))``."""
    a, b = float(a), float(b)
    if not (a > 0 and b > 0):
        raise ValueError("resolvent parameters must be positive")
    x = as_point(x, op.dim)
    ja = op.resolve(a, x)
    inner = (b / a) * x + (1.0 - b / a) * ja
    lhs = float(np.linalg.norm(ja - op.resolve(b, inner)))
    return ResidualReport(lhs=lhs, rhs=0.0, slack=0.0 - lhs)


def check_resolvent_scaling(op, a, b, x):
    """``|J_a(x) - x| <= 2 |J_b(x) - x|`` for ``0 < a <= b``."""
    a, b = float(a), float(b)
    if not 0 < a <= b:
        raise ValueError("need 0 < a <= b")
    x = as_point(x, op.dim)
    lhs = float(np.linalg.norm(op.resolve(a, x) - x))
    rhs = 2.0 * float(np.linalg.norm(op.resolve(b, x) - x))
    return ResidualReport(lhs=lhs, rhs=rhs, slack=rhs - lhs)


def graph_pair(op, x, gamma=1.0):
    """A point ``(p, v)`` of the graph: ``p = J_gamma(x)``, ``v = (x - p)/gamma``."""
    x = as_point(x, op.dim)
    p = op.resolve(gamma, x)
    return p, (x - p) / float(gamma)


def common_zero_projection(opA, opB, u):
    """Projection of ``u`` onto the common zeros of ``opA`` and ``opB``."""
    return intersection_projection(opA.zero_set, opB.zero_set, u)
