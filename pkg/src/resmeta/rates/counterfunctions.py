"""Counterfunctions: total maps on saturating naturals.

Every counterfunction works on :class:`~resmeta.nat.Nat` arguments so that a
saturated input flows through compositions without special casing.  Plain
integer rules are lifted with :meth:`Counterfunction.from_int`; on a
saturated argument a monotone rule is evaluated at the argument's lower
bound, which gives a sound lower bound for the saturated result.
"""

import itertools
import threading

from ..nat import Nat, nat, nat_max

__all__ = [
    "Counterfunction",
    "BiCounterfunction",
    "as_counterfunction",
    "identity",
    "constant",
    "affine",
    "doubling",
    "zero",
    "table",
    "majorize",
    "transform",
    "g_f",
    "f_tilde",
    "shift",
    "plus_one_iterate",
    "ITERATION_BUDGET",
]

ITERATION_BUDGET = 2_000_000
MAJORIZE_LIMIT = 10_000_000

_ids = itertools.count()


class Counterfunction:
    """Memoized map ``Nat -> Nat``.

    ``rule`` receives and returns Nat values.  ``monotone`` records whether
    monotonicity is asserted; ``key`` is a hashable structural description
    used to memoize functionals that take this function as an argument.
    """

    def __init__(self, rule, name="f", monotone=False, key=None, affine=None):
        self._rule = rule
        self.name = name
        self.monotone = bool(monotone)
        self.key = key if key is not None else ("anon", next(_ids))
        # (a, b) when the map is n -> a*n + b, used for closed-form iteration
        self.affine = affine
        self._memo = {}
        self._lock = threading.Lock()

    @classmethod
    def from_int(cls, fn, name="f", monotone=False, key=None, at_top=None, affine=None):
        """Lift an ``int -> int`` rule.

        ``at_top`` optionally gives the value on a saturated argument (for
        constants); otherwise the lower bound of a monotone rule is used.
        """

        def rule(x):
            if x.is_top:
                if at_top is not None:
                    return nat(at_top)
                if monotone:
                    return Nat.top(nat(fn(x.lo)).lo)
                return Nat.top(0)
            return nat(fn(x.value))

        return cls(rule, name=name, monotone=monotone, key=key, affine=affine)

    def __call__(self, x):
        x = nat(x)
        k = x.key
        memo = self._memo
        try:
            return memo[k]
        except KeyError:
            pass
        value = nat(self._rule(x))
        with self._lock:
            if len(memo) > 200_000:
                memo.clear()
            memo[k] = value
        return value

    def values(self, upto):
        return [self(i) for i in range(upto + 1)]

    def __repr__(self):
        return "Counterfunction(%s)" % self.name


class BiCounterfunction:
    """Memoized map ``(Nat, Nat) -> Nat`` (for example a product modulus)."""

    def __init__(self, rule, name="g", monotone=False, key=None):
        self._rule = rule
        self.name = name
        self.monotone = bool(monotone)
        self.key = key if key is not None else ("anon2", next(_ids))
        self._memo = {}
        self._lock = threading.Lock()

    @classmethod
    def from_int(cls, fn, name="g", monotone=False, key=None):
        def rule(m, k):
            if m.is_top or k.is_top:
                if monotone:
                    return Nat.top(nat(fn(m.lo, k.lo)).lo)
                return Nat.top(0)
            return nat(fn(m.value, k.value))

        return cls(rule, name=name, monotone=monotone, key=key)

    def __call__(self, m, k):
        m, k = nat(m), nat(k)
        key = (m.key, k.key)
        try:
            return self._memo[key]
        except KeyError:
            pass
        value = nat(self._rule(m, k))
        with self._lock:
            if len(self._memo) > 200_000:
                self._memo.clear()
            self._memo[key] = value
        return value

    def __repr__(self):
        return "BiCounterfunction(%s)" % self.name


def as_counterfunction(f):
    """Coerce ints and plain callables to counterfunctions."""
    if isinstance(f, Counterfunction):
        return f
    if isinstance(f, (int, Nat)) and not isinstance(f, bool):
        return constant(f)
    if callable(f):
        return Counterfunction.from_int(f, name=getattr(f, "__name__", "f"))
    raise TypeError("not a counterfunction: %r" % (f,))


# -- families ----------------------------------------------------------------


def identity():
    return Counterfunction(lambda x: x, name="id", monotone=True, key=("id",), affine=(1, 0))


def constant(c):
    c = nat(c)
    return Counterfunction(lambda x: c, name="const(%s)" % c, monotone=True, key=("const", c.key))


def zero():
    return constant(0)


def affine(a, b=0):
    """``n -> a*n + b`` with natural coefficients."""
    a, b = int(a), int(b)
    if a < 0 or b < 0:
        raise ValueError("affine coefficients must be natural")
    if a == 1 and b == 0:
        return identity()
    if a == 0:
        return constant(b)
    A, B = nat(a), nat(b)
    return Counterfunction(
        lambda x: A * x + B, name="%d*n+%d" % (a, b), monotone=True, key=("affine", a, b), affine=(a, b)
    )


def doubling():
    return affine(2, 0)


def table(values, tail=None, name="table"):
    """Explicit finite prefix followed by ``tail`` (a counterfunction).

    Without a tail the last value is repeated.  Monotonicity is not assumed.
    """
    values = [int(v) for v in values]
    if not values:
        raise ValueError("empty table")
    tail = as_counterfunction(tail) if tail is not None else constant(values[-1])
    size = len(values)

    def rule(x):
        if not x.is_top and x.value < size:
            return Nat.exact(values[x.value])
        return tail(x)

    return Counterfunction(rule, name=name, monotone=False, key=("table", tuple(values), tail.key))


# -- transforms --------------------------------------------------------------


def majorize(f, upto=None):
    """Running maximum ``n -> max{f(i) : i <= n}``.

    A function already flagged monotone is returned unchanged.  ``upto`` is
    accepted for interface symmetry: the majorant is built lazily and is
    exact on every queried prefix.
    """
    f = as_counterfunction(f)
    if f.monotone:
        return f
    prefix = [f(0)]
    lock = threading.Lock()

    def rule(x):
        if x.is_top:
            # the hidden argument is at least lo, so maj(lo) (or the scanned
            # part of it) bounds the result from below
            with lock:
                best = prefix[min(x.lo, len(prefix) - 1)]
            return Nat.top(best.lo)
        n = x.value
        if n >= MAJORIZE_LIMIT:
            raise OverflowError("majorant requested at %d, beyond the scan limit" % n)
        with lock:
            while len(prefix) <= n:
                prefix.append(nat_max(prefix[-1], f(len(prefix))))
            return prefix[n]

    return Counterfunction(rule, name="maj(%s)" % f.name, monotone=True, key=("maj", f.key))


def g_f(f):
    """``m -> f(2m+1)``."""
    f = as_counterfunction(f)
    return Counterfunction(
        lambda x: f(2 * x + 1), name="g[%s]" % f.name, monotone=f.monotone, key=("g", f.key)
    )


def f_tilde(f, M):
    """``m -> f(max{m, M})``."""
    f = as_counterfunction(f)
    M = nat(M)
    if M == 0:
        return f
    return Counterfunction(
        lambda x: f(nat_max(x, M)),
        name="%s~[%s]" % (f.name, M),
        monotone=f.monotone,
        key=("tilde", f.key, M.key),
    )


def shift(f, by=1):
    """``n -> f(n + by)``."""
    f = as_counterfunction(f)
    return Counterfunction(
        lambda x: f(x + by), name="%s(n+%d)" % (f.name, by), monotone=f.monotone, key=("shift", f.key, by)
    )


def plus_one_iterate(f, j, n, budget=None):
    """``j``-fold iterate of ``m -> f(m) + 1`` starting at ``n``.

    Affine families use a closed form.  Otherwise the loop stops early at a
    fixed point or once the value saturates; the iterates of a monotone map
    from a point with ``g(n) >= n`` never decrease, so a saturated iterate
    bounds the final value from below.
    """
    f = as_counterfunction(f)
    j, x = nat(j), nat(n)
    if j == 0:
        return x
    if x.is_top:
        return Nat.top(f(x).lo + 1)
    if f.affine is not None and not j.is_top:
        return _affine_iterate(f.affine, j.value, x.value)
    budget = ITERATION_BUDGET if budget is None else budget
    steps = 0
    for steps in itertools.count(1):
        y = f(x) + 1
        if y.is_top:
            return Nat.top(y.lo)
        if y == x:
            return x
        x = y
        if not j.is_top and steps >= j.value:
            return x
        if steps >= budget:
            raise OverflowError("(f+1)-iteration exceeded %d steps" % budget)


def _affine_iterate(coeffs, j, n):
    a, b = coeffs
    c = b + 1
    if a == 0:
        return Nat.exact(c)
    if a == 1:
        return Nat.exact(n + j * c)
    # a**j * n + c * (a**j - 1) / (a - 1), saturating on the exponent first
    power = nat(a) ** j
    if power.is_top:
        return Nat.top(power.lo)
    p = power.value
    return Nat.exact(p * n + c * (p - 1) // (a - 1))


def transform(f, kind, arg=None):
    """Dispatch by name: ``g_f``, ``f_tilde`` (arg M), ``shift`` (arg offset),
    or ``f_plus_one_iter`` (arg j; returns the map ``n -> (f+1)^(j)(n)``)."""
    if kind == "g_f":
        return g_f(f)
    if kind == "f_tilde":
        return f_tilde(f, arg)
    if kind == "shift":
        return shift(f, 1 if arg is None else int(arg))
    if kind == "f_plus_one_iter":
        f = as_counterfunction(f)
        j = nat(arg)
        return Counterfunction(
            lambda x: plus_one_iterate(f, j, x),
            name="(%s+1)^(%s)" % (f.name, j),
            monotone=f.monotone,
            key=("iter", f.key, j.key),
        )
    raise ValueError("unknown transform %r" % (kind,))
