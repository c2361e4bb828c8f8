"""Rate functionals ``(k, f) -> n`` and the generic combinators on them."""

import itertools
import threading

from ..nat import nat, nat_max, nat_min
from .counterfunctions import Counterfunction, as_counterfunction, f_tilde, g_f, majorize

__all__ = [
    "RateFunctional",
    "functional",
    "constant_functional",
    "combine_meta_bar",
    "combine_meta",
    "parity_merge",
    "QuasiRateHook",
    "MissingHookError",
    "suzuki_hook",
]

_ids = itertools.count()


class RateFunctional:
    """Memoized functional ``(Nat k, Counterfunction f) -> Nat``.

    ``f`` is majorized on entry, so rules may assume a monotone argument.
    ``tag`` records which construction produced the functional.
    """

    def __init__(self, rule, tag="functional", key=None):
        self._rule = rule
        self.tag = tag
        self.key = key if key is not None else ("fn", tag, next(_ids))
        self._memo = {}
        self._lock = threading.Lock()

    def __call__(self, k, f):
        k = nat(k)
        f = majorize(as_counterfunction(f))
        key = (k.key, f.key)
        try:
            return self._memo[key]
        except KeyError:
            pass
        value = nat(self._rule(k, f))
        with self._lock:
            if len(self._memo) > 100_000:
                self._memo.clear()
            self._memo[key] = value
        return value

    def __repr__(self):
        return "RateFunctional(%s)" % self.tag


def functional(tag, key=None):
    """Decorator turning ``rule(k, f)`` into a :class:`RateFunctional`."""

    def wrap(rule):
        return RateFunctional(rule, tag=tag, key=key)

    return wrap


def constant_functional(c):
    c = nat(c)
    return RateFunctional(lambda k, f: c, tag="const(%s)" % c, key=("fconst", c.key))


def combine_meta_bar(phi1, phi2):
    """One order of the metastability combination.

    With ``fbar(m) = f(max{m, phi2(k, f~[m])})`` and ``theta = phi1(k, fbar)``
    the result is ``max{theta, phi2(k, f~[theta])}``.
    """

    def rule(k, f):
        def fbar_rule(m):
            return f(nat_max(m, phi2(k, f_tilde(f, m))))

        fbar = Counterfunction(fbar_rule, name="fbar", monotone=True, key=("fbar", phi2.key, k.key, f.key))
        theta = phi1(k, fbar)
        return nat_max(theta, phi2(k, f_tilde(f, theta)))

    return RateFunctional(rule, tag="combine_bar", key=("Phibar", phi1.key, phi2.key))


def combine_meta(phi1, phi2):
    """Minimum over both orders of :func:`combine_meta_bar`."""
    first = combine_meta_bar(phi1, phi2)
    second = combine_meta_bar(phi2, phi1)
    return RateFunctional(
        lambda k, f: nat_min(first(k, f), second(k, f)), tag="combine", key=("Phi", phi1.key, phi2.key)
    )


def parity_merge(psi):
    """``(k, f) -> 2 psi(k, g_f) + 1``: lifts a bound on even/odd index pairs
    to the full sequence."""
    return RateFunctional(lambda k, f: 2 * psi(k, g_f(f)) + 1, tag="parity", key=("Psi", psi.key))


class MissingHookError(LookupError):
    pass


class QuasiRateHook:
    """A pluggable quasi-rate provider.

    ``builder(a_param, nu, bound)`` returns a :class:`RateFunctional`.  The
    ``tag`` is ``"external-chi"`` for a closed form supplied from outside and
    ``"empirical"`` for one backed by witness search; empirical hooks keep the
    ``(k, f)`` pairs they actually certified in ``samples``.
    """

    def __init__(self, builder, tag="external-chi"):
        if tag not in ("external-chi", "empirical"):
            raise ValueError("hook tag must be 'external-chi' or 'empirical'")
        self.builder = builder
        self.tag = tag
        self.samples = []
        self._lock = threading.Lock()

    def record(self, k, f_key, n):
        with self._lock:
            self.samples.append((k, f_key, n))

    def build(self, a_param, nu, bound):
        return self.builder(a_param, nu, bound)


def suzuki_hook(a_param, nu, bound, hook):
    """Quasi-rate for the Suzuki-type difference sequence, from ``hook``."""
    if hook is None:
        raise MissingHookError("no quasi-rate hook installed")
    if int(a_param) < 1:
        raise ValueError("a_param must be a positive integer")
    built = hook.build(int(a_param), nu, nat(bound))
    return RateFunctional(lambda k, f: built(k, f), tag="suzuki[%s]" % hook.tag, key=("chi", id(hook), built.key))

