"""Metastability bound under the relaxed conditions (no ratio rates for the
step sizes, a lower bound ``1/P(n)`` on ``alpha_n + lambda_n`` instead),
and the induced quasi-rate of asymptotic regularity.

:class:`CaseTower` holds the fixed data ``a, ell, A, P, N`` and exposes every
intermediate constant and function by name, so each can be evaluated and
tested on its own.
"""

from ..nat import nat, nat_max
from .conditional import zeta
from .counterfunctions import Counterfunction, as_counterfunction, f_tilde, g_f, plus_one_iterate
from .functionals import RateFunctional
from .xu import sigma1

__all__ = ["CaseTower", "case_tower", "mu_meta4", "vartheta", "tau"]


class CaseTower:
    def __init__(self, a, ell, A, P, N):
        self.a = as_counterfunction(a)
        self.ell = as_counterfunction(ell)
        self.A = as_counterfunction(A)
        self.P = as_counterfunction(P)
        self.N = nat(N)
        if self.N == 0:
            raise ValueError("N must be at least 1")
        self.D = 4 * self.N**2
        self.s1 = sigma1(self.A, 4 * self.N**2)
        self.zeta = zeta(self.N)

    # constants
    def M0(self, k):
        j = 16 * self.N * (nat(k) + 1) - 1
        return nat_max(self.a(j), self.ell(j))

    def M1(self, k):
        k = nat(k)
        return nat_max(self.a((8 * self.N * (k + 1)) ** 2) - 1, self.ell(3 * (4 * self.N * (k + 1)) ** 2) - 1)

    def M2(self, k):
        k = nat(k)
        return nat_max(self.a((64 * self.N * (k + 1)) ** 2) - 1, self.ell(3 * (32 * self.N * (k + 1)) ** 2) - 1)

    # iteration helpers
    def phi2(self, k, n, f, D=None):
        D = self.D if D is None else nat(D)
        n = nat(n)
        return nat_max(n, plus_one_iterate(f, D * (nat(k) + 1), n))

    def phi1(self, k, n, f, D=None):
        return as_counterfunction(f)(self.phi2(k, n, f, D)) + 1

    def Psi1(self, k, n, f):
        k = nat(k)
        return self.phi1(2 * (k + 1) ** 2 - 1, n, f_tilde(f, self.M1(k)))

    def Psi2(self, k, n, f):
        k = nat(k)
        m1 = self.M1(k)
        return nat_max(self.phi2(2 * (k + 1) ** 2 - 1, n, f_tilde(f, m1)), m1)

    def Psi3(self, k, n, f):
        k = nat(k)
        return self.phi1(128 * (k + 1) ** 2 - 1, n, f_tilde(f, self.M2(k)))

    def Psi4(self, k, n, f):
        k = nat(k)
        m2 = self.M2(k)
        return nat_max(self.phi2(128 * (k + 1) ** 2 - 1, n, f_tilde(f, m2)), m2)

    def _k_tilde(self, k):
        return 16 * (nat(k) + 1) ** 2 - 1

    def j_f(self, k, f):
        f = as_counterfunction(f)
        kt = self._k_tilde(k)
        s1 = self.s1
        return Counterfunction(
            lambda n: f(2 * s1(kt, n) + 1), name="j_f", monotone=True, key=("j_f", s1.key, nat(k).key, f.key)
        )

    def Psi5(self, k, n, f):
        k, n = nat(k), nat(n)
        return self.Psi3(nat_max(k, n), n, self.j_f(k, f))

    def Psi6(self, k, n, f):
        k, n = nat(k), nat(n)
        nt = self.Psi4(nat_max(k, n), n, self.j_f(k, f))
        return 2 * self.s1(self._k_tilde(k), nt) + 1

    def xi1(self, k, f, n):
        k = nat(k)
        f = as_counterfunction(f)
        return 16 * 64 * self.N * (k + 1) ** 2 * (f(self.Psi6(k, n, f)) + 1) - 1

    def xi2(self, k, f, n):
        k = nat(k)
        f = as_counterfunction(f)
        return 16 * 96 * self.N * self.P(f(2 * nat(n) + 1)) * (k + 1) ** 2 - 1

    def frak_m(self, n):
        n = nat(n)
        return nat_max(self.a(16 * 64 * self.N**2 * n - 1), self.ell(12 * 64 * self.N**2 * n - 1))

    def r(self, n, k):
        return nat_max(self.frak_m(2 * (nat(n) + 1) ** 2), self.frak_m((nat(k) + 1) ** 2))

    def r_plus(self, n, k):
        return nat_max(self.r(n, k), n)

    def Xi1(self, k, f, n):
        return self.xi1(k, f, self.r_plus(n, k))

    def Xi2(self, k, f, n):
        return self.xi2(k, f, self.Psi5(k, self.r_plus(n, k), f))

    def Xi(self, k, f, n):
        return nat_max(self.Xi1(k, f, n), self.Xi2(k, f, n))

    def Xi_function(self, k, f):
        f = as_counterfunction(f)
        k = nat(k)
        return Counterfunction(lambda n: self.Xi(k, f, n), name="Xi", monotone=True, key=("Xi", id(self), k.key, f.key))

    def mu(self, k, f):
        k = nat(k)
        f = as_counterfunction(f)
        kbar = 3 * 96 * (k + 1) ** 2 - 1
        n0 = self.zeta(kbar, self.Xi_function(k, f))
        rp = self.r_plus(n0, k)
        return nat_max(self.Psi6(k, rp, f), 2 * self.Psi5(k, rp, f) + 1)


_NAMES = {
    "M0": ("k",),
    "M1": ("k",),
    "M2": ("k",),
    "phi1": ("k", "n", "f"),
    "phi2": ("k", "n", "f"),
    "Psi1": ("k", "n", "f"),
    "Psi2": ("k", "n", "f"),
    "Psi3": ("k", "n", "f"),
    "Psi4": ("k", "n", "f"),
    "Psi5": ("k", "n", "f"),
    "Psi6": ("k", "n", "f"),
    "xi1": ("k", "f", "n"),
    "xi2": ("k", "f", "n"),
    "frak_m": ("n",),
    "r": ("n", "k"),
    "r_plus": ("n", "k"),
    "Xi1": ("k", "f", "n"),
    "Xi2": ("k", "f", "n"),
    "Xi": ("k", "f", "n"),
    "mu": ("k", "f"),
}


def case_tower(name, a, ell, A, P, N, k=0, n=0, f=None, D=None):
    """Evaluate one named constant or function of the tower."""
    if name not in _NAMES:
        raise ValueError("unknown tower entry %r" % (name,))
    tower = CaseTower(a, ell, A, P, N)
    values = {"k": nat(k), "n": nat(n), "f": as_counterfunction(f) if f is not None else None}
    args = [values[p] for p in _NAMES[name]]
    if "f" in _NAMES[name] and values["f"] is None:
        raise ValueError("%s needs a counterfunction f" % name)
    if name in ("phi1", "phi2") and D is not None:
        return getattr(tower, name)(*args, D=D)
    return getattr(tower, name)(*args)


def mu_meta4(a, ell, A, P, N, R=1):
    """Metastability rate for the alternating-resolvent orbit under the
    relaxed conditions.  ``R`` is accepted for a uniform signature; the
    bound does not depend on it."""
    tower = CaseTower(a, ell, A, P, N)
    out = RateFunctional(lambda k, f: tower.mu(k, f), tag="mu_meta4", key=("mu4", id(tower)))
    out.tower = tower
    return out


def vartheta(mu4, M0rule):
    """Quasi-rate of asymptotic regularity from a metastability rate.

    ``(k, f) -> 2 max{mu(8k+7, 2 g~[M0] + 2), M0} + 1`` with ``M0 = M0rule(k)``.
    """

    def rule(k, f):
        m0 = nat(M0rule(k))
        gt = f_tilde(g_f(f), m0)
        F = Counterfunction(lambda m: 2 * gt(m) + 2, name="2g~+2", monotone=True, key=("2g~+2", gt.key))
        return 2 * nat_max(mu4(8 * k + 7, F), m0) + 1

    return RateFunctional(rule, tag="vartheta", key=("vartheta", mu4.key, id(M0rule)))


def tau(s, m, n):
    """Last ascent of ``s`` in ``[m, n]``.

    Returns ``n`` when ``n < m`` or when ``s`` does not increase anywhere on
    ``[m, n]``; otherwise the largest ``k`` in ``[m, n]`` with
    ``s[k] < s[k+1]``.
    """
    m, n = int(m), int(n)
    if m < 0 or n < 0:
        raise IndexError("negative index")
    if n < m:
        return n
    if n + 1 >= len(s):
        raise IndexError("sequence needs index %d, has length %d" % (n + 1, len(s)))
    for k in range(n, m - 1, -1):
        if s[k] < s[k + 1]:
            return k
    return n
