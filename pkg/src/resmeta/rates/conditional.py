"""Metastability bounds that are conditional on a quasi-rate of asymptotic
regularity, the staged construction of such quasi-rates, and the transfer of
rates between the alternating-resolvent and Halpern-type iterations.

All "constants" of the staged construction are functions of the incoming
``k``.
"""

import functools

from ..nat import nat, nat_max
from .counterfunctions import Counterfunction, f_tilde, shift
from .functionals import RateFunctional, combine_meta, parity_merge, suzuki_hook
from .xu import sigma1

__all__ = [
    "w_map",
    "w_iterate",
    "zeta",
    "omega_eta",
    "mu_tilde",
    "mu_meta3",
    "EtaFamily",
    "eta_family",
    "halpern_transfer",
]


def _positive(N, name="N"):
    N = nat(N)
    if N == 0:
        raise ValueError("%s must be at least 1" % name)
    return N


def w_map(N, f):
    """``m -> max{f(24N(m+1)^2), 24N(m+1)^2}``."""
    N = _positive(N)

    def rule(m):
        inner = 24 * N * (m + 1) ** 2
        return nat_max(f(inner), inner)

    return Counterfunction(rule, name="w", monotone=True, key=("w", N.key, f.key))


def w_iterate(N, f, times, start=0):
    """``times``-fold iterate of :func:`w_map` from ``start``.

    ``w(m) > m`` always, so the orbit strictly increases until it saturates;
    a saturated iterate with lower bound at the cap is a fixed point.
    """
    w = w_map(N, f)
    times = nat(times)
    x = nat(start)
    i = 0
    while times.is_top or i < times.value:
        y = w(x)
        if y.is_top and x.is_top and y.lo <= x.lo:
            return y
        x = y
        i += 1
    return x


def zeta(N):
    """``(k, f) -> 24N (w^(E)(0) + 1)^2`` with ``E = 4 N^4 (k+1)^2``."""
    N = _positive(N)

    def rule(k, f):
        E = 4 * N**4 * (k + 1) ** 2
        return 24 * N * (w_iterate(N, f, E) + 1) ** 2

    return RateFunctional(rule, tag="zeta", key=("zeta", N.key))


def omega_eta(N, eta):
    """``(k, f) -> eta(zeta(k, fhat), f)`` with ``fhat(m) = f(eta(m, f))``."""
    z = zeta(N)

    def rule(k, f):
        fhat = Counterfunction(lambda m: f(eta(m, f)), name="fhat", monotone=True, key=("fhat", eta.key, f.key))
        return eta(z(k, fhat), f)

    return RateFunctional(rule, tag="omega_eta", key=("omega", nat(N).key, eta.key))


def mu_tilde(eta, N, R, A, t):
    """Conditional metastability bound for the even subsequence."""
    N, R = _positive(N), _positive(R, "R")
    s1 = sigma1(A, 4 * N**2)
    omega = omega_eta(N, eta)

    def rule(k, f):
        kt = (k + 1) ** 2 - 1
        kp = 16 * (k + 1) ** 2 - 1

        def p(n):
            return f(s1(kt, n))

        def F_rule(n):
            pn = p(n)
            g = 64 * N * R * (k + 1) ** 2 * (pn + 1) * t(pn) - 1
            return 2 * g + 2

        F = Counterfunction(F_rule, name="2g+2", monotone=True, key=("mutilde-F", s1.key, f.key, k.key, t.key))
        return s1(kt, omega(kp, F))

    return RateFunctional(rule, tag="mu_tilde", key=("mu_tilde", eta.key, N.key, R.key, A.key, t.key))


def mu_meta3(eta, etaprime, N, R, A, t):
    """Full metastability bound built from two quasi-rates."""
    mt = mu_tilde(eta, N, R, A, t)

    def psi1_rule(k, f):
        twice = Counterfunction(lambda n: 2 * f(n), name="2f", monotone=True, key=("2f", f.key))
        return etaprime(4 * k + 3, twice)

    psi1 = RateFunctional(psi1_rule, tag="psi1", key=("psi1", etaprime.key))
    psi2 = RateFunctional(lambda k, f: mt(4 * k + 3, f), tag="psi2", key=("psi2", mt.key))
    out = parity_merge(combine_meta(psi1, psi2))
    out.tag = "mu_meta3"
    return out


class EtaFamily:
    """Staged quasi-rates of asymptotic regularity.

    Stages ``eta0`` to ``eta6`` and ``eta`` build on the Suzuki-type quasi-rate
    from ``chi``; any stage may be replaced through ``overrides`` (a mapping
    from stage name to RateFunctional), which is how empirical stand-ins are
    plugged into the later stages.
    """

    STAGES = ("nu", "eta0", "eta1", "eta2", "eta3", "eta4", "eta5", "eta6", "eta")

    def __init__(self, a, ell, r_beta, r_mu, N, chi=None, overrides=None):
        self.a, self.ell, self.r_beta, self.r_mu = a, ell, r_beta, r_mu
        self.N = _positive(N)
        self.chi = chi
        self.overrides = dict(overrides or {})
        self._cache = {}

    # per-k constants
    def nu_value(self, k):
        N, k = self.N, nat(k)
        return nat_max(
            self.a(38 * N * (k + 1) - 1),
            self.ell(22 * N * (k + 1) - 1) + 1,
            self.r_beta(11 * N * (k + 1) - 1),
            self.r_mu(16 * N * (k + 1) - 1) + 1,
        )

    def N1(self, k):
        j = 16 * self.N * (nat(k) + 1) - 1
        return nat_max(self.ell(j) + 1, self.r_mu(j) + 1)

    def N2(self, k):
        j = 32 * self.N**2 * (nat(k) + 1) ** 2 - 1
        return nat_max(self.a(j), self.ell(j))

    def N3(self, k):
        return self.a(8 * self.N * (nat(k) + 1) - 1)

    def N4(self, k):
        return self.ell(8 * self.N * (nat(k) + 1) - 1)

    @functools.cached_property
    def nu(self):
        return Counterfunction(self.nu_value, name="nu", monotone=True, key=("nu", id(self)))

    def stage(self, name):
        if name not in self.STAGES:
            raise ValueError("unknown stage %r" % (name,))
        if name == "nu":
            return self.nu
        if name in self.overrides:
            return self.overrides[name]
        if name not in self._cache:
            self._cache[name] = getattr(self, "_build_" + name)()
        return self._cache[name]

    def _build_eta0(self):
        return suzuki_hook(4, self.nu, 3 * self.N, self.chi)

    def _build_eta1(self):
        eta0 = self.stage("eta0")

        def rule(k, f):
            n1 = self.N1(k)
            return nat_max(eta0(2 * k + 1, f_tilde(f, n1)), n1)

        return RateFunctional(rule, tag="eta1", key=("eta1", id(self), eta0.key))

    def _build_eta2(self):
        eta1 = self.stage("eta1")
        N = self.N

        def rule(k, f):
            n2 = self.N2(k)
            fcheck = Counterfunction(
                lambda n: f(2 * nat_max(n, n2) + 1), name="fcheck", monotone=True, key=("fcheck", f.key, n2.key)
            )
            return 2 * nat_max(eta1(8 * N * (k + 1) ** 2 - 1, fcheck), n2) + 1

        return RateFunctional(rule, tag="eta2", key=("eta2", id(self), eta1.key))

    def _resolvent_stage(self, tag, const):
        eta2 = self.stage("eta2")

        def rule(k, f):
            c = const(k)
            return nat_max(eta2(4 * k + 3, f_tilde(f, c)), c)

        return RateFunctional(rule, tag=tag, key=(tag, id(self), eta2.key))

    def _build_eta3(self):
        return self._resolvent_stage("eta3", self.N3)

    def _build_eta4(self):
        return self._resolvent_stage("eta4", self.N4)

    def _tilde2(self):
        eta2 = self.stage("eta2")

        def rule(k, f):
            twice = Counterfunction(lambda n: 2 * f(n), name="2f", monotone=True, key=("2f", f.key))
            return eta2(4 * k + 3, twice)

        return RateFunctional(rule, tag="eta2~", key=("eta2~", eta2.key))

    def _build_eta5(self):
        eta3 = self.stage("eta3")
        t3 = RateFunctional(lambda k, f: eta3(2 * k + 1, f), tag="eta3~", key=("eta3~", eta3.key))
        out = parity_merge(combine_meta(self._tilde2(), t3))
        out.tag = "eta5"
        return out

    def _build_eta6(self):
        eta4 = self.stage("eta4")
        t4 = RateFunctional(lambda k, f: eta4(2 * k + 1, shift(f, 1)) + 1, tag="eta4~", key=("eta4~", eta4.key))
        out = parity_merge(combine_meta(self._tilde2(), t4))
        out.tag = "eta6"
        return out

    def _build_eta(self):
        out = combine_meta(self.stage("eta5"), self.stage("eta6"))
        out.tag = "eta"
        return out


def eta_family(stage, a, ell, r_beta, r_mu, N, chi=None, overrides=None):
    return EtaFamily(a, ell, r_beta, r_mu, N, chi=chi, overrides=overrides).stage(stage)


def halpern_transfer(direction, a, ell, N, rho):
    """Transfer a metastability rate between the two iteration schemes.

    ``direction`` is ``"mar->halpern"`` or ``"halpern->mar"``.  Returns the
    convergence rate ``gamma`` of the gap between the two orbits and the
    transferred rate ``rho_tilde``.
    """
    N = _positive(N)
    if direction in ("mar->halpern", "mar→halpern"):
        offset, bump = 2, False
    elif direction in ("halpern->mar", "halpern→mar"):
        offset, bump = 1, True
    else:
        raise ValueError("direction must be 'mar->halpern' or 'halpern->mar'")

    def gamma_rule(k):
        j = 2 * N * (k + 1) - 1
        return 2 * nat_max(a(j), ell(j)) + offset

    gamma = Counterfunction(gamma_rule, name="gamma", monotone=True, key=("gamma", offset, a.key, ell.key, N.key))

    def rule(k, f):
        g = gamma(4 * k + 3)
        if bump:
            inner = Counterfunction(lambda m: f(nat_max(m, g)) + 1, name="f~+1", monotone=True, key=("f~+1", f.key, g.key))
        else:
            inner = f_tilde(f, g)
        return nat_max(rho(2 * k + 1, inner), g)

    rho_tilde = RateFunctional(rule, tag="rho_tilde", key=("rho_tilde", gamma.key, rho.key))
    return gamma, rho_tilde

