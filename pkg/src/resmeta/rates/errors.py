"""Rates for the iteration with summable error terms."""

from ..nat import nat, nat_max
from .counterfunctions import Counterfunction, as_counterfunction, f_tilde
from .functionals import RateFunctional
from .xu import rho1, rho2

__all__ = ["rho_error", "meta_with_errors"]


def rho_error(variant, modulus, E, Eprime, M):
    """Rate of convergence for ``||x_n - y_n|| -> 0``.

    ``variant`` is ``"divergence-A"`` (``modulus`` a divergence rate) or
    ``"product-Aprime"`` (``modulus`` a two-argument product modulus).  The
    Cauchy data of the Xu recurrence are ``D(k) = max{E(2k+1), E'(2k+1)}``.
    """
    E, Eprime = as_counterfunction(E), as_counterfunction(Eprime)
    D = Counterfunction(
        lambda k: nat_max(E(2 * k + 1), Eprime(2 * k + 1)), name="D", monotone=True, key=("Derr", E.key, Eprime.key)
    )
    zero = as_counterfunction(0)
    if variant == "divergence-A":
        inner = rho1(as_counterfunction(modulus), zero, zero, D, M)
    elif variant == "product-Aprime":
        inner = rho2(modulus, zero, zero, D, M)
    else:
        raise ValueError("variant must be 'divergence-A' or 'product-Aprime'")

    def rule(k):
        return nat_max(2 * inner(2 * k + 1) + 1, 2 * E(2 * k + 1) + 3)

    return Counterfunction(rule, name="rho_err", monotone=True, key=("rho_err", variant, inner.key, E.key))


def meta_with_errors(mu, rho):
    """Metastability rate for the perturbed orbit:
    ``(k, f) -> max{mu(2k+1, f~[rho(4k+3)]), rho(4k+3)}``."""
    rho = as_counterfunction(rho)

    def rule(k, f):
        r = rho(4 * k + 3)
        return nat_max(mu(2 * k + 1, f_tilde(f, r)), r)

    return RateFunctional(rule, tag="meta_with_errors", key=("meta_err", mu.key, rho.key))
