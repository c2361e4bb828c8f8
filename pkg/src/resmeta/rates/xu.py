"""Quantitative bounds for Xu-type recurrences.

For nonnegative ``s`` with ``s[m+1] <= (1-alpha[m])(1-lam[m]) s[m]
+ alpha[m] b[m] + lam[m] c[m] + d[m]`` and ``s <= M``:

* ``rho1`` is a rate of convergence of ``s`` to 0 given a divergence rate
  ``A`` for ``sum alpha``, rates ``B, C`` for ``limsup b, c <= 0`` and a
  Cauchy rate ``D`` for ``sum d``.
* ``sigma1(k, n)`` bounds where ``s`` is ``1/(k+1)``-small on ``[n, p]``
  when the data are only small on that interval.
* ``rho2`` and ``sigma2`` are the same bounds with a product modulus
  ``Aprime(m, k)`` in place of ``A``.
"""

from ..nat import ceil_ln, nat, nat_max
from .counterfunctions import BiCounterfunction, Counterfunction, as_counterfunction

__all__ = ["rho1", "sigma1", "rho2", "sigma2", "log_term"]


def log_term(M, k):
    """``ceil(ln(4 M (k+1)))``."""
    return ceil_ln(4 * nat(M) * (nat(k) + 1))


def _check_M(M):
    M = nat(M)
    if M == 0:
        raise ValueError("M must be at least 1")
    return M


def _n_tilde(B, C, D, k):
    j = 4 * k + 3
    return nat_max(B(j), C(j), D(j) + 1)


def rho1(A, B, C, D, M):
    A, B, C, D = (as_counterfunction(g) for g in (A, B, C, D))
    M = _check_M(M)

    def rule(k):
        return A(_n_tilde(B, C, D, k) + log_term(M, k)) + 1

    return Counterfunction(rule, name="rho1", monotone=True, key=("rho1", A.key, B.key, C.key, D.key, M.key))


def sigma1(A, M):
    A = as_counterfunction(A)
    M = _check_M(M)
    return BiCounterfunction(
        lambda k, n: A(n + log_term(M, k)) + 1, name="sigma1", monotone=True, key=("sigma1", A.key, M.key)
    )


def rho2(Aprime, B, C, D, M):
    B, C, D = (as_counterfunction(g) for g in (B, C, D))
    M = _check_M(M)

    def rule(k):
        nt = _n_tilde(B, C, D, k)
        return Aprime(nt, 4 * M * (k + 1) - 1) + nt + 1

    return Counterfunction(rule, name="rho2", monotone=True, key=("rho2", Aprime.key, B.key, C.key, D.key, M.key))


def sigma2(Aprime, M):
    M = _check_M(M)
    return BiCounterfunction(
        lambda k, n: Aprime(n, 4 * M * (k + 1) - 1) + 1, name="sigma2", monotone=True, key=("sigma2", Aprime.key, M.key)
    )
