import pytest
from hypothesis import given
from hypothesis import strategies as st

from resmeta.nat import TOP, Nat, cap_context, nat
from resmeta.rates.conditional import EtaFamily, halpern_transfer, mu_meta3, mu_tilde, omega_eta, w_iterate, zeta
from resmeta.rates.counterfunctions import (
    BiCounterfunction,
    Counterfunction,
    affine,
    constant,
    doubling,
    identity,
    majorize,
    table,
    transform,
)
from resmeta.rates.errors import meta_with_errors, rho_error
from resmeta.rates.functionals import (
    MissingHookError,
    QuasiRateHook,
    RateFunctional,
    combine_meta,
    combine_meta_bar,
    constant_functional,
    parity_merge,
    suzuki_hook,
)
from resmeta.rates.improved import case_tower, mu_meta4, tau, vartheta
from resmeta.rates.xu import rho1, rho2, sigma1, sigma2
from resmeta.schedules import builtin

Z = constant(0)
TWO_M = affine(2, 0)


def square():
    return Counterfunction.from_int(lambda n: n * n, name="sq", monotone=True)


def product_harmonic():
    return BiCounterfunction.from_int(lambda m, k: (m + 1) * (k + 1), monotone=True)


# -- counterfunction transforms ------------------------------------------------


def test_majorize_examples():
    f = table([3, 1, 5], tail=constant(0))
    assert [majorize(f)(i).value for i in range(5)] == [3, 3, 5, 5, 5]
    assert all(majorize(identity())(i) == i for i in range(50))
    assert all(majorize(Z)(i) == 0 for i in range(20))


def test_transform_examples():
    assert transform(square(), "g_f")(3) == 49
    assert transform(identity(), "f_tilde", 5)(3) == 5
    assert transform(identity(), "f_plus_one_iter", 2)(1) == 3
    assert transform(identity(), "shift", 2)(3) == 5


def test_plus_one_iteration_generic_matches_affine():
    slow = Counterfunction.from_int(lambda n: 2 * n + 1, monotone=True)
    for j in range(6):
        for n in range(5):
            assert transform(slow, "f_plus_one_iter", j)(n) == transform(affine(2, 1), "f_plus_one_iter", j)(n)


# -- combinators ---------------------------------------------------------------


def test_combine_examples():
    assert combine_meta(constant_functional(0), constant_functional(0))(0, identity()) == 0
    assert combine_meta(constant_functional(1), constant_functional(2))(0, identity()) == 2
    for c1 in range(4):
        for c2 in range(4):
            assert combine_meta(constant_functional(c1), constant_functional(c2))(1, doubling()) == max(c1, c2)


def test_parity_examples():
    assert parity_merge(constant_functional(3))(0, identity()) == 7
    assert parity_merge(constant_functional(0))(4, identity()) == 1
    at_zero = RateFunctional(lambda k, f: f(0), tag="f0")
    assert parity_merge(at_zero)(0, identity()) == 3


def test_suzuki_hook_contract():
    with pytest.raises(MissingHookError):
        suzuki_hook(4, identity(), 3, None)
    hook = QuasiRateHook(lambda a, nu, b: constant_functional(0), tag="empirical")
    assert suzuki_hook(4, identity(), 3, hook)(2, identity()) == 0
    with pytest.raises(ValueError):
        QuasiRateHook(lambda *a: None, tag="other")


# -- Xu-type rates -------------------------------------------------------------


def test_rho1_examples():
    assert rho1(TWO_M, Z, Z, Z, 1)(0) == 7
    assert rho1(Z, Z, Z, Z, 1)(0) == 1
    assert rho1(TWO_M, Z, Z, Z, 1)(1) == 9


def test_sigma1_examples():
    assert sigma1(TWO_M, 4)(0, 0) == 7
    assert all(sigma1(Z, 3)(k, n) == 1 for k in range(4) for n in range(4))
    assert sigma1(TWO_M, 1)(0, 5) == 15


def test_sigma2_rho2_examples():
    assert sigma2(product_harmonic(), 1)(0, 0) == 5
    assert rho2(product_harmonic(), Z, Z, Z, 1)(0) == 10
    zero2 = BiCounterfunction.from_int(lambda m, k: 0, monotone=True)
    assert sigma2(zero2, 2)(3, 4) == 1
    assert rho2(zero2, Z, Z, Z, 1)(0) == 2


def test_harmonic_bundle_product_modulus_matches():
    b = builtin("harmonic", 1)
    assert sigma2(b.Aprime, 1)(0, 0) == 5


# -- boundedness chain ---------------------------------------------------------


def test_zeta_examples():
    assert w_iterate(1, identity(), 1) == 24
    assert w_iterate(1, identity(), 2) == 15000
    assert w_iterate(1, Z, 2) == 15000
    # zeta(0, f) iterates w four times; the first two steps are known
    assert zeta(1)(0, identity()) >= 24 * 15001**2


def test_omega_examples():
    assert omega_eta(1, constant_functional(0))(3, identity()) == 0
    assert omega_eta(1, constant_functional(1))(2, identity()) == 1
    with cap_context(10**200):
        ident = RateFunctional(lambda k, f: k, tag="k")
        f = affine(1, 1)
        assert omega_eta(1, ident)(0, f) == zeta(1)(0, f)


def test_mu_tilde_examples():
    assert mu_tilde(constant_functional(0), 1, 1, Z, constant(1))(0, Z) == 1
    b = builtin("harmonic", 1)
    eta = constant_functional(2)
    m = mu_tilde(eta, 1, 1, b.A, b.t)
    assert m(0, identity()) <= m(1, identity())


def test_mu_tilde_saturates_at_small_cap():
    with cap_context(1000):
        eta = RateFunctional(lambda k, f: k, tag="k")
        v = mu_tilde(eta, 2, 1, TWO_M, constant(1))(0, doubling())
        assert v.is_top


def test_mu_meta3_examples():
    zero = constant_functional(0)
    m = mu_meta3(zero, zero, 1, 1, Z, constant(1))
    assert [m(k, identity()) for k in range(3)] == [3, 3, 3]
    b = builtin("harmonic", 1)
    eta = constant_functional(1)
    m = mu_meta3(eta, eta, 1, 1, b.A, b.t)
    vals = [m(k, identity()) for k in range(3)]
    assert vals[0] <= vals[1] <= vals[2]


# -- staged quasi-rates --------------------------------------------------------


def test_eta_family_constants():
    fam = EtaFamily(identity(), identity(), identity(), identity(), 1)
    assert fam.nu_value(0) == 37
    assert fam.N3(0) == 7


def test_eta3_with_stubbed_eta2():
    fam = EtaFamily(identity(), identity(), identity(), identity(), 1, overrides={"eta2": constant_functional(5)})
    assert fam.stage("eta3")(0, identity()) == 7


def test_eta_stage_without_hook_raises():
    fam = EtaFamily(identity(), identity(), identity(), identity(), 1)
    with pytest.raises(MissingHookError):
        fam.stage("eta0")(0, identity())


# -- transfer ------------------------------------------------------------------


def test_gamma_examples():
    g, _ = halpern_transfer("mar->halpern", identity(), identity(), 1, constant_functional(0))
    assert g(0) == 4
    g, _ = halpern_transfer("halpern->mar", identity(), identity(), 1, constant_functional(0))
    assert g(0) == 3


def test_rho_tilde_with_zero_rho():
    g, rt = halpern_transfer("mar->halpern", identity(), identity(), 1, constant_functional(0))
    for k in range(4):
        assert rt(k, identity()) == g(4 * k + 3)


# -- case tower and improved bound ---------------------------------------------


def test_tower_examples():
    assert case_tower("phi2", Z, Z, Z, constant(1), 1, k=0, n=1, f=identity(), D=2) == 3
    assert case_tower("M0", identity(), identity(), Z, constant(1), 1, k=0) == 15
    assert case_tower("frak_m", identity(), identity(), Z, constant(1), 1, n=1) == 1023


def test_mu4_zero_moduli_hand_unfold():
    # with a = l = A = 0, P = 1 and N = 1: sigma1 = 1, so Psi6 = 2*1+1 = 3 and
    # Psi5 = 1 + j_f where j_f counts (f+1)-steps; f = 0 gives Psi5 = 1 and
    # mu = max(3, 3); f = id gives Psi5 = 4 and mu = max(3, 9)
    m = mu_meta4(Z, Z, Z, constant(1), 1, 1)
    for k in range(3):
        assert m(k, Z) == 3
        assert m(k, identity()) == 9


def test_mu4_harmonic_lower_bound():
    b = builtin("harmonic", 1)
    v = mu_meta4(b.a, b.ell, b.A, b.P, 2, 1)(0, identity())
    assert v >= 24 * 15001**2
    if v.is_top:
        assert v.lo >= 24 * 15001**2


def test_vartheta_examples():
    assert vartheta(constant_functional(0), lambda k: 15)(0, identity()) == 31
    top = RateFunctional(lambda k, f: Nat.top(0), tag="top")
    assert vartheta(top, lambda k: 15)(0, identity()).is_top
    for c in (3, 20):
        assert vartheta(constant_functional(c), lambda k: 15)(1, identity()) == 2 * max(c, 15) + 1


def test_tau_examples():
    assert tau([5, 3, 4, 2, 1], 1, 3) == 1
    assert tau([5, 3, 4, 2, 1], 4, 2) == 2
    assert tau([9, 8, 7, 6, 5], 0, 3) == 3
    with pytest.raises(IndexError):
        tau([1, 2], 0, 3)


# -- errors --------------------------------------------------------------------


def test_rho_error_examples():
    assert rho_error("divergence-A", Z, Z, Z, 1)(0) == 3
    assert rho_error("divergence-A", TWO_M, Z, Z, 1)(0) == 19
    assert rho_error("divergence-A", Z, identity(), Z, 1)(0) == 5
    with pytest.raises(ValueError):
        rho_error("other", Z, Z, Z, 1)


def test_meta_with_errors_examples():
    mu = constant_functional(5)
    assert meta_with_errors(mu, constant(7))(0, identity()) == 7
    assert meta_with_errors(constant_functional(0), affine(1, 2))(1, identity()) == 9
    probe = RateFunctional(lambda k, f: f(k), tag="probe")
    assert meta_with_errors(probe, Z)(2, identity()) == probe(5, identity())


# -- monotonicity under the top ordering -----------------------------------------

F_CHAIN = [Z, identity(), affine(1, 10), doubling()]


def _monotone(fn, ks=(0, 1, 2), fs=F_CHAIN):
    for f in fs:
        vals = [fn(k, f) for k in ks]
        assert all(x <= y for x, y in zip(vals, vals[1:])), (f, vals)
    for k in ks:
        vals = [fn(k, f) for f in fs]
        assert all(x <= y for x, y in zip(vals, vals[1:])), (k, vals)


def test_monotone_rates():
    b = builtin("harmonic", 1)
    with cap_context(10**300):
        eta = constant_functional(1)
        _monotone(mu_tilde(eta, 1, 1, b.A, b.t))
        _monotone(mu_meta3(eta, eta, 1, 1, b.A, b.t))
        m4 = mu_meta4(b.a, b.ell, b.A, b.P, 1, 1)
        _monotone(m4)
        _monotone(vartheta(m4, m4.tower.M0))
        rho = rho_error("divergence-A", b.A, Z, Z, 1)
        vals = [rho(k) for k in range(6)]
        assert all(x <= y for x, y in zip(vals, vals[1:]))


@given(st.integers(0, 5), st.integers(0, 5), st.integers(1, 4), st.integers(0, 3))
def test_sigma1_monotone_in_every_argument(k, n, M, slope):
    A = affine(slope, 1)
    s, s_k, s_n, s_M = sigma1(A, M)(k, n), sigma1(A, M)(k + 1, n), sigma1(A, M)(k, n + 1), sigma1(A, M + 1)(k, n)
    assert s <= s_k and s <= s_n and s <= s_M


@given(st.integers(0, 6), st.integers(0, 6), st.integers(0, 6))
def test_combine_bounded_by_one_order(k, c1, c2):
    f = affine(1, c1)
    phi1 = RateFunctional(lambda k_, g: g(c2), tag="probe1")
    phi2 = constant_functional(c1)
    both = combine_meta(phi1, phi2)(k, f)
    assert both <= combine_meta_bar(phi1, phi2)(k, f)
    assert both <= combine_meta_bar(phi2, phi1)(k, f)


@given(st.integers(0, 20), st.integers(0, 20))
def test_saturation_soundness_of_w(n, extra):
    # a larger start never lowers the w-orbit, including when it saturates
    with cap_context(10**30):
        lo = w_iterate(1, identity(), 3, start=n)
        hi = w_iterate(1, identity(), 3, start=n + extra)
        assert lo <= hi
        assert hi.is_top or hi.value >= 24
    assert TOP.is_top
