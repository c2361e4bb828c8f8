import math

import numpy as np
import pytest

from resmeta.nat import nat
from resmeta.rates.counterfunctions import affine, constant
from resmeta.schedules import (
    builtin,
    check_monotone_moduli,
    halving_errors,
    make_bundle,
    parse_family,
    validate_errors,
    validate_moduli,
    zero_errors,
)

BUILTINS = ["harmonic(1)", "harmonic(3)", "constant(1/2)", "power(1/2)", "power(1)"]


def test_eval_examples():
    b = builtin("harmonic", 1)
    assert b.eval("alpha", 0) == 0.5
    assert b.eval("beta", 7) == 1.0
    assert b.eval("lambda", 8) == pytest.approx(0.1)


def test_harmonic_moduli():
    b = builtin("harmonic", 1)
    assert [b.a(k).value for k in range(5)] == [0, 1, 2, 3, 4]
    for m in range(6):
        for k in range(6):
            assert b.Aprime(m, k).value == (m + 1) * (k + 1)
    assert b.R == 1
    assert b.t(5).value == 1
    assert b.r_beta(3).value == 0


def test_harmonic_product_modulus_by_direct_product():
    b = builtin("harmonic", 1)
    for m in range(0, 30, 3):
        for k in range(6):
            n = b.Aprime(m, k).value
            prod = np.prod(1 - 1.0 / (np.arange(m, n + 1) + 2.0))
            assert prod <= 1.0 / (k + 1) + 1e-12


def test_harmonic_divergence_by_partial_sums():
    b = builtin("harmonic", 1)
    for k in range(11):
        A = b.A(k).value
        assert math.fsum(1.0 / (i + 2) for i in range(A + 1)) >= k


@pytest.mark.parametrize("spec", BUILTINS)
def test_builtins_validate(spec):
    b = builtin(spec)
    assert validate_moduli(b, horizon=10_000, k_max=10) == []
    assert check_monotone_moduli(b, upto=1000) == []


def test_wrong_modulus_is_refuted():
    b = make_bundle("harmonic(1)", a=constant(0))
    bad = validate_moduli(b, horizon=100, k_max=3)
    assert any(v.modulus == "a" and v.k == 2 and v.n == 0 for v in bad)
    assert not any(v.modulus == "a" and v.k == 1 for v in bad)


def test_constant_half_with_linear_divergence():
    b = make_bundle("constant(1/2)", A=affine(2, 0))
    assert not [v for v in validate_moduli(b, horizon=2000, k_max=10) if v.modulus == "A"]


def test_parse_family_forms():
    assert parse_family("harmonic(1)").term(0) == 0.5
    assert parse_family(("power", "1/2")).term(0) == pytest.approx(2**-0.5)
    t = parse_family({"table": [0.9, 0.8], "tail": "harmonic(1)"})
    assert t.term(0) == 0.9 and t.term(1) == 0.8 and t.term(2) == pytest.approx(0.25)
    with pytest.raises(ValueError):
        parse_family("harmonix(1)")
    with pytest.raises(ValueError):
        parse_family("harmonic(0)")


def test_zero_errors():
    e = zero_errors(2)
    assert e.is_zero and e.M == 1
    assert e.E(5) == 0 and np.all(e.e(3) == 0)


def test_halving_errors_rates():
    e = halving_errors([3.0, 4.0])
    assert np.linalg.norm(e.e(0)) == pytest.approx(1.0)
    assert np.linalg.norm(e.e(3)) == pytest.approx(1 / 8)
    assert validate_errors(e, horizon=2000, k_max=10) == []
    # tail after E(k) is at most 2^-E(k) <= 1/(k+1)
    for k in range(20):
        E = e.E(k).value
        assert 2.0**-E <= 1.0 / (k + 1)
    # the stored M dominates the partial sums it must bound
    s = sum(np.linalg.norm(e.e(i)) for i in range(e.E(1).value + 1))
    s += sum(np.linalg.norm(e.eprime(i)) for i in range(e.Eprime(1).value + 1))
    assert e.M >= s + 1


def test_moduli_are_monotone_nats():
    b = builtin("harmonic", 1)
    vals = [b.A(k) for k in range(8)]
    assert all(x <= y for x, y in zip(vals, vals[1:]))
    assert b.P(nat(3)).value >= 1
