"""Named rate evaluations for the ``bound`` command.

Each entry takes its moduli from a scenario (the configured one, or the
builtin harmonic line scenario) and lets any of them be replaced by a
``name=value`` override.  Moduli are written as

* a natural number ``c`` (the constant map),
* ``id``, ``doubling``, ``affine(a,b)``, or a linear form such as ``2m``,
  ``m+3``, ``4m+1``,
* for the two-argument product modulus: ``0`` or ``harmonic(p)``,
* for functionals (``eta``, ``phi1`` and so on): a constant, ``k``, or
  ``empirical`` (witness search on the scenario orbit).
"""

import dataclasses
import re

from .nat import nat
from .oracle import empirical_functional, empirical_hook, residual_sequence, step_sequence
from .iterations import Trajectory
from .rates.conditional import EtaFamily, halpern_transfer, mu_meta3, mu_tilde, w_iterate, zeta
from .rates.counterfunctions import BiCounterfunction, Counterfunction, affine, constant, doubling, identity
from .rates.errors import meta_with_errors, rho_error
from .rates.functionals import RateFunctional, combine_meta, combine_meta_bar, constant_functional, parity_merge
from .rates.improved import case_tower, mu_meta4, vartheta
from .rates.xu import rho1, rho2, sigma1, sigma2
from .schedules import parse_family

__all__ = ["BoundError", "REGISTRY", "names", "evaluate", "parse_modulus", "parse_product", "parse_functional"]


class BoundError(ValueError):
    pass


_LINEAR = re.compile(r"^(\d*)\*?[mnk](?:\+(\d+))?$")


def parse_modulus(text):
    t = str(text).replace(" ", "")
    if re.fullmatch(r"\d+", t):
        return constant(int(t))
    if t in ("id", "identity"):
        return identity()
    if t == "doubling":
        return doubling()
    m = re.fullmatch(r"affine\((\d+),(\d+)\)", t)
    if m:
        return affine(int(m.group(1)), int(m.group(2)))
    m = _LINEAR.match(t)
    if m:
        return affine(int(m.group(1) or 1), int(m.group(2) or 0))
    raise BoundError("cannot read modulus %r" % (text,))


def parse_product(text):
    t = str(text).replace(" ", "")
    if t == "0":
        return BiCounterfunction(lambda m, k: nat(0), name="0", monotone=True, key=("bi0",))
    try:
        fam = parse_family(t)
    except ValueError:
        raise BoundError("cannot read product modulus %r" % (text,)) from None
    out = fam.product()
    if out is None:
        raise BoundError("family %s has no product modulus" % t)
    return out


def parse_functional(text, empirical=None):
    t = str(text).replace(" ", "")
    if re.fullmatch(r"\d+", t):
        return constant_functional(int(t))
    if t == "k":
        return RateFunctional(lambda k, f: k, tag="k", key=("fk",))
    if t == "empirical":
        if empirical is None:
            raise BoundError("no empirical functional available here")
        return empirical()
    raise BoundError("cannot read functional %r" % (text,))


@dataclasses.dataclass
class Entry:
    name: str
    provenance: str
    inputs: tuple
    args: tuple
    run: object


class Inputs:
    """Lazy view of the moduli for one evaluation: overrides first, then the
    scenario's bundle and error schedule."""

    def __init__(self, scenario, overrides):
        self.scenario = scenario
        self.overrides = dict(overrides)
        self.used = {}

    def _bundle(self, name):
        b = self.scenario.bundle
        value = {"R": b.R, "N": self.scenario.N}.get(name, getattr(b, name, None))
        if value is None:
            raise BoundError("scenario has no modulus %s; set it explicitly" % name)
        return value

    def modulus(self, name):
        if name in self.overrides:
            self.used[name] = self.overrides[name]
            return parse_modulus(self.overrides[name])
        if name in ("E", "Eprime"):
            self.used[name] = "errors"
            return getattr(self.scenario.errors, name)
        if name in ("B", "C", "D"):
            self.used[name] = "0"
            return constant(0)
        self.used[name] = "scenario"
        return self._bundle(name)

    def product(self, name="Aprime"):
        if name in self.overrides:
            self.used[name] = self.overrides[name]
            return parse_product(self.overrides[name])
        self.used[name] = "scenario"
        return self._bundle(name)

    def number(self, name, default=None):
        if name in self.overrides:
            text = self.overrides[name]
            if not re.fullmatch(r"\d+", str(text).strip()):
                raise BoundError("%s must be a natural number" % name)
            self.used[name] = text
            return int(text)
        if default is not None:
            self.used[name] = str(default)
            return default
        if name == "M":
            self.used[name] = "errors"
            return self.scenario.errors.M
        self.used[name] = "scenario"
        return self._bundle(name)

    def word(self, name, default):
        value = self.overrides.get(name, default)
        self.used[name] = value
        return value

    def functional(self, name, empirical=None):
        text = self.overrides.get(name, "empirical")
        self.used[name] = text
        return parse_functional(text, empirical)

    def trajectory(self):
        if not hasattr(self, "_traj"):
            self._traj = Trajectory(self.scenario, "MAR*")
        return self._traj

    def empirical_eta(self):
        return empirical_functional(residual_sequence(self.trajectory(), self.number("R"), "both"), tag="eta-empirical")

    def empirical_step(self):
        return empirical_functional(step_sequence(self.trajectory()), tag="eta-prime-empirical")

    def mu4(self):
        return mu_meta4(
            self.modulus("a"), self.modulus("ell"), self.modulus("A"), self.modulus("P"), self.number("N"), self.number("R")
        )

    def rho_error(self):
        variant = self.word("variant", "divergence-A")
        if variant == "divergence-A":
            mod = self.modulus("A")
        elif variant == "product-Aprime":
            mod = self.product("Aprime")
        else:
            raise BoundError("variant must be divergence-A or product-Aprime")
        return rho_error(variant, mod, self.modulus("E"), self.modulus("Eprime"), self.number("M"))


REGISTRY = {}


def _entry(name, provenance, inputs, args):
    def wrap(fn):
        REGISTRY[name] = Entry(name, provenance, tuple(inputs), tuple(args), fn)
        return fn

    return wrap


@_entry("sigma1", "xu-local/divergence-rate", ("A", "M"), ("k", "n"))
def _sigma1(I, k, n, f):
    return sigma1(I.modulus("A"), I.number("M"))(k, n)


@_entry("sigma2", "xu-local/product-modulus", ("Aprime", "M"), ("k", "n"))
def _sigma2(I, k, n, f):
    return sigma2(I.product("Aprime"), I.number("M"))(k, n)


@_entry("rho1", "xu-rate/divergence-rate", ("A", "B", "C", "D", "M"), ("k",))
def _rho1(I, k, n, f):
    return rho1(I.modulus("A"), I.modulus("B"), I.modulus("C"), I.modulus("D"), I.number("M"))(k)


@_entry("rho2", "xu-rate/product-modulus", ("Aprime", "B", "C", "D", "M"), ("k",))
def _rho2(I, k, n, f):
    return rho2(I.product("Aprime"), I.modulus("B"), I.modulus("C"), I.modulus("D"), I.number("M"))(k)


@_entry("zeta", "boundedness-iteration/zeta", ("N",), ("k", "f"))
def _zeta(I, k, n, f):
    return zeta(I.number("N"))(k, f)


@_entry("w_iterate", "boundedness-iteration/w-orbit", ("N", "times"), ("n", "f"))
def _w(I, k, n, f):
    return w_iterate(I.number("N"), f, I.number("times", 1), start=n)


def _eta_family(I):
    return EtaFamily(
        I.modulus("a"), I.modulus("ell"), I.modulus("r_beta"), I.modulus("r_mu"), I.number("N"),
        chi=empirical_hook(I.trajectory()),
    )


for _stage in ("N1", "N2", "N3", "N4"):

    def _run(I, k, n, f, _stage=_stage):
        return getattr(_eta_family(I), _stage)(k)

    _entry(_stage, "asymptotic-regularity/constant", ("a", "ell", "r_beta", "r_mu", "N"), ("k",))(_run)

_entry("nu", "asymptotic-regularity/nu", ("a", "ell", "r_beta", "r_mu", "N"), ("k",))(
    lambda I, k, n, f: _eta_family(I).nu_value(k)
)

for _stage in EtaFamily.STAGES[1:]:

    def _run(I, k, n, f, _stage=_stage):
        return _eta_family(I).stage(_stage)(k, f)

    _entry(_stage, "asymptotic-regularity/" + _stage, ("a", "ell", "r_beta", "r_mu", "N"), ("k", "f"))(_run)


_TOWER = {
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
}

for _name, _args in _TOWER.items():

    def _run(I, k, n, f, _name=_name):
        D = I.number("D_iter") if "D_iter" in I.overrides else None
        return case_tower(
            _name, I.modulus("a"), I.modulus("ell"), I.modulus("A"), I.modulus("P"), I.number("N"), k=k, n=n, f=f, D=D
        )

    _entry(_name, "relaxed-conditions/case-tower", ("a", "ell", "A", "P", "N"), _args)(_run)


@_entry("mu4", "relaxed-conditions/metastability", ("a", "ell", "A", "P", "N", "R"), ("k", "f"))
def _mu4(I, k, n, f):
    return I.mu4()(k, f)


@_entry("vartheta", "relaxed-conditions/asymptotic-regularity", ("a", "ell", "A", "P", "N", "R"), ("k", "f"))
def _vartheta(I, k, n, f):
    m = I.mu4()
    return vartheta(m, m.tower.M0)(k, f)


@_entry("mu_tilde", "conditional/even-subsequence", ("eta", "N", "R", "A", "t"), ("k", "f"))
def _mu_tilde(I, k, n, f):
    eta = I.functional("eta", I.empirical_eta)
    return mu_tilde(eta, I.number("N"), I.number("R"), I.modulus("A"), I.modulus("t"))(k, f)


@_entry("mu_meta3", "conditional/metastability", ("eta", "etaprime", "N", "R", "A", "t"), ("k", "f"))
def _mu3(I, k, n, f):
    eta = I.functional("eta", I.empirical_eta)
    etap = I.functional("etaprime", I.empirical_step)
    return mu_meta3(eta, etap, I.number("N"), I.number("R"), I.modulus("A"), I.modulus("t"))(k, f)


@_entry("rho_error", "errors/distance-rate", ("variant", "A", "E", "Eprime", "M"), ("k",))
def _rho_error(I, k, n, f):
    return I.rho_error()(k)


@_entry("meta_with_errors", "errors/metastability", ("variant", "A", "E", "Eprime", "M", "a", "ell", "P", "N"), ("k", "f"))
def _meta_err(I, k, n, f):
    return meta_with_errors(I.mu4(), I.rho_error())(k, f)


def _transfer(direction):
    def run(I, k, n, f, what):
        if what == "gamma":
            rho = constant_functional(0)  # the offset map does not depend on rho
        else:
            rho = I.functional("rho", I.mu4) if "rho" in I.overrides else I.mu4()
        gamma, rho_t = halpern_transfer(direction, I.modulus("a"), I.modulus("ell"), I.number("N"), rho)
        return gamma(k) if what == "gamma" else rho_t(k, f)

    return run


for _dir, _label in (("mar->halpern", "mar_halpern"), ("halpern->mar", "halpern_mar")):
    _r = _transfer(_dir)
    _entry("gamma_" + _label, "transfer/" + _dir, ("a", "ell", "N"), ("k",))(
        lambda I, k, n, f, _r=_r: _r(I, k, n, f, "gamma")
    )
    _entry("rho_tilde_" + _label, "transfer/" + _dir, ("a", "ell", "N", "rho"), ("k", "f"))(
        lambda I, k, n, f, _r=_r: _r(I, k, n, f, "rho")
    )


@_entry("combine_meta", "combination/both-orders", ("phi1", "phi2"), ("k", "f"))
def _combine(I, k, n, f):
    return combine_meta(I.functional("phi1"), I.functional("phi2"))(k, f)


@_entry("combine_meta_bar", "combination/one-order", ("phi1", "phi2"), ("k", "f"))
def _combine_bar(I, k, n, f):
    return combine_meta_bar(I.functional("phi1"), I.functional("phi2"))(k, f)


@_entry("parity_merge", "combination/parity", ("psi",), ("k", "f"))
def _parity(I, k, n, f):
    return parity_merge(I.functional("psi"))(k, f)


def names():
    return sorted(REGISTRY)


def evaluate(name, scenario, k=0, n=0, f=None, overrides=None):
    """Evaluate the named rate; returns ``(Nat, details)``."""
    if name not in REGISTRY:
        raise BoundError("unknown rate %r (known: %s)" % (name, ", ".join(names())))
    entry = REGISTRY[name]
    f = identity() if f is None else f
    if not isinstance(f, Counterfunction):
        raise BoundError("f must be a counterfunction")
    I = Inputs(scenario, overrides or {})
    value = entry.run(I, nat(k), nat(n), f)
    args = {a: (f.name if a == "f" else int({"k": k, "n": n}[a])) for a in entry.args}
    return nat(value), {"name": name, "provenance": entry.provenance, "args": args, "inputs": dict(I.used)}
