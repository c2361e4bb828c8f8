"""Parameter and error sequences with their quantitative moduli.

A *family* is a closed-form sequence (harmonic, constant, power, decaying,
or an explicit table followed by a tail family) that knows its own moduli:

* ``rate_zero``: ``a(k)`` with ``term(n) <= 1/(k+1)`` for ``n >= a(k)``
* ``divergence``: ``A(k)`` with ``sum_{i <= A(k)+n} term(i) >= k``
* ``product``: ``A'(m, k)`` with ``prod_{i=m}^{A'(m,k)} (1 - term(i)) <= 1/(k+1)``
* ``inv_upper``: ``U(n) >= 1/term(n)``, nondecreasing
* for step-size families: a positive ``lower`` bound, an upper bound
  ``upper(n)`` and a rate ``ratio_rate`` for ``term(n+1)/term(n) -> 1``.

A :class:`ScheduleBundle` collects the four sequences and the moduli derived
from them.  :func:`validate_moduli` refutes declared moduli on a finite
prefix; it can never prove them.
"""

import dataclasses
import math
import re
from fractions import Fraction

import numpy as np

from .nat import Nat, ceil_ln, ceil_exp, ceil_log2, ceil_root, nat, nat_max, nat_min
from .rates.counterfunctions import BiCounterfunction, Counterfunction, constant

__all__ = [
    "Family",
    "Harmonic",
    "Constant",
    "Power",
    "Decaying",
    "Table",
    "Shifted",
    "parse_family",
    "ScheduleBundle",
    "make_bundle",
    "builtin",
    "evaluate",
    "shifted_bundle",
    "Violation",
    "validate_moduli",
    "check_monotone_moduli",
    "ErrorSchedule",
    "zero_errors",
    "halving_errors",
    "validate_errors",
]


def _frac(x):
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        return Fraction(repr(x))
    return Fraction(str(x).strip())


def _ceil(q):
    return -((-q.numerator) // q.denominator)


class Family:
    """Base class; subclasses fill in the closed forms they support."""

    name = "family"

    def term(self, n):
        raise NotImplementedError

    def terms(self, n0, n1):
        return np.array([self.term(n) for n in range(n0, n1)], dtype=float)

    def rate_zero(self):
        return None

    def divergence(self):
        return None

    def product(self):
        return None

    def inv_upper(self):
        return None

    def lower(self):
        return None

    def upper(self):
        return None

    def ratio_rate(self):
        return None

    def check_unit_interval(self):
        pass

    def __repr__(self):
        return self.name


class Harmonic(Family):
    """``1/(n+1+p)``, ``p > 0``."""

    def __init__(self, p=1):
        self.p = _frac(p)
        if self.p <= 0:
            raise ValueError("harmonic(p) needs p > 0")
        self.name = "harmonic(%s)" % self.p
        self._pf = float(self.p)

    def term(self, n):
        return 1.0 / (n + 1 + self._pf)

    def terms(self, n0, n1):
        return 1.0 / (np.arange(n0, n1, dtype=float) + 1.0 + self._pf)

    def rate_zero(self):
        return Counterfunction(lambda k: k, name="k", monotone=True, key=("id",), affine=(1, 0))

    def divergence(self):
        # sum_{i<=m} 1/(i+1+p) >= ln((m+2+p)/(1+p)), so m >= (1+p) e^k suffices
        s = max(1, int(ceil_ln(_ceil(1 + self.p))))
        return Counterfunction(lambda k: ceil_exp(k + s), name="A_harm", monotone=True, key=("A_harm", s))

    def product(self):
        # telescoping: prod_{i=m}^{n} (i+p)/(i+1+p) = (m+p)/(n+1+p)
        p = self.p

        def rule(m, k):
            if m.is_top or k.is_top:
                return Nat.top(_ceil((m.lo + p) * (k.lo + 1)))
            return Nat.exact(_ceil((m.value + p) * (k.value + 1)))

        return BiCounterfunction(rule, name="A'_harm", monotone=True, key=("Ap_harm", p))

    def inv_upper(self):
        p = self.p
        return Counterfunction.from_int(lambda n: _ceil(n + 1 + p), name="U_harm", monotone=True, key=("U_harm", p))

    def check_unit_interval(self):
        pass


class Constant(Family):
    """``c`` for all ``n``."""

    def __init__(self, c):
        self.c = _frac(c)
        if self.c <= 0:
            raise ValueError("constant(c) needs c > 0")
        self.name = "constant(%s)" % self.c
        self._cf = float(self.c)

    def term(self, n):
        return self._cf

    def terms(self, n0, n1):
        return np.full(max(n1 - n0, 0), self._cf)

    def check_unit_interval(self):
        if not self.c < 1:
            raise ValueError("constant(c) as an averaging weight needs c < 1")

    def divergence(self):
        c = self.c
        return Counterfunction.from_int(lambda k: _ceil(k / c), name="A_const", monotone=True, key=("A_const", c))

    def _steps(self, k):
        # least j with (1/(1-c))^j >= k+1
        num, den = (1 - self.c).denominator, (1 - self.c).numerator
        target = k + 1
        if target <= 1:
            return 0
        j = max(int(math.log(target) / math.log(num / den)) - 1, 0)
        while num**j < target * den**j:
            j += 1
        while j > 0 and num ** (j - 1) >= target * den ** (j - 1):
            j -= 1
        return j

    def product(self):
        self.check_unit_interval()

        def rule(m, k):
            if m.is_top or k.is_top:
                return Nat.top(m.lo + max(self._steps(k.lo) - 1, 0))
            return Nat.exact(m.value + max(self._steps(k.value) - 1, 0))

        return BiCounterfunction(rule, name="A'_const", monotone=True, key=("Ap_const", self.c))

    def inv_upper(self):
        return constant(_ceil(1 / self.c))

    def lower(self):
        return self.c

    def upper(self):
        return constant(_ceil(self.c))

    def ratio_rate(self):
        return constant(0)


class Power(Family):
    """``(n+2)^(-q)`` with rational ``0 < q <= 1``."""

    def __init__(self, q):
        self.q = _frac(q)
        if not 0 < self.q <= 1:
            raise ValueError("power(q) needs 0 < q <= 1")
        self.name = "power(%s)" % self.q
        self._qf = float(self.q)
        self._s, self._t = self.q.numerator, self.q.denominator
        self._harm = Harmonic(1) if self.q == 1 else None

    def term(self, n):
        return (n + 2.0) ** (-self._qf)

    def terms(self, n0, n1):
        return (np.arange(n0, n1, dtype=float) + 2.0) ** (-self._qf)

    def rate_zero(self):
        if self._harm:
            return self._harm.rate_zero()
        s, t = self._s, self._t
        # (n+2)^(s/t) >= k+1  <=>  (n+2)^s >= (k+1)^t
        return Counterfunction.from_int(
            lambda k: max(ceil_root((k + 1) ** t, 1, s) - 2, 0), name="a_pow", monotone=True, key=("a_pow", s, t)
        )

    def _root_minus(self, X, offset):
        # least m >= 0 with (m + offset)^(1-q) >= X, X rational
        s, t = self._s, self._t
        Xt = X**t
        return max(ceil_root(Xt.numerator, Xt.denominator, t - s) - offset, 0)

    def divergence(self):
        if self._harm:
            return self._harm.divergence()
        q = self.q
        # sum_{i<=m} (i+2)^-q >= ((m+3)^(1-q) - 2^(1-q))/(1-q); ask (m+3)^(1-q) >= (1-q)k + 2
        return Counterfunction.from_int(
            lambda k: self._root_minus((1 - q) * k + 2, 3), name="A_pow", monotone=True, key=("A_pow", q)
        )

    def product(self):
        if self._harm:
            return self._harm.product()
        q = self.q

        def value(m, k):
            L = int(ceil_ln(k + 1))
            # sum_{i=m}^{n} (i+2)^-q >= ((n+3)^(1-q) - (m+2)^(1-q))/(1-q) >= L
            return max(self._root_minus((1 - q) * L + m + 2, 3), m)

        def rule(m, k):
            if m.is_top or k.is_top:
                return Nat.top(value(m.lo, k.lo))
            return Nat.exact(value(m.value, k.value))

        return BiCounterfunction(rule, name="A'_pow", monotone=True, key=("Ap_pow", q))

    def inv_upper(self):
        s, t = self._s, self._t
        return Counterfunction.from_int(
            lambda n: ceil_root((n + 2) ** s, 1, t), name="U_pow", monotone=True, key=("U_pow", s, t)
        )


class Decaying(Family):
    """``c + d/(n+1)`` with ``c > 0``, ``d >= 0``; a step-size family."""

    def __init__(self, c, d):
        self.c, self.d = _frac(c), _frac(d)
        if self.c <= 0 or self.d < 0:
            raise ValueError("decaying(c, d) needs c > 0 and d >= 0")
        self.name = "decaying(%s,%s)" % (self.c, self.d)

    def term(self, n):
        return float(self.c) + float(self.d) / (n + 1)

    def terms(self, n0, n1):
        return float(self.c) + float(self.d) / (np.arange(n0, n1, dtype=float) + 1.0)

    def check_unit_interval(self):
        raise ValueError("decaying(c, d) is a step-size family only")

    def lower(self):
        return self.c

    def upper(self):
        return constant(_ceil(self.c + self.d))

    def ratio_rate(self):
        c, d = self.c, self.d
        # |b_{n+1}/b_n - 1| <= d/((n+1)^2 c) <= 1/(k+1) once (n+1)^2 >= d(k+1)/c
        def fn(k):
            x = d * (k + 1) / c
            return max(ceil_root(x.numerator, x.denominator, 2) - 1, 0)

        return Counterfunction.from_int(fn, name="r_dec", monotone=True, key=("r_dec", c, d))


class Table(Family):
    """Explicit prefix ``values`` followed by the tail family ``tail``
    (indexed globally, so index ``n >= len(values)`` gives ``tail.term(n)``)."""

    def __init__(self, values, tail):
        self.values = [_frac(v) for v in values]
        if not self.values or any(v <= 0 for v in self.values):
            raise ValueError("table entries must be positive")
        self.tail = tail
        self.L = len(self.values)
        self.name = "table[%d]+%s" % (self.L, tail.name)
        self._vf = np.array([float(v) for v in self.values])

    def term(self, n):
        return float(self._vf[n]) if n < self.L else self.tail.term(n)

    def terms(self, n0, n1):
        out = np.empty(max(n1 - n0, 0))
        if out.size == 0:
            return out
        split = min(max(self.L, n0), n1)
        out[: split - n0] = self._vf[n0:split]
        out[split - n0 :] = self.tail.terms(split, n1)
        return out

    def check_unit_interval(self):
        if any(v >= 1 for v in self.values):
            raise ValueError("table entries must lie in (0, 1)")
        self.tail.check_unit_interval()

    def rate_zero(self):
        base = self.tail.rate_zero()
        if base is None:
            return None
        L = self.L
        return Counterfunction(lambda k: nat_max(base(k), L), name="a_tab", monotone=True, key=("a_tab", L, base.key))

    def divergence(self):
        base = self.tail.divergence()
        if base is None:
            return None
        # one extra unit absorbs float rounding in the head sum
        head = _ceil(sum(Fraction(repr(float(x))) for x in self.tail.terms(0, self.L))) + 1
        return Counterfunction(lambda k: base(k + head), name="A_tab", monotone=True, key=("A_tab", head, base.key))

    def product(self):
        base = self.tail.product()
        if base is None:
            return None
        L = self.L
        return BiCounterfunction(lambda m, k: base(nat_max(m, L), k), name="A'_tab", monotone=True, key=("Ap_tab", L, base.key))

    def inv_upper(self):
        base = self.tail.inv_upper()
        if base is None:
            return None
        prefix = []
        best = 0
        for v in self.values:
            best = max(best, _ceil(1 / v))
            prefix.append(best)
        L = self.L

        def rule(n):
            if not n.is_top and n.value < L:
                return nat_max(prefix[n.value], base(n))
            return nat_max(prefix[-1], base(n))

        return Counterfunction(rule, name="U_tab", monotone=True, key=("U_tab", tuple(prefix), base.key))

    def lower(self):
        base = self.tail.lower()
        return None if base is None else min(min(self.values), base)

    def upper(self):
        base = self.tail.upper()
        if base is None:
            return None
        top = _ceil(max(self.values))
        return Counterfunction(lambda n: nat_max(base(n), top), name="t_tab", monotone=True, key=("t_tab", top, base.key))

    def ratio_rate(self):
        base = self.tail.ratio_rate()
        if base is None:
            return None
        L = self.L
        return Counterfunction(lambda k: nat_max(base(k), L), name="r_tab", monotone=True, key=("r_tab", L, base.key))


class Shifted(Family):
    """``base.term(n + 1)``, with moduli transported accordingly."""

    def __init__(self, base):
        self.base = base
        self.name = "shift(%s)" % base.name

    def term(self, n):
        return self.base.term(n + 1)

    def terms(self, n0, n1):
        return self.base.terms(n0 + 1, n1 + 1)

    def check_unit_interval(self):
        self.base.check_unit_interval()

    def rate_zero(self):
        a = self.base.rate_zero()
        return None if a is None else Counterfunction(lambda k: a(k) - 1, name="a-1", monotone=True, key=("sh_a", a.key))

    def divergence(self):
        # the dropped first term is below 1
        A = self.base.divergence()
        return None if A is None else Counterfunction(lambda k: A(k + 1), name="A(k+1)", monotone=True, key=("sh_A", A.key))

    def product(self):
        Ap = self.base.product()
        if Ap is None:
            return None
        return BiCounterfunction(lambda m, k: Ap(m + 1, k) - 1, name="A'(m+1,k)-1", monotone=True, key=("sh_Ap", Ap.key))

    def inv_upper(self):
        U = self.base.inv_upper()
        return None if U is None else Counterfunction(lambda n: U(n + 1), name="U(n+1)", monotone=True, key=("sh_U", U.key))

    def lower(self):
        return self.base.lower()

    def upper(self):
        t = self.base.upper()
        return None if t is None else Counterfunction(lambda n: t(n + 1), name="t(n+1)", monotone=True, key=("sh_t", t.key))

    def ratio_rate(self):
        r = self.base.ratio_rate()
        return None if r is None else Counterfunction(lambda k: r(k) - 1, name="r-1", monotone=True, key=("sh_r", r.key))


_FAMILIES = {"harmonic": Harmonic, "constant": Constant, "power": Power, "decaying": Decaying}
_SPEC = re.compile(r"^\s*([a-z_]+)\s*(?:\((.*)\))?\s*$")


def parse_family(spec):
    """Build a family from ``"harmonic(1)"``, ``("power", "1/2")``, a
    ``{"table": [...], "tail": spec}`` mapping, or a Family instance."""
    if isinstance(spec, Family):
        return spec
    if isinstance(spec, dict):
        if "table" not in spec:
            raise ValueError("table family needs a 'table' entry")
        return Table(spec["table"], parse_family(spec.get("tail", "harmonic(1)")))
    if isinstance(spec, (tuple, list)):
        name, params = spec[0], list(spec[1:])
    else:
        m = _SPEC.match(str(spec))
        if not m:
            raise ValueError("cannot parse family %r" % (spec,))
        name = m.group(1)
        params = [p for p in (m.group(2) or "").split(",") if p.strip()]
    if name not in _FAMILIES:
        raise ValueError("unknown family %r" % (name,))
    return _FAMILIES[name](*params)


@dataclasses.dataclass(frozen=True)
class ScheduleBundle:
    """The four parameter sequences and their moduli.

    ``A_series`` names the series (``"alpha"`` or ``"lambda"``) certified by
    ``A`` and ``Aprime``.  Moduli a family cannot supply are ``None``.
    """

    alpha: Family
    lam: Family
    beta: Family
    mu: Family
    R: int
    t: Counterfunction
    a: Counterfunction = None
    ell: Counterfunction = None
    A: Counterfunction = None
    A_series: str = "alpha"
    Aprime: BiCounterfunction = None
    r_beta: Counterfunction = None
    r_mu: Counterfunction = None
    P: Counterfunction = None

    def family(self, which):
        key = {"alpha": "alpha", "lambda": "lam", "lam": "lam", "beta": "beta", "mu": "mu"}.get(which)
        if key is None:
            raise ValueError("unknown sequence %r" % (which,))
        return getattr(self, key)

    def eval(self, which, n):
        return self.family(which).term(int(n))

    def terms(self, which, n0, n1):
        return self.family(which).terms(n0, n1)

    def require(self, *names):
        missing = [n for n in names if getattr(self, n) is None]
        if missing:
            raise ValueError("schedule lacks moduli: %s" % ", ".join(missing))

    def describe(self):
        return {
            "alpha": self.alpha.name,
            "lambda": self.lam.name,
            "beta": self.beta.name,
            "mu": self.mu.name,
            "R": self.R,
            "A_series": self.A_series,
        }


def evaluate(bundle, which, n):
    return bundle.eval(which, n)


def make_bundle(alpha, lam=None, beta="constant(1)", mu=None, **overrides):
    """Derive a bundle from families (or family specs); keyword overrides
    replace any derived modulus."""
    alpha = parse_family(alpha)
    lam = alpha if lam is None else parse_family(lam)
    beta = parse_family(beta)
    mu = beta if mu is None else parse_family(mu)
    alpha.check_unit_interval()
    lam.check_unit_interval()
    lows = [beta.lower(), mu.lower()]
    if any(x is None or x <= 0 for x in lows):
        raise ValueError("step sizes must be bounded away from zero")
    R = _ceil(1 / min(lows))
    tb, tm = beta.upper(), mu.upper()
    t = Counterfunction(lambda n: nat_max(tb(n), tm(n)), name="t", monotone=True, key=("t", tb.key, tm.key))
    A, series, Ap = alpha.divergence(), "alpha", alpha.product()
    if A is None:
        A, series, Ap = lam.divergence(), "lambda", lam.product()
    Ua, Ul = alpha.inv_upper(), lam.inv_upper()
    P = None
    if Ua is not None and Ul is not None:
        P = Counterfunction(lambda n: nat_min(Ua(n), Ul(n)), name="P", monotone=True, key=("P", Ua.key, Ul.key))
    fields = dict(
        alpha=alpha,
        lam=lam,
        beta=beta,
        mu=mu,
        R=R,
        t=t,
        a=alpha.rate_zero(),
        ell=lam.rate_zero(),
        A=A,
        A_series=series,
        Aprime=Ap,
        r_beta=beta.ratio_rate(),
        r_mu=mu.ratio_rate(),
        P=P,
    )
    if "lambda_" in overrides:
        overrides["lam"] = overrides.pop("lambda_")
    fields.update(overrides)
    return ScheduleBundle(**fields)


def builtin(family="harmonic", *params, beta="constant(1)", mu=None):
    """Bundle with ``alpha = lambda = family(*params)`` and the given step sizes."""
    if not params and "(" in str(family):
        spec = family
    else:
        spec = (family,) + tuple(params if params else ((1,) if family == "harmonic" else ()))
    fam = parse_family(spec)
    return make_bundle(fam, fam, beta, mu)


def shifted_bundle(bundle, alpha=None, lam=None, beta=None, mu=None):
    """New bundle from families of ``bundle`` (by name, optionally shifted).

    Each argument is ``"<name>"`` or ``"<name>+1"``; used to build the
    parameter sets of the orbit translations.
    """

    def pick(spec):
        name, _, shifted = spec.partition("+")
        fam = bundle.family(name)
        return Shifted(fam) if shifted else fam

    return make_bundle(pick(alpha), pick(lam), pick(beta), pick(mu))


@dataclasses.dataclass(frozen=True)
class Violation:
    modulus: str
    k: int
    n: int
    detail: str


def _int_or_none(x, horizon):
    x = nat(x)
    if x.is_top or x.value > horizon:
        return None
    return x.value


def validate_moduli(bundle, horizon=10_000, k_max=10, rtol=1e-12):
    """Finite-prefix refutation of every declared modulus and pointwise
    condition; returns the list of violations found (empty if none)."""
    H = int(horizon)
    out = []
    al = bundle.alpha.terms(0, H + 1)
    la = bundle.lam.terms(0, H + 1)
    be = bundle.beta.terms(0, H + 2)
    mu = bundle.mu.terms(0, H + 2)
    for name, seq in (("alpha", al), ("lambda", la)):
        bad = np.nonzero(~((seq > 0) & (seq < 1)))[0]
        if bad.size:
            out.append(Violation(name, -1, int(bad[0]), "term %.17g outside (0,1)" % float(seq[bad[0]])))
    for name, seq in (("beta", be), ("mu", mu)):
        bad = np.nonzero(~(seq > 0))[0]
        if bad.size:
            out.append(Violation(name, -1, int(bad[0]), "term %.17g not positive" % float(seq[bad[0]])))
    for name, seq in (("a", al), ("ell", la)):
        mod = getattr(bundle, name)
        if mod is None:
            continue
        for k in range(k_max + 1):
            start = _int_or_none(mod(k), H)
            if start is None:
                continue
            bad = np.nonzero(seq[start:] * (k + 1) > 1 + rtol)[0]
            if bad.size:
                n = start + int(bad[0])
                out.append(Violation(name, k, n, "term %.17g > 1/%d" % (float(seq[n]), k + 1)))
    series = al if bundle.A_series == "alpha" else la
    if bundle.A is not None:
        csum = np.cumsum(series)
        for k in range(k_max + 1):
            start = _int_or_none(bundle.A(k), H)
            if start is None:
                continue
            bad = np.nonzero(csum[start:] < k * (1 - rtol))[0]
            if bad.size:
                n = int(bad[0])
                out.append(Violation("A", k, n, "partial sum %.17g < %d" % (float(csum[start + n]), k)))
    if bundle.Aprime is not None:
        logs = np.concatenate([[0.0], np.cumsum(np.log1p(-series))])
        for k in range(k_max + 1):
            bound = math.log(1.0 / (k + 1)) + 1e-9
            for m in range(H + 1):
                end = _int_or_none(bundle.Aprime(m, k), H)
                if end is None:
                    break
                if end < m:
                    out.append(Violation("Aprime", k, m, "A'(m,k)=%d < m" % end))
                    continue
                if logs[end + 1] - logs[m] > bound:
                    out.append(Violation("Aprime", k, m, "product %r > 1/%d" % (math.exp(logs[end + 1] - logs[m]), k + 1)))
                    break
    lo = 1.0 / bundle.R
    bad = np.nonzero(np.minimum(be[: H + 1], mu[: H + 1]) < lo * (1 - rtol))[0]
    if bad.size:
        out.append(Violation("R", -1, int(bad[0]), "min step below 1/R"))
    tvals = np.array([float(min(int(v) if not v.is_top else 2**1000, 2**1000)) for v in bundle.t.values(H)])
    bad = np.nonzero(np.maximum(be[: H + 1], mu[: H + 1]) > tvals * (1 + rtol))[0]
    if bad.size:
        out.append(Violation("t", -1, int(bad[0]), "max step above t(n)"))
    for name, seq in (("r_beta", be), ("r_mu", mu)):
        mod = getattr(bundle, name)
        if mod is None:
            continue
        ratio = np.abs(seq[1:] / seq[:-1] - 1.0)
        for k in range(k_max + 1):
            start = _int_or_none(mod(k), H)
            if start is None:
                continue
            bad = np.nonzero(ratio[start : H + 1] * (k + 1) > 1 + rtol)[0]
            if bad.size:
                out.append(Violation(name, k, start + int(bad[0]), "ratio deviation above 1/%d" % (k + 1)))
    if bundle.P is not None:
        pvals = np.array([float(int(v)) if not v.is_top else np.inf for v in bundle.P.values(H)])
        bad = np.nonzero((al + la) * pvals < 1 - rtol)[0]
        if bad.size:
            out.append(Violation("P", -1, int(bad[0]), "alpha+lambda below 1/P(n)"))
    return out


def check_monotone_moduli(bundle, upto=1000, k_grid=10):
    """Pointwise nondecreasing check of every attached modulus on ``[0, upto]``."""
    out = []
    for name in ("t", "a", "ell", "A", "r_beta", "r_mu", "P"):
        mod = getattr(bundle, name)
        if mod is None:
            continue
        prev = None
        for n in range(upto + 1):
            v = mod(n)
            if prev is not None and v < prev:
                out.append(Violation(name, -1, n, "decreases at %d" % n))
                break
            prev = v
    if bundle.Aprime is not None:
        for k in range(k_grid + 1):
            prev = None
            for m in range(upto + 1):
                v = bundle.Aprime(m, k)
                if prev is not None and v < prev:
                    out.append(Violation("Aprime", k, m, "decreases in m"))
                    break
                if k > 0 and v < bundle.Aprime(m, k - 1):
                    out.append(Violation("Aprime", k, m, "decreases in k"))
                    break
                prev = v
    return out


# -- errors ------------------------------------------------------------------


@dataclasses.dataclass(frozen=True)
class ErrorSchedule:
    """Error vectors ``e(n)``, ``eprime(n)`` with Cauchy rates ``E``, ``Eprime``
    for their norm series and the constant ``M``."""

    dim: int
    e: object
    eprime: object
    E: Counterfunction
    Eprime: Counterfunction
    M: int
    norm_e: object = None
    norm_eprime: object = None
    name: str = "errors"

    @property
    def is_zero(self):
        return self.name == "zero"


def zero_errors(dim):
    z = np.zeros(dim)
    return ErrorSchedule(
        dim=dim,
        e=lambda n: z,
        eprime=lambda n: z,
        E=constant(0),
        Eprime=constant(0),
        M=1,
        norm_e=lambda n: 0.0,
        norm_eprime=lambda n: 0.0,
        name="zero",
    )


def halving_errors(direction, direction_prime=None, scale=1):
    """``e_n = scale * 2^-n * d/|d|`` (and likewise ``e'_n``).

    The tail after index ``E`` sums to at most ``scale * 2^-E``, so
    ``E(k) = ceil(log2(ceil(scale (k+1))))`` is a Cauchy rate.
    """
    d = np.asarray(direction, dtype=float)
    dp = d if direction_prime is None else np.asarray(direction_prime, dtype=float)
    s = _frac(scale)
    if s < 0:
        raise ValueError("scale must be nonnegative")

    def unit(v):
        nv = float(np.linalg.norm(v))
        return v / nv if nv > 0 else np.zeros_like(v)

    u, up = unit(d), unit(dp)
    sf = float(s)
    E = Counterfunction.from_int(
        lambda k: ceil_log2(_ceil(s * (k + 1))), name="E_half", monotone=True, key=("E_half", s)
    )
    has_e = bool(np.any(u))
    has_ep = bool(np.any(up))
    Ee = E if has_e else constant(0)
    Ep = E if has_ep else constant(0)
    # exact partial sums of the norms: s (2 - 2^-E(1))
    e1, ep1 = int(Ee(1)), int(Ep(1))
    total = (s * (2 - Fraction(1, 2**e1)) if has_e else 0) + (s * (2 - Fraction(1, 2**ep1)) if has_ep else 0)
    M = _ceil(Fraction(total) + 1)
    return ErrorSchedule(
        dim=d.size,
        e=lambda n: sf * 2.0**-n * u,
        eprime=lambda n: sf * 2.0**-n * up,
        E=Ee,
        Eprime=Ep,
        M=M,
        norm_e=(lambda n: sf * 2.0**-n) if has_e else (lambda n: 0.0),
        norm_eprime=(lambda n: sf * 2.0**-n) if has_ep else (lambda n: 0.0),
        name="halving",
    )


def validate_errors(errors, horizon=2000, k_max=10):
    """Refute the Cauchy rates and ``M`` on a finite prefix."""
    out = []
    for name, rate, norm in (("E", errors.E, errors.norm_e), ("Eprime", errors.Eprime, errors.norm_eprime)):
        norms = np.array([norm(i) for i in range(horizon + 1)])
        for k in range(k_max + 1):
            start = _int_or_none(rate(k), horizon)
            if start is None:
                continue
            tail = float(np.sum(norms[start + 1 :]))
            if tail > 1.0 / (k + 1) + 1e-15:
                out.append(Violation(name, k, start, "tail sum %r > 1/%d" % (tail, k + 1)))
    head = sum(errors.norm_e(i) for i in range(int(errors.E(1)) + 1))
    head += sum(errors.norm_eprime(i) for i in range(int(errors.Eprime(1)) + 1))
    if errors.M < head + 1 - 1e-12:
        out.append(Violation("M", 1, -1, "M below the partial sums plus one"))
    return out
