"""Saturating arbitrary-precision naturals.

A :class:`Nat` is either an exact natural number no larger than the
configured cap, or the saturation mark ``TOP`` standing for "at least the
cap".  Every saturated value carries a verified lower bound ``lo`` so that
reports can show how large the hidden value is known to be.

Arithmetic follows the top-element algebra used for bound domination:
sums, products, maxima and function applications absorb ``TOP``; monus
``TOP - x`` stays ``TOP``; ``x - TOP`` is ``0``; ``min(TOP, x)`` is ``x``.

The cap defaults to ``10**4000`` and can be overridden with the
``RESMETA_CAP`` environment variable (an integer literal, ``10^k`` or
``1e k`` form).
"""

import contextlib
import decimal
import functools
import math
import os
import threading

__all__ = [
    "Nat",
    "TOP",
    "get_cap",
    "set_cap",
    "cap_context",
    "parse_cap",
    "nat",
    "nat_max",
    "nat_min",
    "ceil_ln",
    "ceil_exp",
    "ceil_log2",
    "ceil_root",
]

DEFAULT_CAP = 10**4000

_cap_lock = threading.Lock()


def parse_cap(text):
    """Parse a cap given as ``123``, ``10^40`` or ``1e40``."""
    text = str(text).strip().replace("_", "")
    if "^" in text:
        base, exp = text.split("^", 1)
        value = int(base) ** int(exp)
    elif "e" in text.lower() and not text.lower().startswith("0x"):
        mant, exp = text.lower().split("e", 1)
        value = int(mant) * 10 ** int(exp)
    else:
        value = int(text)
    if value < 1:
        raise ValueError("cap must be a positive integer, got %r" % text)
    return value


_CAP = parse_cap(os.environ["RESMETA_CAP"]) if os.environ.get("RESMETA_CAP") else DEFAULT_CAP


def get_cap():
    return _CAP


def set_cap(value):
    """Set the global saturation cap and return the previous one."""
    global _CAP
    value = parse_cap(value) if not isinstance(value, int) else value
    if value < 1:
        raise ValueError("cap must be positive")
    with _cap_lock:
        old, _CAP = _CAP, value
    return old


@contextlib.contextmanager
def cap_context(value):
    old = set_cap(value)
    try:
        yield get_cap()
    finally:
        set_cap(old)


class Nat:
    """Exact natural number or the saturation mark.

    Use :func:`nat` to build values; ``Nat.top(lo)`` builds a saturated value
    with lower bound ``lo``.
    """

    __slots__ = ("_value", "lo")

    def __init__(self, value, lo):
        self._value = value
        self.lo = lo

    @classmethod
    def exact(cls, value):
        value = int(value)
        if value < 0:
            raise ValueError("naturals are nonnegative, got %d" % value)
        cap = _CAP
        if value > cap:
            return cls(None, cap)
        return cls(value, value)

    @classmethod
    def top(cls, lo=0):
        lo = int(lo)
        cap = _CAP
        return cls(None, min(max(lo, 0), cap))

    @property
    def is_top(self):
        return self._value is None

    @property
    def certified(self):
        """True when the value is exact or its lower bound reaches the cap."""
        return self._value is not None or self.lo >= _CAP

    @property
    def value(self):
        if self._value is None:
            raise ValueError("saturated value has no exact representation")
        return self._value

    def __int__(self):
        return self.value

    def __index__(self):
        return self.value

    def __repr__(self):
        if self._value is None:
            return "Nat(TOP, lo=%s)" % _short(self.lo)
        return "Nat(%s)" % _short(self._value)

    def __str__(self):
        return "⊤" if self._value is None else str(self._value)

    @property
    def key(self):
        return (self._value, self.lo)

    # ordering with TOP as the top element
    def __eq__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self._value == other._value

    def __hash__(self):
        return hash(self._value)

    def __le__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if other._value is None:
            return True
        if self._value is None:
            return False
        return self._value <= other._value

    def __lt__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if self._value is None:
            return False
        if other._value is None:
            return True
        return self._value < other._value

    def __ge__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other <= self

    def __gt__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other < self

    def __add__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if self._value is None or other._value is None:
            return Nat.top(self.lo + other.lo)
        return Nat.exact(self._value + other._value)

    __radd__ = __add__

    def __mul__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if self._value == 0 or other._value == 0:
            return Nat.exact(0)
        if self._value is None or other._value is None:
            return Nat.top(self.lo * other.lo)
        return Nat.exact(self._value * other._value)

    __rmul__ = __mul__

    def __sub__(self, other):
        """Monus: ``max(a - b, 0)``."""
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if self._value is None:
            if other._value is None:
                return Nat.top(0)
            return Nat.top(max(self.lo - other._value, 0))
        if other._value is None:
            return Nat.exact(0)
        return Nat.exact(max(self._value - other._value, 0))

    def __rsub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other - self

    def __pow__(self, exponent):
        exponent = int(exponent)
        if exponent < 0:
            raise ValueError("negative exponent")
        if exponent == 0:
            return Nat.exact(1)
        if self._value is None:
            return Nat.top(_clamped_pow(self.lo, exponent))
        if self._value <= 1:
            return Nat.exact(self._value)
        if (self._value.bit_length() - 1) * exponent > _CAP.bit_length() + 1:
            return Nat.top(_CAP)
        return Nat.exact(self._value**exponent)


def _clamped_pow(base, exponent):
    if base <= 1:
        return base
    if (base.bit_length() - 1) * exponent > _CAP.bit_length() + 1:
        return _CAP
    return min(base**exponent, _CAP)


def _short(value):
    if value.bit_length() > 130:
        return "~2^%d" % (value.bit_length() - 1)
    return str(value)


def _coerce(x):
    if isinstance(x, Nat):
        return x
    if isinstance(x, bool):
        return NotImplemented
    if isinstance(x, int):
        return Nat.exact(x)
    return NotImplemented


def nat(x):
    """Convert an int or Nat to Nat."""
    if isinstance(x, Nat):
        return x
    if isinstance(x, bool):
        raise TypeError("bool is not a natural number")
    if isinstance(x, int):
        return Nat.exact(x)
    if hasattr(x, "__index__"):
        return Nat.exact(x.__index__())
    raise TypeError("cannot convert %r to Nat" % (x,))


TOP = Nat.top(0)


def nat_max(*values):
    values = [nat(v) for v in values]
    if any(v.is_top for v in values):
        return Nat.top(max(v.lo for v in values))
    return Nat.exact(max(v.value for v in values))


def nat_min(*values):
    values = [nat(v) for v in values]
    exact = [v for v in values if not v.is_top]
    if exact:
        return min(exact, key=lambda v: v.value)
    return Nat.top(min(v.lo for v in values))


# -- certified logarithms and exponentials ----------------------------------


def _ulp(d, prec):
    return decimal.Decimal(1).scaleb(d.adjusted() - prec + 1)


@functools.lru_cache(maxsize=4096)
def _ceil_ln_int(x):
    if x <= 1:
        return 0
    dx = decimal.Decimal(x)
    prec = 40
    while True:
        ctx = decimal.Context(prec=prec, rounding=decimal.ROUND_HALF_EVEN)
        r = ctx.ln(dx)
        # correctly rounded: true value within one ulp of r
        u = _ulp(r, prec)
        lo, hi = r - u, r + u
        j = int(hi.to_integral_value(rounding=decimal.ROUND_CEILING))
        if j - 1 < lo:
            return j
        prec *= 2
        if prec > 200000:
            raise ArithmeticError("could not separate ln(%d) from an integer" % x)


def ceil_ln(x):
    """Least natural ``j`` with ``e**j >= x`` (``0`` for ``x <= 1``)."""
    x = nat(x)
    if x.is_top:
        return Nat.top(_ceil_ln_int(x.lo))
    return Nat.exact(_ceil_ln_int(x.value))


@functools.lru_cache(maxsize=4096)
def _ceil_exp_int(j):
    if j == 0:
        return 1
    prec = int(j / math.log(10)) + 30
    while True:
        ctx = decimal.Context(prec=prec, rounding=decimal.ROUND_HALF_EVEN)
        r = ctx.exp(decimal.Decimal(j))
        u = _ulp(r, prec)
        lo = int((r - u).to_integral_value(rounding=decimal.ROUND_FLOOR))
        hi = int((r + u).to_integral_value(rounding=decimal.ROUND_FLOOR))
        if lo == hi:
            # e**j is irrational for j > 0, so the ceiling is floor + 1
            return lo + 1
        prec += 30


@functools.lru_cache(maxsize=8)
def _ln_cap_threshold(cap):
    return _ceil_ln_int(cap)


def ceil_exp(j):
    """``ceil(e**j)`` as a Nat, saturating once ``e**j`` exceeds the cap."""
    j = nat(j)
    threshold = _ln_cap_threshold(_CAP)
    if not j.is_top and j.value < threshold:
        return Nat.exact(_ceil_exp_int(j.value))
    # e**threshold > cap, so everything from here on saturates
    if j.is_top and j.lo < threshold:
        return Nat.top(_ceil_exp_int(j.lo))
    return Nat.top(_CAP)


def ceil_log2(x):
    """Least natural ``j`` with ``2**j >= x``."""
    x = nat(x)
    if x.is_top:
        return Nat.top(max(x.lo - 1, 0).bit_length())
    return Nat.exact(max(x.value - 1, 0).bit_length())


def ceil_root(num, den, r):
    """Least natural ``m`` with ``m**r >= num/den`` (exact integers)."""
    if num <= 0:
        return 0
    if r == 1:
        return -(-num // den)
    lo, hi = 0, 1 << (-(-max(num // den, 1).bit_length() // r) + 1)
    while hi**r * den < num:
        hi <<= 1
    while lo < hi:
        mid = (lo + hi) // 2
        if mid**r * den >= num:
            hi = mid
        else:
            lo = mid + 1
    return lo
