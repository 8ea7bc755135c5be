"""Certified real numbers: outward-rounded enclosures and exact comparisons.

Quantities in this package are either exact rationals or products of a
rational radical with the logarithm of a rational (``RadicalLog``).  Such
values can be compared exactly when the ratio of their radical parts is
rational; everything else comparisons go through interval enclosures whose
precision is doubled until the comparison is decided.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Union

import mpmath
from mpmath.ctx_iv import MPIntervalContext

DEFAULT_PREC = int(os.environ.get("TORUSHEIGHT_PREC", "128"))
PREC_CAP = 1 << 14


class UndecidedComparison(ArithmeticError):
    """Raised when interval refinement reaches the precision cap."""


@lru_cache(maxsize=None)
def ivctx(prec: int) -> MPIntervalContext:
    """A private interval context at ``prec`` bits (never touches mpmath.iv)."""
    ctx = MPIntervalContext()
    ctx.prec = prec
    return ctx


def lohi(e) -> tuple[mpmath.mpf, mpmath.mpf]:
    """Endpoints of an interval enclosure as plain mpf numbers."""
    lo, hi = e._mpi_
    # make_mpf wraps the raw value without rounding to the global precision
    return mpmath.mp.make_mpf(lo), mpmath.mp.make_mpf(hi)


def rat_enclosure(x, prec: int):
    ctx = ivctx(prec)
    x = Fraction(x)
    return ctx.mpf(x.numerator) / x.denominator


def _iroot_exact(n: int, k: int) -> int | None:
    """Exact integer k-th root of n >= 0, or None."""
    if n < 2:
        return n
    r = round(n ** (1.0 / k)) if n.bit_length() < 1000 else None
    if r is None:
        # bisection for very large radicands
        lo, hi = 0, 1 << (n.bit_length() // k + 1)
        while lo < hi:
            mid = (lo + hi + 1) // 2
            if mid**k <= n:
                lo = mid
            else:
                hi = mid - 1
        r = lo
    for cand in (r - 1, r, r + 1):
        if cand >= 0 and cand**k == n:
            return cand
    return None


def rational_root(x: Fraction, k: int) -> Fraction | None:
    """x**(1/k) if it is rational, else None (x >= 0)."""
    x = Fraction(x)
    a = _iroot_exact(x.numerator, k)
    b = _iroot_exact(x.denominator, k)
    if a is None or b is None:
        return None
    return Fraction(a, b)


@dataclass(frozen=True)
class Radical:
    """The positive real ``radicand ** (1/index)``."""

    radicand: Fraction
    index: int = 1

    def __post_init__(self):
        object.__setattr__(self, "radicand", Fraction(self.radicand))
        if self.radicand < 0 or self.index < 1:
            raise ValueError("radical needs radicand >= 0 and index >= 1")

    def __mul__(self, other) -> "Radical":
        if not isinstance(other, Radical):
            other = Radical(Fraction(other))
        L = self.index * other.index // math.gcd(self.index, other.index)
        r = self.radicand ** (L // self.index) * other.radicand ** (L // other.index)
        return Radical(r, L).simplify()

    __rmul__ = __mul__

    def simplify(self) -> "Radical":
        for d in range(self.index, 1, -1):
            if self.index % d == 0:
                root = rational_root(self.radicand, d)
                if root is not None:
                    return Radical(root, self.index // d).simplify()
        return self

    def rational(self) -> Fraction | None:
        return rational_root(self.radicand, self.index)

    def enclose(self, prec: int = DEFAULT_PREC):
        ctx = ivctx(prec)
        r = rat_enclosure(self.radicand, prec)
        if self.index == 1:
            return r
        if self.index == 2:
            return ctx.sqrt(r)
        if self.radicand == 0:
            return ctx.mpf(0)
        return ctx.exp(ctx.log(r) / self.index)

    def __float__(self):
        return float(self.radicand) ** (1.0 / self.index)

    def symbolic(self) -> str:
        q = self.rational()
        if q is not None:
            return str(q)
        if self.index == 2:
            return f"sqrt({self.radicand})"
        return f"({self.radicand})^(1/{self.index})"


@dataclass(frozen=True)
class RadicalLog:
    """The real number ``coef * log(arg)`` with ``coef`` a Radical, ``arg >= 1``."""

    coef: Radical
    arg: Fraction

    def __post_init__(self):
        object.__setattr__(self, "arg", Fraction(self.arg))
        if self.arg < 1:
            raise ValueError("RadicalLog keeps arg >= 1 so the value is >= 0")

    @classmethod
    def log(cls, arg) -> "RadicalLog":
        return cls(Radical(1), Fraction(arg))

    def scaled(self, factor) -> "RadicalLog":
        if not isinstance(factor, Radical):
            factor = Radical(Fraction(factor))
        return RadicalLog(self.coef * factor, self.arg)

    def is_zero(self) -> bool:
        return self.arg == 1 or self.coef.radicand == 0

    def enclose(self, prec: int = DEFAULT_PREC):
        ctx = ivctx(prec)
        return self.coef.enclose(prec) * ctx.log(rat_enclosure(self.arg, prec))

    def __float__(self):
        return float(self.coef) * math.log(self.arg)

    def symbolic(self) -> str:
        c = self.coef.symbolic()
        return f"log({self.arg})" if c == "1" else f"{c}*log({self.arg})"


@dataclass(frozen=True)
class RationalInterval:
    """A real number known only to lie in [lo, hi] (rational endpoints)."""

    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        object.__setattr__(self, "lo", Fraction(self.lo))
        object.__setattr__(self, "hi", Fraction(self.hi))
        if self.lo > self.hi:
            raise ValueError("empty interval")

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    def enclose(self, prec: int = DEFAULT_PREC):
        ctx = ivctx(prec)
        lo = rat_enclosure(self.lo, prec)
        hi = rat_enclosure(self.hi, prec)
        return ctx.mpf([lohi(lo)[0], lohi(hi)[1]])

    def __float__(self):
        return float((self.lo + self.hi) / 2)

    def symbolic(self) -> str:
        return str(self.lo) if self.lo == self.hi else f"[{float(self.lo):.15g}, {float(self.hi):.15g}]"


def to_fraction_interval(e) -> RationalInterval:
    """Exact rational endpoints of an mpmath interval."""
    lo, hi = lohi(e)
    return RationalInterval(mpf_to_fraction(lo), mpf_to_fraction(hi))


def mpf_to_fraction(x) -> Fraction:
    sign, man, exp, _ = x._mpf_
    if not man and exp:
        raise ValueError("non-finite endpoint")
    v = Fraction(int(man)) * Fraction(2) ** exp
    return -v if sign else v


Certifiable = Union[Fraction, int, Radical, RadicalLog, RationalInterval, Callable]


def enclose(x: Certifiable, prec: int = DEFAULT_PREC):
    """Interval enclosure of an exact value or a ``prec -> interval`` callable."""
    if isinstance(x, (int, Fraction)):
        return rat_enclosure(x, prec)
    if hasattr(x, "enclose"):
        return x.enclose(prec)
    return x(prec)


def _unwrap(x):
    """Named constants with an exact value compare through that value."""
    inner = getattr(x, "exact", None)
    return x if inner is None else inner


def _exact_le(a, b) -> bool | None:
    if isinstance(a, (int, Fraction)):
        a = RadicalLog(Radical(0), 1) if a == 0 else a
    if isinstance(b, (int, Fraction)):
        b = RadicalLog(Radical(0), 1) if b == 0 else b
    if isinstance(a, RadicalLog) and a.is_zero():
        return True if isinstance(b, (RadicalLog, Radical)) else None
    if isinstance(b, RadicalLog) and b.is_zero():
        if isinstance(a, RadicalLog):
            return a.is_zero()
        return None
    if isinstance(a, Radical) and isinstance(b, Radical):
        L = a.index * b.index // math.gcd(a.index, b.index)
        return a.radicand ** (L // a.index) <= b.radicand ** (L // b.index)
    if isinstance(a, RadicalLog) and isinstance(b, RadicalLog):
        # a <= b  <=>  arg_a ** q <= arg_b  with q = coef_a / coef_b, when q rational
        L = a.coef.index * b.coef.index // math.gcd(a.coef.index, b.coef.index)
        ratio = a.coef.radicand ** (L // a.coef.index) / b.coef.radicand ** (L // b.coef.index)
        q = rational_root(ratio, L)
        if q is None:
            return None
        return a.arg ** q.numerator <= b.arg ** q.denominator
    return None


def certified_le(a: Certifiable, b: Certifiable, prec: int = DEFAULT_PREC,
                 cap: int = PREC_CAP) -> bool:
    """Decide ``a <= b`` exactly or by refining enclosures."""
    a, b = _unwrap(a), _unwrap(b)
    exact = _exact_le(a, b)
    if exact is not None:
        return exact
    while prec <= cap:
        alo, ahi = lohi(enclose(a, prec))
        blo, bhi = lohi(enclose(b, prec))
        if ahi <= blo:
            return True
        if alo > bhi:
            return False
        prec *= 2
    raise UndecidedComparison(f"could not separate {a!r} and {b!r}")


def fmt(x: Certifiable, prec: int = DEFAULT_PREC) -> dict:
    """Decimal midpoint, certified radius, and symbolic form when exact."""
    lo, hi = lohi(enclose(x, prec))
    with mpmath.workprec(prec + 64):
        mid = (lo + hi) / 2
        decimal = float(mid)
        # the float midpoint's own rounding is part of the certified radius
        radius = max(hi - decimal, decimal - lo)
    out = {
        "decimal": decimal,
        "error_bound": float(radius) * (1 + 2**-50),
        "interval": [mpmath.nstr(lo, 25), mpmath.nstr(hi, 25)],
    }
    if isinstance(x, (Radical, RadicalLog)):
        out["exact"] = x.symbolic()
    elif isinstance(x, RationalInterval) and x.lo == x.hi:
        out["exact"] = str(x.lo)
    elif isinstance(x, (int, Fraction)):
        out["exact"] = str(Fraction(x))
    elif getattr(x, "exact", None) is not None:
        out["exact"] = x.symbolic()
    return out
