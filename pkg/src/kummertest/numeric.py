"""Numeric core: exact rationals, radius-tracked approximations, three-valued comparisons.

Every quantity flowing through the analysis is a :class:`NumericValue`, which is
either

* ``Exact``: an arbitrary-precision rational (backed by ``gmpy2.mpq``), kept in
  canonical reduced form, or
* ``Approx``: a high-precision binary float (``mpmath`` at a configurable
  significand size) paired with a nonnegative absolute error radius.

Arithmetic between two Exact values stays Exact; any operation touching an
Approx value, or any inherently irrational step (``ln``, ``exp``, ``sqrt``,
``pi``, ``e``, non-integer powers), produces an Approx whose radius grows
monotonically with the input radii.  Radius propagation is conservative: each
rule covers the true error interval, adds one unit in the last place for the
rounding of the operation itself, and is inflated by a small safety factor so
that rounding inside the radius arithmetic cannot thin the enclosure.

Comparisons return a :class:`TriBool`.  A definite ``TRUE`` or ``FALSE`` is
decided by exact rational arithmetic on the interval endpoints (binary floats
are dyadic rationals, so endpoints convert losslessly); ``UNKNOWN`` is returned
exactly when the two intervals overlap without one dominating.  A definite
answer is therefore never contradicted by a higher-precision replay.

Precision of the Approx track is set globally with :func:`set_precision`
(default 128 bits).  Exact arithmetic is unbounded but guarded by a bit budget
(:func:`set_budget`); blowing the budget raises :class:`ResourceError` instead
of silently consuming the machine.
"""

from __future__ import annotations

import enum
from contextlib import contextmanager
from fractions import Fraction
from typing import Union

import gmpy2
from gmpy2 import mpq, mpz
from mpmath.ctx_mp import MPContext
from mpmath.libmp import from_rational, round_nearest

__all__ = [
    "TriBool",
    "NumericValue",
    "DomainError",
    "ResourceError",
    "exact",
    "approx",
    "set_precision",
    "get_precision",
    "precision",
    "set_budget",
    "get_budget",
    "ln",
    "exp",
    "sqrt",
    "power",
    "powi",
    "factorial",
    "const_pi",
    "const_e",
    "cmp_ge",
    "cmp_gt",
    "cmp_le",
    "cmp_lt",
    "cmp_eq",
    "is_positive",
    "is_nonpositive",
    "to_float",
    "format_value",
    "parse_rational",
    "format_rational",
    "ZERO",
    "ONE",
]


class DomainError(ArithmeticError, ValueError):
    """An operation was applied outside its mathematical domain."""


class ResourceError(RuntimeError):
    """Exact arithmetic exceeded the configured bit budget."""


class TriBool(enum.Enum):
    """Three-valued comparison result."""

    TRUE = "true"
    FALSE = "false"
    UNKNOWN = "unknown"

    @property
    def is_true(self) -> bool:
        return self is TriBool.TRUE

    @property
    def is_false(self) -> bool:
        return self is TriBool.FALSE

    @property
    def is_unknown(self) -> bool:
        return self is TriBool.UNKNOWN


# Private mpmath context so callers mutating mpmath.mp are unaffected.
_ctx = MPContext()
_ctx.prec = 128

# Inflation factor applied to every propagated radius; absorbs the rounding
# of the radius arithmetic itself, which mpmath performs round-to-nearest.
_BUMP = None  # initialised below once _ctx exists

_BUDGET_BITS = 4_000_000


def _refresh_constants() -> None:
    global _BUMP
    _BUMP = _ctx.mpf(1) + _ctx.ldexp(_ctx.mpf(1), -16)


_refresh_constants()


def set_precision(bits: int) -> None:
    """Set the significand size, in bits, of the Approx track (minimum 16)."""
    if bits < 16:
        raise ValueError("precision must be at least 16 bits")
    _ctx.prec = int(bits)
    _refresh_constants()


def get_precision() -> int:
    """Return the current Approx significand size in bits."""
    return _ctx.prec


@contextmanager
def precision(bits: int):
    """Context manager that temporarily changes the Approx precision."""
    old = _ctx.prec
    set_precision(bits)
    try:
        yield
    finally:
        set_precision(old)


def set_budget(bits: int) -> None:
    """Set the bit budget for a single exact rational (numerator plus denominator)."""
    global _BUDGET_BITS
    if bits < 64:
        raise ValueError("budget must be at least 64 bits")
    _BUDGET_BITS = int(bits)


def get_budget() -> int:
    return _BUDGET_BITS


def _check_budget(q) -> None:
    if q.numerator.bit_length() + q.denominator.bit_length() > _BUDGET_BITS:
        raise ResourceError(
            "exact rational exceeds the %d-bit budget; lower the horizon or "
            "switch to approximate evaluation" % _BUDGET_BITS
        )


def _ulp(x):
    # One unit in the last place of x at working precision; 0 for x == 0.
    return _ctx.ldexp(abs(x), 1 - _ctx.prec)


def _mpf_to_mpq(x):
    """Convert a finite mpf to an exact rational. Dyadic, hence lossless."""
    sign, man, exp, _ = x._mpf_
    if man == 0:
        if x == 0:
            return mpq(0)
        raise DomainError("non-finite value cannot be compared")
    if man.bit_length() + abs(exp) > _BUDGET_BITS:
        # the shift below would materialize |exp| bits
        raise ResourceError(
            "scale of approximate value exceeds the %d-bit budget for exact "
            "comparison" % _BUDGET_BITS
        )
    q = mpq(mpz(man))
    if exp >= 0:
        q = q * (mpz(1) << exp)
    else:
        q = q / (mpz(1) << -exp)
    return -q if sign else q


def _rational_to_mpf(q):
    """Round an exact rational to the working precision. Returns (value, radius)."""
    x = _ctx.make_mpf(
        from_rational(int(q.numerator), int(q.denominator), _ctx.prec, round_nearest)
    )
    den = int(q.denominator)
    if den & (den - 1) == 0 and _mpf_to_mpq(x) == q:
        return x, _ctx.zero
    return x, _ulp(x)


_Coercible = Union["NumericValue", int, Fraction]


class NumericValue:
    """A number that is either an exact rational or a radius-tracked float.

    Instances are immutable.  Construct with :func:`exact` or :func:`approx`
    rather than calling the class directly.
    """

    __slots__ = ("is_exact", "q", "x", "r")

    def __init__(self, is_exact, q=None, x=None, r=None):
        object.__setattr__(self, "is_exact", is_exact)
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "r", r)

    def __setattr__(self, name, value):
        raise AttributeError("NumericValue is immutable")

    # -- construction helpers -------------------------------------------------

    def to_approx(self) -> "NumericValue":
        """Return an Approx version of this value (identity for Approx)."""
        if not self.is_exact:
            return self
        x, r = _rational_to_mpf(self.q)
        return NumericValue(False, x=x, r=r)

    def _parts(self):
        # (value, radius) as mpf, converting Exact on the fly.
        if self.is_exact:
            return _rational_to_mpf(self.q)
        return self.x, self.r

    def bounds(self):
        """Exact rational interval endpoints (lo, hi) enclosing the true value."""
        if self.is_exact:
            return self.q, self.q
        xv = _mpf_to_mpq(self.x)
        rv = _mpf_to_mpq(self.r)
        return xv - rv, xv + rv

    # -- predicates ------------------------------------------------------------

    def is_integer(self) -> bool:
        return self.is_exact and self.q.denominator == 1

    # -- arithmetic -------------------------------------------------------------

    def __add__(self, other):
        other = _coerce(other)
        if self.is_exact and other.is_exact:
            out = self.q + other.q
            _check_budget(out)
            return NumericValue(True, q=out)
        xa, ra = self._parts()
        xb, rb = other._parts()
        v = xa + xb
        return NumericValue(False, x=v, r=(ra + rb + _ulp(v)) * _BUMP)

    __radd__ = __add__

    def __sub__(self, other):
        other = _coerce(other)
        if self.is_exact and other.is_exact:
            out = self.q - other.q
            _check_budget(out)
            return NumericValue(True, q=out)
        xa, ra = self._parts()
        xb, rb = other._parts()
        v = xa - xb
        return NumericValue(False, x=v, r=(ra + rb + _ulp(v)) * _BUMP)

    def __rsub__(self, other):
        return _coerce(other).__sub__(self)

    def __mul__(self, other):
        other = _coerce(other)
        if self.is_exact and other.is_exact:
            out = self.q * other.q
            _check_budget(out)
            return NumericValue(True, q=out)
        xa, ra = self._parts()
        xb, rb = other._parts()
        v = xa * xb
        rad = (abs(xa) * rb + abs(xb) * ra + ra * rb + _ulp(v)) * _BUMP
        return NumericValue(False, x=v, r=rad)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _coerce(other)
        if self.is_exact and other.is_exact:
            if other.q == 0:
                raise DomainError("division by zero")
            out = self.q / other.q
            _check_budget(out)
            return NumericValue(True, q=out)
        xa, ra = self._parts()
        xb, rb = other._parts()
        ab = abs(xb)
        if ab <= rb:
            raise DomainError("divisor interval contains zero")
        v = xa / xb
        rad = ((ra * ab + abs(xa) * rb) / (ab * (ab - rb)) + _ulp(v)) * _BUMP
        return NumericValue(False, x=v, r=rad)

    def __rtruediv__(self, other):
        return _coerce(other).__truediv__(self)

    def __neg__(self):
        if self.is_exact:
            return NumericValue(True, q=-self.q)
        return NumericValue(False, x=-self.x, r=self.r)

    def __abs__(self):
        if self.is_exact:
            return NumericValue(True, q=abs(self.q))
        return NumericValue(False, x=abs(self.x), r=self.r)

    def __pow__(self, other):
        if isinstance(other, int):
            return powi(self, other)
        return power(self, _coerce(other))

    # -- equality is structural (used by expression trees) ----------------------

    def __eq__(self, other):
        if not isinstance(other, NumericValue):
            other = _coerce_or_none(other)
            if other is None:
                return NotImplemented
        if self.is_exact != other.is_exact:
            return False
        if self.is_exact:
            return self.q == other.q
        return self.x == other.x and self.r == other.r

    def __hash__(self):
        if self.is_exact:
            return hash(("exact", self.q))
        return hash(("approx", self.x, self.r))

    def __repr__(self):
        if self.is_exact:
            return "NumericValue(exact %s)" % self.q
        return "NumericValue(approx %s +-%s)" % (
            _ctx.nstr(self.x, 12),
            _ctx.nstr(self.r, 3),
        )


def _coerce_or_none(value):
    if isinstance(value, NumericValue):
        return value
    if isinstance(value, bool):
        return None
    if isinstance(value, int):
        return NumericValue(True, q=mpq(value))
    if isinstance(value, (Fraction, type(mpq(0)), type(mpz(0)))):
        return NumericValue(True, q=mpq(value))
    return None


def _coerce(value) -> NumericValue:
    out = _coerce_or_none(value)
    if out is None:
        raise TypeError(
            "cannot mix %r with NumericValue; wrap floats explicitly with approx()"
            % type(value).__name__
        )
    return out


def exact(numerator, denominator=1) -> NumericValue:
    """Build an Exact value from an integer, rational, or numerator/denominator pair."""
    if isinstance(numerator, float) or isinstance(denominator, float):
        raise TypeError("wrap floats explicitly with approx()")
    if denominator == 0:
        raise DomainError("zero denominator")
    q = mpq(numerator, denominator) if denominator != 1 else mpq(numerator)
    return NumericValue(True, q=q)


def approx(value, radius=0) -> NumericValue:
    """Build an Approx value from a float, int, rational, or mpf, with a radius."""
    if isinstance(value, NumericValue):
        base = value.to_approx()
        x, r = base.x, base.r
    elif isinstance(value, (int, Fraction, type(mpq(0)))):
        x, r = _rational_to_mpf(mpq(value))
    else:
        x = _ctx.mpf(value)
        r = _ctx.zero
    extra = _ctx.mpf(radius) if radius else _ctx.zero
    if extra < 0:
        raise ValueError("radius must be nonnegative")
    return NumericValue(False, x=x, r=r + extra)


ZERO = exact(0)
ONE = exact(1)


# -- transcendental and power operations ---------------------------------------


def _monotone(fn, v: NumericValue, lo_ok) -> NumericValue:
    """Apply a monotone increasing function with endpoint-based radius."""
    x, r = v._parts()
    lo_arg = x - r
    if not lo_ok(lo_arg):
        raise DomainError("argument interval leaves the function domain")
    try:
        val = fn(x)
        if r == 0:
            rad = 2 * _ulp(val)
        else:
            hi = fn(x + r)
            lo = fn(lo_arg)
            rad = max(hi - val, val - lo) + 2 * _ulp(val)
    except (OverflowError, MemoryError):
        # the backend materializes the binary exponent as an int; a tower
        # like e^(e^(e^n)) blows past what it will build
        raise ResourceError("value too large in magnitude to represent")
    return NumericValue(False, x=val, r=rad * _BUMP)


def ln(v) -> NumericValue:
    """Natural logarithm. Always Approx; argument interval must stay positive."""
    return _monotone(_ctx.ln, _coerce(v), lambda a: a > 0)


def exp(v) -> NumericValue:
    """Exponential. Always Approx."""
    return _monotone(_ctx.exp, _coerce(v), lambda a: True)


def sqrt(v) -> NumericValue:
    """Square root. Always Approx; argument interval must stay nonnegative."""
    return _monotone(_ctx.sqrt, _coerce(v), lambda a: a >= 0)


def powi(v, k: int) -> NumericValue:
    """Integer power. Exact stays Exact; negative k requires a nonzero base."""
    v = _coerce(v)
    k = int(k)
    if v.is_exact:
        base_bits = v.q.numerator.bit_length() + v.q.denominator.bit_length()
        # the result has about |k| * base_bits bits; refuse before computing
        if abs(k) > 1 and (base_bits - 1) * abs(k) > _BUDGET_BITS:
            raise ResourceError(
                "integer power would exceed the %d-bit budget" % _BUDGET_BITS)
        if k >= 0:
            out = v.q**k
        else:
            if v.q == 0:
                raise DomainError("zero base with negative exponent")
            out = 1 / v.q ** (-k)
        _check_budget(out)
        return NumericValue(True, q=out)
    if k == 0:
        return NumericValue(False, x=_ctx.mpf(1), r=_ctx.zero)
    x, r = v.x, v.r
    if k < 0:
        if abs(x) <= r:
            raise DomainError("base interval contains zero")
        inv = NumericValue(False, x=_ctx.mpf(1), r=_ctx.zero).__truediv__(v)
        return powi(inv, -k)
    try:
        val = _ctx.power(x, k)
        if r == 0:
            return NumericValue(False, x=val, r=2 * _ulp(val) * _BUMP)
        lo_arg, hi_arg = x - r, x + r
        c_lo = _ctx.power(lo_arg, k)
        c_hi = _ctx.power(hi_arg, k)
    except (OverflowError, MemoryError):
        raise ResourceError("value too large in magnitude to represent")
    lo_int = min(c_lo, c_hi)
    hi_int = max(c_lo, c_hi)
    if k % 2 == 0 and lo_arg < 0 < hi_arg:
        lo_int = min(lo_int, _ctx.zero)
    rad = max(hi_int - val, val - lo_int) + 2 * _ulp(val)
    return NumericValue(False, x=val, r=rad * _BUMP)


def power(base, exponent) -> NumericValue:
    """General power. Exact for integer exponents on Exact bases, else exp(y*ln x)."""
    base = _coerce(base)
    exponent = _coerce(exponent)
    if exponent.is_exact and exponent.q.denominator == 1:
        return powi(base, int(exponent.q))
    return exp(exponent * ln(base))


def factorial(v) -> NumericValue:
    """Factorial of an exact nonnegative integer."""
    v = _coerce(v)
    if not v.is_integer() or v.q < 0:
        raise DomainError("factorial requires an exact nonnegative integer")
    out = mpq(gmpy2.fac(int(v.q)))
    _check_budget(out)
    return NumericValue(True, q=out)


def const_pi() -> NumericValue:
    """The constant pi at working precision, radius one ulp."""
    x = +_ctx.pi
    return NumericValue(False, x=x, r=_ulp(x))


def const_e() -> NumericValue:
    """The constant e at working precision, radius one ulp."""
    x = +_ctx.e
    return NumericValue(False, x=x, r=_ulp(x))


# -- comparisons ----------------------------------------------------------------


def cmp_ge(a, b) -> TriBool:
    """Is a >= b?  Decided on exact interval endpoints; UNKNOWN on overlap."""
    a, b = _coerce(a), _coerce(b)
    if a.is_exact and b.is_exact:
        return TriBool.TRUE if a.q >= b.q else TriBool.FALSE
    alo, ahi = a.bounds()
    blo, bhi = b.bounds()
    if alo >= bhi:
        return TriBool.TRUE
    if ahi < blo:
        return TriBool.FALSE
    return TriBool.UNKNOWN


def cmp_gt(a, b) -> TriBool:
    """Is a > b?"""
    a, b = _coerce(a), _coerce(b)
    if a.is_exact and b.is_exact:
        return TriBool.TRUE if a.q > b.q else TriBool.FALSE
    alo, ahi = a.bounds()
    blo, bhi = b.bounds()
    if alo > bhi:
        return TriBool.TRUE
    if ahi <= blo:
        return TriBool.FALSE
    return TriBool.UNKNOWN


def cmp_le(a, b) -> TriBool:
    return cmp_ge(b, a)


def cmp_lt(a, b) -> TriBool:
    return cmp_gt(b, a)


def cmp_eq(a, b) -> TriBool:
    """Is a == b?  TRUE only when both enclosures are a single equal point."""
    a, b = _coerce(a), _coerce(b)
    alo, ahi = a.bounds()
    blo, bhi = b.bounds()
    if alo == ahi == blo == bhi:
        return TriBool.TRUE
    if ahi < blo or bhi < alo:
        return TriBool.FALSE
    return TriBool.UNKNOWN


def is_positive(v) -> TriBool:
    return cmp_gt(v, ZERO)


def is_nonpositive(v) -> TriBool:
    return cmp_le(v, ZERO)


# -- conversion and formatting ----------------------------------------------------


def to_float(v) -> float:
    """Best-effort float of the central value (may overflow to inf)."""
    v = _coerce(v)
    if v.is_exact:
        num, den = int(v.q.numerator), int(v.q.denominator)
        try:
            return num / den
        except OverflowError:
            x, _ = _rational_to_mpf(v.q)
            return float(x)
    return float(v.x)


def format_value(v, significant: int = 10, rational: bool = False) -> str:
    """Render the central value with the given number of significant digits.

    With ``rational=True`` an Exact value renders as an integer or ``p/q``
    fraction instead of a decimal.
    """
    v = _coerce(v)
    if v.is_exact:
        if rational:
            return str(v.q)
        x, _ = _rational_to_mpf(v.q)
        return _ctx.nstr(x, significant)
    return _ctx.nstr(v.x, significant)


def parse_rational(text: str) -> NumericValue:
    """Parse ``p``, ``p/q``, or a decimal literal into an Exact value."""
    s = text.strip()
    try:
        if "/" in s:
            num_s, den_s = s.split("/", 1)
            num, den = int(num_s), int(den_s)
            if den == 0:
                raise ValueError
            return exact(num, den)
        if "." in s:
            whole, frac = s.split(".", 1)
            if not frac.isdigit():
                raise ValueError
            sign = -1 if whole.lstrip().startswith("-") else 1
            whole_i = int(whole) if whole not in ("", "-", "+") else 0
            scale = 10 ** len(frac)
            return exact(whole_i * scale + sign * int(frac), scale)
        return exact(int(s))
    except (ValueError, TypeError):
        raise ValueError("not a rational literal: %r" % text) from None


def format_rational(v) -> str:
    """Exact value as ``p/q`` (or a plain integer when the denominator is 1)."""
    v = _coerce(v)
    if not v.is_exact:
        raise ValueError("format_rational requires an Exact value")
    return str(v.q)
