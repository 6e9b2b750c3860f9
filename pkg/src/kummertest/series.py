"""Positive series over expression terms: cached partial sums and sum enclosures.

A :class:`Series` wraps a term expression ``a_n`` together with a start index.
Positivity of terms is a lazy contract: it is checked for every index whose
term is actually computed, and a violation raises :class:`PositivityViolation`
at the offending index rather than poisoning results silently.

Partial sums are served from a process-wide table registry keyed by the
canonical expression text, the start index, the evaluation mode, and (for the
approximate track) the working precision.  Two series objects describing the
same sum therefore share one table, and repeated sweeps over growing windows
cost amortized one term evaluation per index.  Tables grow under a lock and
are safe to share between threads.

:func:`oracle_tail_bounds` produces a conservative enclosure of the full sum
when one of two majorant certificates applies:

* geometric: the sampled ratio bound ``q = max a_{k+1}/a_k`` over the late
  half of the horizon satisfies ``q < 1`` and does not exceed the early-half
  bound (a non-increasing trend guard, which refuses e.g. the harmonic
  series whose ratios increase toward 1); the tail is then bounded by the
  geometric majorant ``a_h * q / (1 - q)``.
* power majorant: the decay exponent measured at two scales by
  ``p_k = log2(a_k / a_{2k})`` is extrapolated in the ``p + c / ln k`` model
  (plain two-point estimates misclassify ``1/(n ln n)``, whose apparent
  exponent stays above 1 while the series diverges); after a safety deduction
  the exponent must clear 1, and the tail is bounded by the integral of the
  fitted power law with an inflated constant.

Both certificates are sampling-based heuristics hardened with guards and
safety margins; they are deliberately conservative and return ``None``
whenever their preconditions fail, never a bound they cannot justify.
Enclosure endpoints are exact rationals (dyadic endpoints of the tracked
intervals), so downstream exact arithmetic can consume them losslessly.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass, field
from typing import Optional

from gmpy2 import mpq

from kummertest import expr as ex
from kummertest import numeric
from kummertest.numeric import NumericValue, TriBool, exact

__all__ = [
    "Series",
    "PositivityViolation",
    "SumEnclosure",
    "make_series",
    "default_mode",
    "term",
    "ratio",
    "partial_sum",
    "cached_term",
    "positive_checked_through",
    "oracle_tail_bounds",
]


class PositivityViolation(ValueError):
    """A term required to be positive was nonpositive (or undecidably close to 0)."""

    def __init__(self, text: str, index: int, value: NumericValue, decided: bool = True):
        self.index = index
        self.value = value
        self.decided = decided
        kind = "is not positive" if decided else "cannot be separated from zero"
        super().__init__("term a_%d of %s %s" % (index, text, kind))


class Series:
    """A series ``sum a_n for n >= start`` with positive terms.

    Build with :func:`make_series`.  ``text`` is the canonical printed form of
    the term expression and serves as the identity for table sharing.
    """

    __slots__ = ("expression", "text", "start", "exact_mode")

    def __init__(self, expression: ex.Expr, start: int):
        self.expression = expression
        self.text = ex.to_text(expression)
        self.start = start
        self.exact_mode = ex.is_exactly_evaluable(expression)

    def __repr__(self):
        return "Series(%s, start=%d, %s)" % (
            self.text, self.start, "exact" if self.exact_mode else "approx")


def default_mode(s: Series) -> ex.EvalMode:
    """The natural evaluation mode: exact when the term expression allows it."""
    return ex.EvalMode.EXACT_PREFERRED if s.exact_mode else ex.EvalMode.FORCE_APPROX


def make_series(source, start: int = 1) -> Series:
    """Build a series from expression text or a parsed tree.

    The start index must be a positive integer.  Expression text is parsed
    with the public grammar; parse errors propagate.
    """
    if not isinstance(start, int) or isinstance(start, bool) or start < 1:
        raise ValueError("start index must be an integer >= 1, got %r" % (start,))
    tree = ex.parse(source) if isinstance(source, str) else source
    if not isinstance(tree, ex.Expr):
        raise TypeError("source must be expression text or an Expr")
    return Series(tree, start)


def _checked_term(s: Series, n: int, mode: ex.EvalMode) -> NumericValue:
    value = ex.evaluate(s.expression, n, mode)
    pos = numeric.is_positive(value)
    if pos is TriBool.TRUE:
        return value
    raise PositivityViolation(s.text, n, value, decided=(pos is TriBool.FALSE))


def term(s: Series, n: int, mode: ex.EvalMode = ex.EvalMode.EXACT_PREFERRED) -> NumericValue:
    """The term ``a_n``.  Raises PositivityViolation unless it is provably positive."""
    if n < s.start:
        raise ValueError("index %d precedes start %d" % (n, s.start))
    return _checked_term(s, n, mode)


def ratio(s: Series, n: int, mode: ex.EvalMode = ex.EvalMode.EXACT_PREFERRED) -> NumericValue:
    """The consecutive-term ratio ``a_n / a_{n+1}``."""
    return term(s, n, mode) / term(s, n + 1, mode)


# -- shared partial-sum tables ------------------------------------------------------


class _SumTable:
    """Terms and cumulative sums for one (expression, start, mode, precision) key."""

    __slots__ = ("series", "mode", "lock", "terms", "prefix")

    def __init__(self, series: Series, mode: ex.EvalMode):
        self.series = series
        self.mode = mode
        self.lock = threading.Lock()
        self.terms: list[NumericValue] = []
        self.prefix: list[NumericValue] = []

    def extend_to(self, n: int) -> None:
        """Grow the table so that index n is covered. Checks positivity as it goes."""
        if n - self.series.start < len(self.terms):
            return
        with self.lock:
            start = self.series.start
            k = start + len(self.terms)
            while k <= n:
                value = _checked_term(self.series, k, self.mode)
                self.terms.append(value)
                if self.prefix:
                    self.prefix.append(self.prefix[-1] + value)
                else:
                    self.prefix.append(value)
                k += 1

    def term_at(self, n: int) -> NumericValue:
        return self.terms[n - self.series.start]

    def sum_range(self, lo: int, hi: int) -> NumericValue:
        start = self.series.start
        if lo == start:
            return self.prefix[hi - start]
        return self.prefix[hi - start] - self.prefix[lo - start - 1]


_REGISTRY: dict[tuple, _SumTable] = {}
_REGISTRY_LOCK = threading.Lock()


def _table(s: Series, mode: ex.EvalMode) -> _SumTable:
    key: tuple
    if mode is ex.EvalMode.FORCE_APPROX or not s.exact_mode:
        key = (s.text, s.start, mode.value, numeric.get_precision())
    else:
        key = (s.text, s.start, mode.value)
    with _REGISTRY_LOCK:
        table = _REGISTRY.get(key)
        if table is None:
            table = _SumTable(s, mode)
            _REGISTRY[key] = table
    return table


def partial_sum(s: Series, lo: int, hi: int,
                mode: ex.EvalMode = ex.EvalMode.EXACT_PREFERRED) -> NumericValue:
    """The partial sum ``a_lo + ... + a_hi`` (inclusive), served from the shared table."""
    if lo < s.start:
        raise ValueError("lower index %d precedes start %d" % (lo, s.start))
    if hi < lo:
        raise ValueError("empty range [%d, %d]" % (lo, hi))
    table = _table(s, mode)
    table.extend_to(hi)
    return table.sum_range(lo, hi)


def cached_term(s: Series, n: int, mode: ex.EvalMode = ex.EvalMode.EXACT_PREFERRED) -> NumericValue:
    """Like :func:`term` but served from (and growing) the shared table."""
    if n < s.start:
        raise ValueError("index %d precedes start %d" % (n, s.start))
    table = _table(s, mode)
    table.extend_to(n)
    return table.term_at(n)


def positive_checked_through(s: Series, mode: ex.EvalMode = ex.EvalMode.EXACT_PREFERRED) -> int:
    """Largest index whose positivity has been verified by table growth so far.

    Returns ``start - 1`` when nothing has been computed yet.
    """
    table = _table(s, mode)
    return s.start + len(table.terms) - 1


# -- sum enclosures from majorant certificates --------------------------------------


@dataclass
class SumEnclosure:
    """Conservative enclosure of the full sum from a start index to infinity.

    ``lower``/``upper`` are NumericValues whose outer interval endpoints
    (``lo_q``/``hi_q``, exact rationals) bracket the true sum.  ``certificate``
    names the majorant and its parameters.
    """

    first: int
    horizon: int
    lower: NumericValue
    upper: NumericValue
    certificate: dict = field(default_factory=dict)

    @property
    def lo_q(self):
        return self.lower.bounds()[0]

    @property
    def hi_q(self):
        return self.upper.bounds()[1]

    def contains(self, value) -> bool:
        v = value if isinstance(value, NumericValue) else exact(value)
        vlo, vhi = v.bounds()
        return self.lo_q <= vlo and vhi <= self.hi_q

    @property
    def width(self) -> float:
        return numeric.to_float(exact(self.hi_q - self.lo_q))


def _geometric_certificate(table: _SumTable, first: int, horizon: int):
    start = table.series.start
    mid = first + (horizon - first) // 2
    q_early = None
    q_late = None
    for k in range(first, horizon):
        t0 = table.terms[k - start]
        t1 = table.terms[k + 1 - start]
        hi = (t1 / t0).bounds()[1]
        if k < mid:
            if q_early is None or hi > q_early:
                q_early = hi
        else:
            if q_late is None or hi > q_late:
                q_late = hi
    if q_early is None or q_late is None:
        return None
    # Tiny tolerance so enclosure jitter on a constant ratio does not read as
    # an increasing trend; genuinely increasing ratios exceed it by orders.
    if q_late >= 1 or q_late > q_early * mpq(2**20 + 1, 2**20):
        return None
    return q_late


def _power_certificate(table: _SumTable, first: int, horizon: int):
    start = table.series.start
    k1 = max(first, horizon // 4)
    k2 = max(k1 + 1, horizon // 2)
    if 2 * k2 > horizon or k1 < 2:
        return None
    ln2 = numeric.ln(exact(2))

    def p_at(k):
        a_k = table.terms[k - start]
        a_2k = table.terms[2 * k - start]
        return numeric.to_float(numeric.ln(a_k / a_2k) / ln2)

    p1, p2 = p_at(k1), p_at(k2)
    l1, l2 = math.log(k1), math.log(k2)
    c = (p1 - p2) / (1.0 / l1 - 1.0 / l2)
    p_limit = p1 - c / l1
    p_safe = p_limit - 0.05
    if not math.isfinite(p_safe) or p_safe <= 1.02:
        return None
    return p_safe


def oracle_tail_bounds(s: Series, first: int, horizon: int,
                       mode: ex.EvalMode = ex.EvalMode.FORCE_APPROX) -> Optional[SumEnclosure]:
    """Enclose ``sum_{k >= first} a_k`` using a majorant certificate, or return None.

    ``first`` must be at least the series start; ``horizon`` controls both the
    summed prefix and the sampling window for the certificates and must leave
    a window of at least 30 indices above ``first``.  Positivity of every term
    up to the horizon is checked as a side effect.  A ``None`` return means no
    certificate applied; it carries no divergence claim.
    """
    if first < s.start:
        raise ValueError("first index %d precedes start %d" % (first, s.start))
    if horizon < first + 30:
        raise ValueError("horizon must be at least first + 30")
    table = _table(s, mode)
    table.extend_to(horizon)
    prefix = table.sum_range(first, horizon)

    q_bar = _geometric_certificate(table, first, horizon)
    if q_bar is not None:
        a_h = table.term_at(horizon)
        q_nv = NumericValue(True, q=q_bar)
        tail = a_h * q_nv / (exact(1) - q_nv)
        return SumEnclosure(
            first=first, horizon=horizon,
            lower=prefix, upper=prefix + tail,
            certificate={"kind": "geometric",
                         "ratio_bound": numeric.to_float(exact(q_bar)),
                         "horizon": horizon},
        )

    p_safe = _power_certificate(table, first, horizon)
    if p_safe is not None:
        start = s.start
        p_nv = numeric.approx(p_safe)
        c_bar = None
        for k in range(max(first, horizon // 2), horizon + 1, max(1, horizon // 64)):
            a_k = table.terms[k - start]
            scaled = (a_k * numeric.power(exact(k), p_nv)).bounds()[1]
            if c_bar is None or scaled > c_bar:
                c_bar = scaled
        c_nv = NumericValue(True, q=c_bar) * exact(5, 4)
        h_nv = exact(horizon)
        integral = numeric.power(h_nv, numeric.approx(1.0 - p_safe)) / numeric.approx(p_safe - 1.0)
        tail = c_nv * integral
        return SumEnclosure(
            first=first, horizon=horizon,
            lower=prefix, upper=prefix + tail,
            certificate={"kind": "power-majorant", "exponent": p_safe,
                         "constant": numeric.to_float(exact(c_bar)),
                         "horizon": horizon},
        )

    return None
