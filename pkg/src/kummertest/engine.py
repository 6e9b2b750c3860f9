"""Kummer sequences: construction, condition checking, and sufficiency bounds.

A positive series ``sum a_n`` converges exactly when some positive sequence
``B_n`` satisfies, from some index N on,

    B_n * (a_n / a_{n+1}) - B_{n+1} >= rho        for a fixed rho > 0,

and the normalization ``rho = 1`` loses nothing (divide the whole sequence by
rho).  This module builds candidate sequences and checks that condition with
three-valued rigor: every margin is a tracked enclosure, and a reported
``ALL_HOLD`` or ``FAILS_AT`` is backed by exact endpoint comparisons.

Two constructions are provided and are algebraically identical:

* :func:`build_recursive` iterates the equality case
  ``B_{n+1} = B_n * (a_n / a_{n+1}) - 1``.
* :func:`build_closed_form` telescopes it:
  ``B_{n+1} = (B_N * a_N - (a_{N+1} + ... + a_{n+1})) / a_{n+1}``,
  served from the shared partial-sum tables.

In exact arithmetic the two agree term for term, and every margin of such a
sequence is exactly 1.  The closed form makes the convergence mechanism
visible: the sequence stays positive for all time exactly when ``B_N * a_N``
dominates every tail partial sum, which is why :func:`construct_from_sum`
turns any certified upper bound on the remaining sum into a sequence that is
positive forever, and why :func:`sufficiency_bound` checks the reverse
inequality ``B_N * a_N >= a_{N+1} + ... + a_M``.

For a divergent series no positive witness exists: every seed eventually
drives the sequence to zero or below.  :func:`seed_sweep` probes that
behavior across seeds; crossings are evidence, not proof, and are labeled as
such by the callers in :mod:`kummertest.classical`.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Optional, Sequence

from kummertest import expr as ex
from kummertest import numeric
from kummertest import series as ser
from kummertest.numeric import NumericValue, TriBool, exact

__all__ = [
    "BuildMode",
    "ConditionOutcome",
    "KummerSequence",
    "ConditionReport",
    "BoundReport",
    "SweepResult",
    "build_recursive",
    "build_closed_form",
    "construct_from_sum",
    "check_condition",
    "check_rate_form",
    "scale_margin",
    "sufficiency_bound",
    "seed_sweep",
]


class BuildMode(enum.Enum):
    RECURSION = "recursion"
    CLOSED_FORM = "closed-form"


class ConditionOutcome(enum.Enum):
    ALL_HOLD = "all-hold"
    FAILS_AT = "fails-at"
    UNKNOWN = "unknown"


@dataclass
class KummerSequence:
    """A candidate sequence ``B_N .. B_M`` for one series.

    ``values[i]`` is ``B_{N+i}``.  When a definitely nonpositive entry is found
    its index is recorded in ``first_nonpositive`` (zero counts as nonpositive);
    an enclosure that straddles zero is recorded in ``first_undecided``.  With
    ``stop_at_nonpositive`` the build stops right after the first definite
    crossing, so ``last`` can be smaller than the requested window end.
    """

    series: ser.Series
    start: int
    seed: NumericValue
    mode: BuildMode
    eval_mode: ex.EvalMode
    values: list[NumericValue]
    first_nonpositive: Optional[int] = None
    first_undecided: Optional[int] = None
    origin: str = "seed"

    @property
    def last(self) -> int:
        return self.start + len(self.values) - 1

    def value_at(self, n: int) -> NumericValue:
        if n < self.start or n > self.last:
            raise IndexError("index %d outside [%d, %d]" % (n, self.start, self.last))
        return self.values[n - self.start]

    @property
    def positivity(self) -> TriBool:
        if self.first_nonpositive is not None and (
                self.first_undecided is None
                or self.first_nonpositive < self.first_undecided):
            return TriBool.FALSE
        if self.first_undecided is not None:
            return TriBool.UNKNOWN
        return TriBool.TRUE


@dataclass
class ConditionReport:
    """Result of checking margins ``m_n = B_n * (a_n/a_{n+1}) - B_{n+1}`` against rho.

    ``margins[i]`` and ``statuses[i]`` describe index ``start + i``; statuses are
    ``cmp_ge(m_n, rho)``.  ``overall`` is FAILS_AT when some margin definitely
    misses rho (``fail_index`` is the first such index), UNKNOWN when nothing
    fails definitely but some comparison is undecided, and ALL_HOLD otherwise.
    """

    start: int
    end: int
    rho: NumericValue
    margins: list[NumericValue]
    statuses: list[TriBool]
    overall: ConditionOutcome
    fail_index: Optional[int] = None
    undecided_index: Optional[int] = None


@dataclass
class BoundReport:
    """Comparison of the partial-sum cap ``B_N * a_N`` against actual partial sums."""

    start: int
    end: int
    bound: NumericValue
    max_partial: NumericValue
    holds: TriBool


@dataclass
class SweepResult:
    """Positivity outcome for one seed of a sweep."""

    seed: NumericValue
    sequence: KummerSequence
    crossed: bool
    first_nonpositive: Optional[int]


def _require_positive_seed(seed) -> NumericValue:
    value = seed if isinstance(seed, NumericValue) else exact(seed)
    if numeric.is_positive(value) is not TriBool.TRUE:
        raise ValueError("seed B_N must be provably positive, got %r" % (value,))
    return value


def _validate_window(s: ser.Series, start: int, end: int) -> None:
    if start < s.start:
        raise ValueError("window start %d precedes series start %d" % (start, s.start))
    if end < start:
        raise ValueError("window end %d precedes window start %d" % (end, start))


def _scan_positivity(seq: KummerSequence, index: int, value: NumericValue) -> bool:
    """Record positivity of one new entry; returns True when definitely nonpositive."""
    pos = numeric.is_positive(value)
    if pos is TriBool.TRUE:
        return False
    if pos is TriBool.FALSE:
        if seq.first_nonpositive is None:
            seq.first_nonpositive = index
        return True
    if seq.first_undecided is None:
        seq.first_undecided = index
    return False


def build_recursive(s: ser.Series, start: int, seed, end: int,
                    eval_mode: Optional[ex.EvalMode] = None,
                    stop_at_nonpositive: bool = True) -> KummerSequence:
    """Iterate ``B_{n+1} = B_n * (a_n / a_{n+1}) - 1`` from ``B_start = seed``.

    Builds entries through index ``end`` (or stops early at the first definitely
    nonpositive entry when ``stop_at_nonpositive`` is set; the crossing entry
    itself is kept, since its index is the interesting observable).
    """
    _validate_window(s, start, end)
    seed_v = _require_positive_seed(seed)
    mode = eval_mode if eval_mode is not None else ser.default_mode(s)
    seq = KummerSequence(series=s, start=start, seed=seed_v, mode=BuildMode.RECURSION,
                         eval_mode=mode, values=[seed_v])
    current = seed_v
    t_prev = ser.cached_term(s, start, mode)
    for n in range(start, end):
        t_next = ser.cached_term(s, n + 1, mode)
        current = current * (t_prev / t_next) - 1
        seq.values.append(current)
        t_prev = t_next
        if _scan_positivity(seq, n + 1, current) and stop_at_nonpositive:
            break
    return seq


def build_closed_form(s: ser.Series, start: int, seed, end: int,
                      eval_mode: Optional[ex.EvalMode] = None,
                      stop_at_nonpositive: bool = True) -> KummerSequence:
    """Telescoped form of :func:`build_recursive`; identical values, same interface.

    ``B_m = (B_start * a_start - sum(a_k for start < k <= m)) / a_m`` for
    ``m > start``.  Partial sums come from the shared table, so rebuilding the
    same series with a different seed reuses all term evaluations.
    """
    _validate_window(s, start, end)
    seed_v = _require_positive_seed(seed)
    mode = eval_mode if eval_mode is not None else ser.default_mode(s)
    seq = KummerSequence(series=s, start=start, seed=seed_v, mode=BuildMode.CLOSED_FORM,
                         eval_mode=mode, values=[seed_v])
    cap = seed_v * ser.cached_term(s, start, mode)
    for m in range(start + 1, end + 1):
        spent = ser.partial_sum(s, start + 1, m, mode)
        value = (cap - spent) / ser.cached_term(s, m, mode)
        seq.values.append(value)
        if _scan_positivity(seq, m, value) and stop_at_nonpositive:
            break
    return seq


def construct_from_sum(s: ser.Series, sum_upper, start: int, end: int,
                       delta=1, eval_mode: Optional[ex.EvalMode] = None) -> KummerSequence:
    """Build a sequence that stays positive forever from an upper sum bound.

    ``sum_upper`` must bound ``sum(a_k for k >= start)`` from above; its outer
    interval endpoint is taken, as an exact rational, so exactly evaluable
    series keep a fully exact build.  The seed is
    ``B_start = sum_upper / a_start + delta`` with ``delta > 0``; then
    ``B_m * a_m >= delta * a_start`` for every m, so positivity can never fail.
    Margins of the result are exactly 1 in exact arithmetic.
    """
    delta_v = delta if isinstance(delta, NumericValue) else exact(delta)
    if numeric.is_positive(delta_v) is not TriBool.TRUE:
        raise ValueError("delta must be provably positive")
    upper = sum_upper if isinstance(sum_upper, NumericValue) else exact(sum_upper)
    upper_q = NumericValue(True, q=upper.bounds()[1])
    mode = eval_mode if eval_mode is not None else ser.default_mode(s)
    a_start = ser.cached_term(s, start, mode)
    seed = upper_q / a_start + delta_v
    seq = build_closed_form(s, start, seed, end, eval_mode=mode,
                            stop_at_nonpositive=False)
    seq.origin = "from-sum"
    return seq


def check_condition(s: ser.Series, seq: KummerSequence, rho=1) -> ConditionReport:
    """Check ``B_n * (a_n / a_{n+1}) - B_{n+1} >= rho`` across the sequence window."""
    rho_v = rho if isinstance(rho, NumericValue) else exact(rho)
    if numeric.is_positive(rho_v) is not TriBool.TRUE:
        raise ValueError("rho must be provably positive")
    margins: list[NumericValue] = []
    statuses: list[TriBool] = []
    fail_index = None
    undecided_index = None
    mode = seq.eval_mode
    for n in range(seq.start, seq.last):
        t_n = ser.cached_term(s, n, mode)
        t_next = ser.cached_term(s, n + 1, mode)
        margin = seq.value_at(n) * (t_n / t_next) - seq.value_at(n + 1)
        status = numeric.cmp_ge(margin, rho_v)
        margins.append(margin)
        statuses.append(status)
        if status is TriBool.FALSE and fail_index is None:
            fail_index = n
        elif status is TriBool.UNKNOWN and undecided_index is None:
            undecided_index = n
    if fail_index is not None:
        overall = ConditionOutcome.FAILS_AT
    elif undecided_index is not None:
        overall = ConditionOutcome.UNKNOWN
    else:
        overall = ConditionOutcome.ALL_HOLD
    return ConditionReport(start=seq.start, end=seq.last, rho=rho_v,
                           margins=margins, statuses=statuses, overall=overall,
                           fail_index=fail_index, undecided_index=undecided_index)


def check_rate_form(s: ser.Series, seq: KummerSequence, rho=1) -> ConditionReport:
    """Check the equivalent rate form ``a_{n+1}/a_n <= B_n / (rho + B_{n+1})``.

    Requires a sequence that is provably positive across its window: the rate
    form divides by ``rho + B_{n+1}``, and the equivalence with the margin form
    only holds when that stays positive.  Index-by-index statuses agree with
    :func:`check_condition` on such sequences.
    """
    rho_v = rho if isinstance(rho, NumericValue) else exact(rho)
    if numeric.is_positive(rho_v) is not TriBool.TRUE:
        raise ValueError("rho must be provably positive")
    if seq.positivity is not TriBool.TRUE:
        raise ValueError("rate form requires a provably positive sequence")
    margins: list[NumericValue] = []
    statuses: list[TriBool] = []
    fail_index = None
    undecided_index = None
    mode = seq.eval_mode
    for n in range(seq.start, seq.last):
        t_n = ser.cached_term(s, n, mode)
        t_next = ser.cached_term(s, n + 1, mode)
        lhs = t_next / t_n
        rhs = seq.value_at(n) / (rho_v + seq.value_at(n + 1))
        status = numeric.cmp_le(lhs, rhs)
        margins.append(rhs - lhs)
        statuses.append(status)
        if status is TriBool.FALSE and fail_index is None:
            fail_index = n
        elif status is TriBool.UNKNOWN and undecided_index is None:
            undecided_index = n
    if fail_index is not None:
        overall = ConditionOutcome.FAILS_AT
    elif undecided_index is not None:
        overall = ConditionOutcome.UNKNOWN
    else:
        overall = ConditionOutcome.ALL_HOLD
    return ConditionReport(start=seq.start, end=seq.last, rho=rho_v,
                           margins=margins, statuses=statuses, overall=overall,
                           fail_index=fail_index, undecided_index=undecided_index)


def scale_margin(seq: KummerSequence, rho) -> KummerSequence:
    """Normalize a sequence held to threshold rho into one held to threshold 1.

    Dividing every entry by rho divides every margin by rho, so
    ``check_condition(scaled, 1)`` reproduces the statuses of
    ``check_condition(seq, rho)``.  Positivity metadata carries over unchanged
    because rho is positive.
    """
    rho_v = rho if isinstance(rho, NumericValue) else exact(rho)
    if numeric.is_positive(rho_v) is not TriBool.TRUE:
        raise ValueError("rho must be provably positive")
    return KummerSequence(
        series=seq.series, start=seq.start, seed=seq.seed / rho_v, mode=seq.mode,
        eval_mode=seq.eval_mode, values=[v / rho_v for v in seq.values],
        first_nonpositive=seq.first_nonpositive,
        first_undecided=seq.first_undecided, origin=seq.origin)


def sufficiency_bound(s: ser.Series, seq: KummerSequence, end: int) -> BoundReport:
    """Check ``B_N * a_N >= a_{N+1} + ... + a_end``.

    For a sequence whose margins hold at rho >= 1 this inequality is forced;
    partial sums increase, so the sum through ``end`` is their maximum over the
    window.  Requires a provably positive sequence.
    """
    if seq.positivity is not TriBool.TRUE:
        raise ValueError("sufficiency bound requires a provably positive sequence")
    if end <= seq.start:
        raise ValueError("end must exceed the sequence start")
    mode = seq.eval_mode
    bound = seq.seed * ser.cached_term(s, seq.start, mode)
    max_partial = ser.partial_sum(s, seq.start + 1, end, mode)
    return BoundReport(start=seq.start, end=end, bound=bound,
                       max_partial=max_partial,
                       holds=numeric.cmp_ge(bound, max_partial))


def seed_sweep(s: ser.Series, seeds: Sequence, start: int, end: int,
               eval_mode: Optional[ex.EvalMode] = None) -> list[SweepResult]:
    """Build one sequence per seed and record which ones cross to nonpositive.

    Every seed crossing within the window is evidence of divergence (for a
    convergent series, seeds above the tail sum stay positive forever); no
    crossing proves nothing by itself.  Results keep the seeds' given order.
    """
    out = []
    for seed in seeds:
        seq = build_recursive(s, start, seed, end, eval_mode=eval_mode,
                              stop_at_nonpositive=True)
        out.append(SweepResult(seed=seq.seed, sequence=seq,
                               crossed=seq.first_nonpositive is not None,
                               first_nonpositive=seq.first_nonpositive))
    return out
