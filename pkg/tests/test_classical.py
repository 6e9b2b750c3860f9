"""Test battery: estimator behavior, per-test verdicts, fusion."""

import pytest

from kummertest import classical as cls
from kummertest import series as ser
from kummertest.classical import AnalysisConfig, Confidence, Outcome
from kummertest.numeric import exact


def run(text, start=1, **kw):
    return cls.full_analysis(ser.make_series(text, start=start), AnalysisConfig(**kw))


def verdict(report, test_id):
    v = report.verdict_for(test_id)
    assert v is not None, test_id
    return v


# ------------------------------------------------------------- estimator

def _raabe_at(s):
    return cls._raabe_stat(s, ser.default_mode(s))


def test_estimator_exact_on_p_series():
    """Raabe statistic of 1/n^2 is exactly 2 + O(1/n); extrapolation kills
    the 1/n term so the estimate is exact and stability collapses."""
    s = ser.make_series("1/n^2")
    est = cls.estimate_limit(_raabe_at(s), 1000)
    assert est is not None
    assert abs(est.estimate - 2.0) < 1e-9
    assert est.stability < 1e-9
    assert est.band == cls._TOL


def test_estimator_band_tracks_spread():
    s = ser.make_series("1/(n*ln(n+1))")
    est = cls.estimate_limit(_raabe_at(s), 1000)
    assert est is not None
    assert est.band >= 10 * est.stability or est.band == cls._TOL


def test_estimator_rejects_tiny_window():
    s = ser.make_series("1/n^2")
    assert cls.estimate_limit(_raabe_at(s), 16) is None


def test_estimate_nodes_doubling():
    s = ser.make_series("1/n^2")
    est = cls.estimate_limit(_raabe_at(s), 1000)
    assert len(est.nodes) == 5
    for a, b in zip(est.nodes, est.nodes[1:]):
        assert b == 2 * a


# ---------------------------------------------------------- ratio / root

def test_ratio_certifies_geometric():
    rep = run("1/2^n")
    v = verdict(rep, "ratio")
    assert v.outcome is Outcome.CONVERGES
    assert v.confidence is Confidence.CERTIFIED
    assert 0 < v.witness["ratio_bound"] < 1


def test_ratio_certifies_divergence_when_terms_grow():
    rep = run("2^n")
    v = verdict(rep, "ratio")
    assert v.outcome is Outcome.DIVERGES
    assert v.confidence is Confidence.CERTIFIED
    assert v.witness["ratio_floor"] >= 1


def test_ratio_inconclusive_on_p_series():
    rep = run("1/n^2")
    assert verdict(rep, "ratio").outcome is Outcome.INCONCLUSIVE


def test_root_never_certifies():
    for text in ("1/2^n", "2^n", "1/n^2"):
        rep = run(text)
        v = verdict(rep, "root")
        assert v.confidence is not Confidence.CERTIFIED


# ------------------------------------------------------------ raabe / gauss

def test_raabe_certifies_basel():
    v = verdict(run("1/n^2"), "raabe")
    assert v.outcome is Outcome.CONVERGES
    assert v.confidence is Confidence.CERTIFIED
    assert abs(v.witness["estimate"] - 2.0) < 1e-6


def test_raabe_defers_at_boundary():
    # the harmonic limit is exactly 1, squarely on the fence: Raabe proves
    # nothing there and the verdict must say so
    v = verdict(run("1/n"), "raabe")
    assert v.outcome is Outcome.INCONCLUSIVE
    assert abs(v.witness["estimate"] - 1.0) < 1e-3


def test_raabe_estimates_p():
    for text, p in (("1/n", 1.0), ("1/n^2", 2.0), ("1/n^3", 3.0)):
        v = verdict(run(text), "raabe")
        assert abs(v.witness["estimate"] - p) < 1e-6, text


def test_gauss_defers_at_boundary():
    # Raabe limit exactly 1: gauss must not claim convergence
    v = verdict(run("1/n"), "gauss")
    assert v.outcome in (Outcome.DIVERGES, Outcome.INCONCLUSIVE)


def test_gauss_handles_ratio_with_log_part():
    # 1/(n ln(n+1)^2): h = 1 with a slowly-varying correction; gauss defers
    # rather than inventing a verdict at the boundary
    v = verdict(run("1/(n*ln(n+1)^2)"), "gauss")
    assert v.outcome in (Outcome.CONVERGES, Outcome.INCONCLUSIVE)


# ---------------------------------------------------------------- bertrand

def test_bertrand_separates_log_powers():
    v = verdict(run("1/(n*ln(n+1)^2)"), "bertrand")
    assert v.outcome is Outcome.CONVERGES
    v = verdict(run("1/(n*ln(n+1))"), "bertrand")
    assert v.outcome is Outcome.DIVERGES


def test_bertrand_inconclusive_off_scale():
    v = verdict(run("1/2^n"), "bertrand")
    assert v.outcome is Outcome.INCONCLUSIVE


# ------------------------------------------------------------------ kummer

def test_kummer_certifies_exact_fast_series():
    v = verdict(run("n^2/2^n"), "kummer")
    assert v.outcome is Outcome.CONVERGES
    assert v.confidence is Confidence.CERTIFIED
    assert v.witness["origin"] == "from-sum"
    assert v.witness["condition"]["outcome"] == "all-hold"
    assert v.witness["condition"]["fail_index"] is None


def test_kummer_numerical_for_approx_series():
    v = verdict(run("pi^n/4^n"), "kummer")
    assert v.outcome is Outcome.CONVERGES
    assert v.confidence is Confidence.NUMERICAL


def test_kummer_sweep_on_divergent():
    v = verdict(run("1/n"), "kummer")
    assert v.outcome is Outcome.DIVERGES
    assert v.confidence is Confidence.NUMERICAL
    assert v.witness["crossings"]


def test_kummer_sum_cap_certifies_divergence():
    # partial sums of 1/n exceed 3 by n = 31 (H_31 = 4.02...); an exact
    # exceedance of the cap certifies divergence of the capped claim
    rep = run("1/n", sum_cap=exact(3))
    v = verdict(rep, "kummer")
    assert v.outcome is Outcome.DIVERGES
    assert v.confidence is Confidence.CERTIFIED
    assert v.witness["cap_exceeded_at"] <= 31


def test_kummer_b1_override():
    rep = run("1/2^n", b1=exact(3))
    assert rep.kummer["seed"] == "3"
    assert rep.kummer["values_preview"][:3] == ["3", "5", "9"]


# ------------------------------------------------------------------ fusion

def test_fused_prefers_certified_in_order():
    rep = run("1/2^n")
    assert rep.fused_outcome is Outcome.CONVERGES
    assert rep.fused_confidence is Confidence.CERTIFIED
    # root never certifies, so the first certifying test in order is ratio
    assert rep.fused_source == "ratio"


def test_fused_majority_when_uncertified():
    rep = run("1/sqrt(n)")
    assert rep.fused_outcome is Outcome.DIVERGES
    assert rep.fused_confidence is Confidence.NUMERICAL
    assert rep.fused_source == "majority"


def test_fused_inconclusive_when_silent():
    # only the root test, which stays silent on p-series
    rep = run("1/n^2", tests=("root",))
    assert rep.fused_outcome is Outcome.INCONCLUSIVE
    assert rep.fused_confidence is None


def test_test_selection_respected():
    rep = run("1/n^2", tests=("raabe", "gauss"))
    assert [v.test_id for v in rep.verdicts] == ["raabe", "gauss"]
    assert rep.verdict_for("ratio") is None


def test_reports_deterministic():
    a = run("1/n^3")
    b = run("1/n^3")
    assert a.fused_outcome == b.fused_outcome
    assert [v.outcome for v in a.verdicts] == [v.outcome for v in b.verdicts]
    assert a.kummer == b.kummer


# ------------------------------------------------------------------ config

def test_config_validation():
    with pytest.raises(ValueError):
        AnalysisConfig(window=1)
    with pytest.raises(ValueError):
        AnalysisConfig(probe_window=0)
    with pytest.raises(ValueError):
        AnalysisConfig(precision=32)
    with pytest.raises(ValueError):
        AnalysisConfig(tests=("raabe", "nosuch"))
    with pytest.raises(ValueError):
        AnalysisConfig(seeds=(exact(0),))
    with pytest.raises(ValueError):
        AnalysisConfig(rho=exact(-1))


def test_config_coerces_seed_ints():
    cfg = AnalysisConfig(seeds=(1, 2))
    assert all(v.is_exact and v.q > 0 for v in cfg.seeds)


def test_diagnostic_sequence_paths():
    s = ser.make_series("1/2^n")
    seq = cls.diagnostic_sequence(s, AnalysisConfig())
    assert seq.origin == "from-sum"
    seq = cls.diagnostic_sequence(s, AnalysisConfig(b1=exact(7)))
    assert seq.origin == "seed"
    assert seq.seed.q == 7
    # no oracle for the harmonic series: recursion from the first seed
    h = ser.make_series("1/n")
    seq = cls.diagnostic_sequence(h, AnalysisConfig(seeds=(exact(2),)))
    assert seq.origin == "seed"
    assert seq.seed.q == 2
