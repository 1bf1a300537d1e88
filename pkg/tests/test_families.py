"""Catalog families: ground truth, delta consistency, expression agreement."""

import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from demorgan.birthdeath import Fate, bdp_classify, recurrence_ratio
from demorgan.convergence import (
    ClassifyConfig,
    Decision,
    adaptive_classify,
    extended_bdm_test,
    extract_sn,
    sample_grid,
)
from demorgan.expr import parse_expression
from demorgan.families import (
    ACCEPTANCE_CATALOG,
    alpha_const,
    alpha_threshold,
    bd_iterlog,
    bd_log,
    bd_power,
    geometric,
    iterlog_power,
    log_power,
    make_rate_family,
    make_series_family,
    make_walk_family,
    p_series,
)
from demorgan.iterlog import min_domain
from demorgan.convergence import RatioSpec
from demorgan.walk import WalkFate, rw_classify


class TestCatalogTruth:
    @pytest.mark.parametrize("name,params", ACCEPTANCE_CATALOG)
    def test_families_classify_to_ground_truth(self, name, params):
        fam = make_series_family(name, **params)
        verdict = adaptive_classify(fam.ratio_spec)
        assert verdict.decision is fam.truth, fam.label

    def test_factory_validation(self):
        with pytest.raises(ValueError):
            make_series_family("nope", p=1.0)
        with pytest.raises(ValueError):
            make_series_family("p-series")  # missing p
        with pytest.raises(ValueError):
            make_series_family("p-series", p=1.0, x=2.0)  # stray parameter
        with pytest.raises(ValueError):
            geometric(-1.0)
        with pytest.raises(ValueError):
            iterlog_power(4, 1.0)  # depth+1 would exceed the numeric cap


class TestDeltaConsistency:
    @given(
        case=st.sampled_from([
            ("p-series", {"p": 0.5}), ("p-series", {"p": 1.0}), ("p-series", {"p": 2.0}),
            ("log-power", {"r": 0.5}), ("log-power", {"r": 1.0}), ("log-power", {"r": 2.0}),
            ("iterlog-power", {"K": 1, "r": 0.5}), ("iterlog-power", {"K": 1, "r": 2.0}),
            ("iterlog-power", {"K": 2, "r": 0.5}), ("iterlog-power", {"K": 2, "r": 2.0}),
            ("geometric", {"x": 0.5}), ("geometric", {"x": 2.0}),
        ]),
        u=st.floats(min_value=0.0, max_value=1.0),
    )
    @settings(max_examples=300)
    def test_ratio_minus_one_matches_delta(self, case, u):
        # The cancellation-free delta and the raw ratio describe the same
        # series: |ratio - 1 - delta| stays within 4 ulps of the ratio over
        # the sampled index range (windows start at 100).  The nested log
        # chains of iterlog-power compound term rounding to ~6.8 ulps at
        # worst (exhaustive scan), so those get double the budget; terms
        # must stay representable for the raw ratio, so geometric families
        # sample a bounded range.
        fam = make_series_family(case[0], **case[1])
        spec = fam.ratio_spec
        lo = max(spec.first_index, 100)
        hi = 700 if fam.name == "geometric" else 10**7
        n = int(round(lo * (hi / lo) ** u))
        n = min(max(n, lo), hi)
        r = spec.ratio_at(n)
        d = spec.delta(n)
        budget = 8 if fam.name == "iterlog-power" else 4
        assert abs(r - 1.0 - d) <= budget * math.ulp(r), (fam.label, n)

    @given(u=st.floats(min_value=0.0, max_value=1.0))
    @settings(max_examples=100)
    def test_hp_term_matches_float_scale(self, u):
        fam = log_power(2.0)
        n = int(round(2 * (10**6 / 2) ** u))
        n = max(n, 2)
        f = parse_expression(fam.expression)
        assert math.isclose(f(n), float(fam.hp_term(n)), rel_tol=1e-12)


class TestExpressionAgreement:
    @pytest.mark.parametrize("name,params", ACCEPTANCE_CATALOG)
    def test_family_equals_expression_route(self, name, params):
        # Classifying through the family and through its canonical expression
        # gives identical verdicts, and coefficient samples agree within 4
        # ulps (they are bit-equal here: the family evaluates its terms with
        # the same parsed expression).  Comparison runs without delta forms
        # on a window where raw terms are representable.
        fam = make_series_family(name, **params)
        term = parse_expression(fam.expression)

        def expr_ratio(n: int) -> float:
            return term(n) / term(n + 1)

        expr_spec = RatioSpec(ratio=expr_ratio, first_index=fam.ratio_spec.first_index)
        hi = 700 if fam.name == "geometric" else 8192  # raw x^n floats die past ~2^1024
        window = (max(fam.ratio_spec.first_index, 16), hi)
        margin = 0.2
        v_fam = extended_bdm_test(1, fam.ratio_spec, window, margin, use_delta=False)
        v_expr = extended_bdm_test(1, expr_spec, window, margin, use_delta=False)
        assert v_fam.decision == v_expr.decision
        assert len(v_fam.samples) == len(v_expr.samples)
        for a, b in zip(v_fam.samples, v_expr.samples):
            assert a.n == b.n
            if math.isnan(a.value):
                assert math.isnan(b.value)
            else:
                assert abs(a.value - b.value) <= 4 * math.ulp(max(abs(a.value), 1.0)), (
                    fam.label, a.n,
                )


class TestRateFamilies:
    @pytest.mark.parametrize("c,expected", [
        (2.0, Fate.TRANSIENT), (1.0, Fate.RECURRENT), (0.5, Fate.RECURRENT),
    ])
    def test_bd_power_thresholds(self, c, expected):
        fam = bd_power(c)
        assert fam.truth is expected
        assert bdp_classify(fam.rates).decision is expected

    @pytest.mark.parametrize("c,expected", [
        (2.0, Fate.TRANSIENT), (0.5, Fate.RECURRENT),
    ])
    def test_bd_log_thresholds(self, c, expected):
        assert bdp_classify(bd_log(c).rates).decision is expected

    @pytest.mark.parametrize("depth,c", [(1, 0.5), (1, 2.0), (2, 0.5), (2, 2.0)])
    def test_boundary_rates_recover_coefficient(self, depth, c):
        # Rates shaped exactly like the depth-K boundary with deepest weight
        # c: the depth-K extraction sees c, up to the index-shift drift.
        fam = bd_iterlog(depth, c)
        spec = recurrence_ratio(fam.rates)
        lo = max(min_domain(depth), spec.first_index, 10**6)
        for n in sample_grid(lo, 10**7, 8):
            s = extract_sn(depth, spec, n).s
            assert abs(s - c) <= 0.1, (depth, c, n, s)

    def test_registry(self):
        fam = make_rate_family("bd-iterlog", K=2, c=1.5)
        assert fam.params == {"K": 2, "c": 1.5}
        with pytest.raises(ValueError):
            make_rate_family("bd-power")


class TestWalkFamilies:
    @pytest.mark.parametrize("a,expected", [
        (0.4, WalkFate.TRANSIENT), (0.25, WalkFate.RECURRENT), (0.1, WalkFate.RECURRENT),
    ])
    def test_constant_drift_thresholds(self, a, expected):
        fam = alpha_const(a)
        assert fam.truth is expected
        assert rw_classify(fam.drift).decision is expected

    def test_constant_drift_validation(self):
        with pytest.raises(ValueError):
            alpha_const(0.5)
        with pytest.raises(ValueError):
            alpha_const(0.0)

    @given(
        depth=st.integers(min_value=1, max_value=2),
        c=st.sampled_from([0.5, 2.0]),
        n=st.integers(min_value=1, max_value=10**7),
    )
    @settings(max_examples=200)
    def test_threshold_drift_respects_invariant(self, depth, c, n):
        fam = alpha_threshold(depth, c)
        a = fam.drift.alpha_at(n)  # raises InvalidDrift on violation
        assert 0.0 < a < min(fam.drift.C, 0.5 * n)

    def test_registry(self):
        fam = make_walk_family("alpha-const", a=0.3)
        assert fam.drift.C == 0.5
        with pytest.raises(ValueError):
            make_walk_family("alpha-const", a=None)
