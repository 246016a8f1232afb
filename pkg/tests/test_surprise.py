import math

import numpy as np
import pytest
import scipy.integrate
import scipy.stats
from hypothesis import given, settings
from hypothesis import strategies as st

from darkscope.surprise import (
    DurationWindow,
    exponential_cdf,
    fill_pvalue,
    plugin_pvalue,
    predictive_cdf,
    predictive_density,
    score_fill,
    score_tape,
    update_window,
)
from darkscope.tape import EventKind, Side, Tape, TapeEvent

S = 1_000_000_000  # ns per second


def window_of(*durations, capacity=None, last_ts=0):
    return DurationWindow(capacity or max(len(durations), 1), tuple(durations), last_ts)


def lit(ts_ns, side=Side.BUY):
    return TapeEvent(EventKind.LIT, ts_ns, "SYM", 100.0, 100.0, side)


def dark(ts_ns, side=Side.BUY, venue="V1"):
    return TapeEvent(EventKind.DARK, ts_ns, "SYM", 100.0, 100.0, side, venue=venue)


class TestUpdateWindow:
    def test_ring_buffer_eviction(self):
        w = window_of(1.0, 2.0, 3.0, capacity=3, last_ts=0)
        w = update_window(w, 4 * S)
        assert w.durations == (2.0, 3.0, 4.0)
        assert w.mean == pytest.approx(3.0, abs=0)

    def test_all_equal_durations(self):
        w = DurationWindow(capacity=5)
        for i in range(6):
            w = update_window(w, i * 7 * S)
        assert w.mean == pytest.approx(7.0)
        assert w.intensity_hat == w.mean

    def test_arithmetic_mean(self):
        assert window_of(1.0, 2.0, 3.0).mean == pytest.approx(2.0, rel=1e-12)

    def test_non_monotone_rejected(self):
        w = update_window(DurationWindow(capacity=3), 5 * S)
        with pytest.raises(ValueError, match="non-monotone"):
            update_window(w, 4 * S)

    def test_equal_timestamp_floors_to_tape_floor(self):
        w = update_window(DurationWindow(capacity=3), 5 * S)
        w = update_window(w, 5 * S)
        assert w.durations == (1e-9,)

    def test_first_update_only_anchors_clock(self):
        w = update_window(DurationWindow(capacity=3), 5 * S)
        assert w.n == 0 and not w.primed()


class TestExponentialCdf:
    def test_zero(self):
        assert exponential_cdf(0.0, 1.0) == 0.0

    def test_unit(self):
        assert exponential_cdf(1.0, 1.0) == pytest.approx(0.632120558828557678, abs=1e-9)

    def test_three_scales(self):
        assert exponential_cdf(3.0, 1.0) == pytest.approx(0.950212931632136057, abs=1e-9)

    def test_bad_scale(self):
        with pytest.raises(ValueError):
            exponential_cdf(1.0, 0.0)


class TestPluginPvalue:
    def test_short_durations_are_surprising(self):
        w = window_of(1.0)
        assert plugin_pvalue(1e-9, w) < 1e-8

    def test_at_the_scale(self):
        assert plugin_pvalue(1.0, window_of(1.0)) == pytest.approx(0.6321205588, abs=1e-9)

    def test_scale_invariance(self):
        assert plugin_pvalue(2.0, window_of(2.0)) == pytest.approx(0.6321205588, abs=1e-9)

    def test_empty_window(self):
        with pytest.raises(ValueError):
            plugin_pvalue(1.0, DurationWindow(capacity=3))


class TestPredictiveDensity:
    def test_at_zero_is_inverse_mean(self):
        assert predictive_density(0.0, window_of(1.0)) == pytest.approx(1.0, abs=1e-12)
        assert predictive_density(0.0, window_of(2.0, 4.0)) == pytest.approx(1 / 3.0, abs=1e-12)

    def test_direct_value(self):
        assert predictive_density(1.0, window_of(1.0)) == pytest.approx(0.25, abs=1e-12)

    def test_integrates_to_one(self):
        # heavy tail: integrate over log-spaced segments up to 1e6 * mean
        w = window_of(0.5, 1.5, 1.0)
        edges = [0.0] + [w.mean * 10.0**k for k in range(7)]
        total = sum(
            scipy.integrate.quad(predictive_density, a, b, args=(w,), limit=200)[0]
            for a, b in zip(edges, edges[1:])
        )
        assert total == pytest.approx(1.0, abs=1e-6)

    def test_nonnegative(self):
        w = window_of(1.0, 2.0)
        for d in (0.0, 0.3, 5.0, 400.0):
            assert predictive_density(d, w) >= 0.0


class TestPredictiveCdf:
    def test_zero(self):
        assert predictive_cdf(0.0, window_of(1.0, 2.0)) == 0.0

    def test_n1_closed_form(self):
        assert predictive_cdf(1.0, window_of(1.0)) == pytest.approx(0.5, abs=1e-12)

    def test_large_n_exponential_limit(self):
        w = DurationWindow(10**6, (1.0,) * 10**6, 0)
        assert predictive_cdf(1.0, w) == pytest.approx(0.6321205588, abs=1e-5)

    def test_matches_density_quadrature(self):
        # cdf must be the exact integral of the density across the (n, d/m) grid
        for n in (1, 5, 10, 50):
            w = DurationWindow(n, (1.0,) * n, 0)
            for ratio in (0.01, 0.1, 1.0, 10.0):
                d = ratio * w.mean
                integral, _ = scipy.integrate.quad(
                    predictive_density, 0.0, d, args=(w,), epsabs=1e-12, epsrel=1e-12
                )
                assert predictive_cdf(d, w) == pytest.approx(integral, abs=1e-8)

    def test_heavier_tail_than_plugin_at_the_mean(self):
        w = DurationWindow(10, (1.0,) * 10, 0)
        assert predictive_cdf(1.0, w) == pytest.approx(0.614456710570468253, abs=1e-9)
        assert predictive_cdf(1.0, w) < plugin_pvalue(1.0, w)

    @given(
        d1=st.floats(0.0, 1e6),
        d2=st.floats(0.0, 1e6),
        n=st.integers(1, 50),
        mean=st.floats(1e-6, 1e3),
    )
    @settings(max_examples=200, deadline=None)
    def test_monotone_in_delta(self, d1, d2, n, mean):
        w = DurationWindow(n, (mean,) * n, 0)
        lo, hi = sorted((d1, d2))
        assert predictive_cdf(lo, w) <= predictive_cdf(hi, w)
        if hi > lo >= 0 and hi > 0:
            assert predictive_cdf(hi, w) > predictive_cdf(0.0, w) or hi == 0

    @given(
        c=st.floats(1e-6, 1e6),
        d=st.floats(0.0, 1e3),
        durations=st.lists(st.floats(1e-9, 1e3), min_size=1, max_size=20),
    )
    @settings(max_examples=200, deadline=None)
    def test_scale_equivariance(self, c, d, durations):
        w = DurationWindow(len(durations), tuple(durations), 0)
        scaled = DurationWindow(len(durations), tuple(x * c for x in durations), 0)
        assert predictive_cdf(d, w) == pytest.approx(
            predictive_cdf(d * c, scaled), rel=1e-9, abs=1e-12
        )


class TestFillPvalue:
    def test_quickest_is_most_surprising(self):
        w = DurationWindow(10, (1.0,) * 10, 0)
        p = fill_pvalue(1e-9, w)
        assert 0 < p < 1e-8

    def test_direct_values(self):
        w = DurationWindow(10, (1.0,) * 10, 0)
        assert fill_pvalue(0.01, w) == pytest.approx(0.00994521928699700642, abs=1e-12)
        assert fill_pvalue(1.0, w) == pytest.approx(0.614456710570468253, abs=1e-12)

    def test_clamped_into_unit_interval(self):
        w = window_of(1.0)
        assert fill_pvalue(0.0, w) >= 1e-300
        assert fill_pvalue(1e12, w) <= 1.0


class TestScoreFill:
    def tape_with_fill(self):
        # lit prints at 0, 1, 2 s; dark fill at 2.5 s; next lit at 2.51 s
        events = (
            lit(0),
            lit(1 * S),
            lit(2 * S, side=Side.SELL),
            dark(int(2.5 * S)),
            lit(int(2.51 * S), side=Side.SELL),
        )
        return Tape("SYM", events)

    def primed_window(self):
        w = DurationWindow(capacity=2)
        for t in (0, 1 * S, 2 * S):
            w = update_window(w, t)
        return w

    def test_forward_and_backward_durations(self):
        record = score_fill(self.tape_with_fill(), 3, self.primed_window(), horizon_s=50.0)
        assert record.delta_fwd == pytest.approx(0.01)
        assert record.delta_bwd == pytest.approx(0.5)
        assert record.p_fwd == pytest.approx(0.00992549689364124650, rel=1e-9)
        assert record.n_used == 2
        assert record.mean_used == pytest.approx(1.0)
        assert record.next_lit_side is Side.SELL

    def test_censoring_beyond_horizon(self):
        events = (lit(0), lit(1 * S), dark(2 * S), lit(500 * S))
        record = score_fill(Tape("SYM", events), 2, window_of(1.0, last_ts=S), horizon_s=50.0)
        assert record.p_fwd is None and record.delta_fwd is None
        assert record.p_bwd is not None  # record retained with backward score

    def test_backward_one_nanosecond_flags_latent_risk(self):
        n = 10
        w = DurationWindow(n, (1.0,) * n, 0)
        events = (lit(0), dark(1), lit(2 * S))
        record = score_fill(Tape("SYM", events), 1, w, horizon_s=50.0)
        assert record.delta_bwd == pytest.approx(1e-9)
        # first-order expansion: p ~ n * d / (n * m) = d / m
        assert record.p_bwd == pytest.approx(1e-9, rel=1e-6)

    def test_equal_ts_lit_counts_backward_not_forward(self):
        events = (lit(0), dark(5 * S), lit(5 * S))
        tape = Tape("SYM", tuple(sorted(events, key=lambda e: e.sort_key)))
        record = score_fill(tape, 2, window_of(1.0, last_ts=0), horizon_s=50.0)
        assert record.delta_bwd == pytest.approx(1e-9)

    def test_unprimed_window_rejected(self):
        with pytest.raises(ValueError, match="at least one duration"):
            score_fill(self.tape_with_fill(), 3, DurationWindow(capacity=2), horizon_s=5.0)

    def test_never_mutates_window(self):
        w = self.primed_window()
        before = (w.durations, w.last_ts)
        score_fill(self.tape_with_fill(), 3, w, horizon_s=50.0)
        assert (w.durations, w.last_ts) == before


class TestScoreTape:
    def test_one_record_per_scoreable_fill(self):
        events = (
            dark(0),            # before any lit duration: skipped
            lit(1 * S),
            dark(int(1.5 * S)),  # window not primed yet (one print only)
            lit(2 * S),
            dark(int(2.2 * S)),
            dark(int(2.4 * S)),
            lit(3 * S),
        )
        tape = Tape("SYM", tuple(sorted(events, key=lambda e: e.sort_key)))
        records = score_tape(tape, window_size=5)
        assert len(records) == 2
        assert all(r.p_fwd is not None for r in records)

    def test_null_uniformity_kolmogorov_smirnov(self):
        # Dark fills at times independent of a homogeneous Poisson lit tape
        # must produce exactly Uniform(0,1) forward p-values (waiting paradox
        # included: the forward wait has the same exponential law).
        rng = np.random.default_rng(424242)
        horizon = 12_000.0
        lit_ts = np.cumsum(rng.exponential(1.0, size=int(horizon * 1.05) + 100))
        lit_ts = lit_ts[lit_ts < horizon]
        fill_ts = np.sort(rng.uniform(lit_ts[0] + 50.0, horizon - 60.0, size=10_500))
        events = [lit(int(round(t * S))) for t in lit_ts]
        events += [dark(int(round(t * S))) for t in fill_ts]
        tape = Tape("SYM", tuple(sorted(events, key=lambda e: e.sort_key)))
        records = score_tape(tape, window_size=10)
        ps = np.array([r.p_fwd for r in records if r.p_fwd is not None])[:10_000]
        assert ps.size == 10_000
        d_stat = scipy.stats.kstest(ps, "uniform").statistic
        assert d_stat < 1.628 / math.sqrt(ps.size)  # 1% critical value
