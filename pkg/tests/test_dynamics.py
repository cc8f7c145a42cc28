import math

import numpy as np
import pytest

from satnc.dynamics import (
    Scenario,
    divisors,
    evaluate,
    find_t_opt,
    interval_sweep,
    intersection_graph,
    r_interval,
    r_intersection,
    r_intersection_cumulative,
    r_opt_series,
    r_static_series,
    recommend,
    static_field_bits,
    t_distribution,
    t_period,
    tau_stable,
)


def chain_scenario(h, n=3, **kw) -> Scenario:
    """Source 0 feeds sink n-1 over a direct bundle whose multiplicity is h[k]."""
    g = np.zeros((len(h), n, n), dtype=np.int64)
    g[:, 0, n - 1] = h
    return Scenario(g, 60.0, 0, (n - 1,), **kw)


def dipping(steps=120, every=20, at=10, high=3, low=1):
    h = np.full(steps, high)
    h[at::every] = low
    return h


def test_t_distribution_values():
    assert t_distribution(66, 3, 6400) == pytest.approx(89.84, abs=0.01)
    assert t_distribution(66, 1, 6400) == pytest.approx(44.92, abs=0.01)
    with pytest.raises(ValueError):
        t_distribution(0, 1)


def test_t_distribution_scales_with_cube_of_nodes():
    assert t_distribution(132, 3) / t_distribution(66, 3) == pytest.approx(8.0)


def test_r_opt_static_and_disconnected():
    sc = chain_scenario([2, 2, 2, 0])
    np.testing.assert_allclose(r_opt_series(sc).values, [1600, 1600, 1600, 0])


def test_intersection_of_one_snapshot_is_the_snapshot():
    sc = chain_scenario([3, 1, 2])
    for k in range(3):
        np.testing.assert_array_equal(intersection_graph(sc, k, k).mult, sc.graphs[k])
        assert r_intersection(sc, k, k) == r_opt_series(sc).values[k]
    assert r_intersection(sc, 0, 2) == 800
    with pytest.raises(ValueError):
        r_intersection(sc, 2, 1)


def test_cumulative_intersection_is_running_minimum():
    h = np.array([4, 5, 3, 6, 2, 2, 7])
    sc = chain_scenario(h)
    np.testing.assert_allclose(r_intersection_cumulative(sc).values, np.minimum.accumulate(h) * 800)


def test_static_rate():
    assert [static_field_bits(8, t) for t in (1, 2, 3, 4, 7, 8)] == [9, 10, 10, 11, 11, 12]
    sc = chain_scenario([4] * 9)
    v = r_static_series(sc).values
    assert v[0] == pytest.approx(4 * 6400 / 9)
    assert (np.diff(v) <= 0).all()
    # strictly lower each time tau crosses a power of two
    assert v[1] < v[0] and v[3] < v[2] and v[7] < v[6]


def test_interval_rate_degenerate_cases():
    sc = chain_scenario([3, 2, 4, 5])
    assert r_interval(sc, 4, 4, t_dist_s=0.0) == pytest.approx(r_intersection(sc, 0, 3))
    assert r_interval(sc, 4, 4, t_dist_s=120.0) == pytest.approx(r_intersection(sc, 0, 3) / 2)
    # sub-windows [0,1] and [2,3]
    assert r_interval(sc, 4, 2, t_dist_s=0.0) == pytest.approx((2 + 4) / 2 * 800)
    with pytest.raises(ValueError):
        r_interval(sc, 4, 1, t_dist_s=60.0)
    with pytest.raises(ValueError):
        r_interval(sc, 4, 3)


def test_divisors_and_sweep_bounds():
    assert divisors(12) == [1, 2, 3, 4, 6, 12]
    sc = chain_scenario(dipping())
    sweep = interval_sweep(sc, 120, t_min=10)
    assert [T for T, _ in sweep] == [10, 12, 15, 20, 24, 30, 40, 60, 120]


def test_t_period_two_peaks():
    v = np.zeros(120)
    v[30] = v[80] = 1.0
    res = t_period(v)
    assert res.minutes == 50 and res.peaks == (30.0, 80.0)


@pytest.mark.parametrize("period", [17, 25, 60])
def test_t_period_sinusoid(period):
    k = np.arange(600)
    res = t_period(np.sin(2 * np.pi * k / period))
    assert abs(res.minutes - period) <= 1


def test_t_period_undefined_cases():
    assert not t_period(np.ones(50)).defined
    v = np.zeros(50)
    v[20] = 1
    assert not t_period(v).defined


def test_t_period_plateau_counts_once():
    v = np.array([0, 1, 1, 1, 0, 0, 0, 1, 1, 1, 0, 0.0])
    assert t_period(v).peaks == (2.0, 8.0)


def test_tau_stable_examples():
    assert tau_stable(np.ones(30)).steps == 0
    c = np.concatenate([np.full(7, 5.0), np.full(40, 2.0)])
    res = tau_stable(c, 60.0)
    assert (res.steps, res.minutes, res.capped) == (7, 7.0, False)
    c = np.concatenate([np.full(90, 5.0), np.full(10, 2.0)])
    res = tau_stable(c, 60.0, period_min=20)
    assert (res.steps, res.capped) == (40, True)


def test_find_t_opt_rules():
    unimodal = [(1, 1.0), (2, 3.0), (4, 5.0), (8, 4.0), (16, 2.0)]
    assert find_t_opt(unimodal, 16, r_int=2.0) == 4
    monotone = [(1, 1.0), (2, 2.0), (4, 3.0), (8, 4.0), (16, 5.0)]
    assert find_t_opt(monotone, 16, r_int=1.0) is None
    assert find_t_opt(unimodal, 16, r_int=6.0) is None
    assert find_t_opt([(2, 3.0), (4, 3.0)], 16, r_int=1.0) == 2
    assert find_t_opt([], 16, r_int=1.0) is None


def test_recommend_threshold():
    assert recommend(2.1) == "interval"
    assert recommend(2.0) == "intersection"
    assert recommend(math.nan) == "interval"
    assert recommend(1.5, threshold=1.2) == "interval"


def test_criteria_constant_series():
    rep = evaluate(chain_scenario([3] * 60)).report
    assert rep.papr == rep.p50 == rep.p75 == 1.0
    assert rep.max_ra == 1.0
    assert rep.recommendation == "intersection"
    assert rep.t_opt_min is None
    assert "t_period_undefined" in rep.flags


def test_criteria_synthetic_interval_case():
    ev = evaluate(chain_scenario(dipping()))
    rep = ev.report
    assert rep.max_ra == pytest.approx(3.0)
    assert rep.t_period_min == 20.0
    assert rep.tau_stable_min == 10.0
    assert rep.t_opt_min == 10.0
    assert rep.rate_r > 1
    assert rep.recommendation == "interval"


def test_zero_intersection_rate_is_flagged():
    rep = evaluate(chain_scenario([2, 0, 2, 2, 0, 2] * 10)).report
    assert math.isnan(rep.max_ra) and "intersection_rate_zero" in rep.flags
    assert rep.recommendation == "interval"


def test_rate_ratio_below_one_iff_no_t_opt():
    rng = np.random.default_rng(8)
    for _ in range(20):
        n = int(rng.integers(3, 6))
        steps = 60
        g = rng.integers(0, 4, size=(steps, n, n)) * (rng.random((steps, n, n)) < 0.6)
        g[:, np.arange(n), np.arange(n)] = 0
        g[:, 0, n - 1] = np.maximum(g[:, 0, n - 1], 1)
        sc = Scenario(g, 60.0, 0, (n - 1,))
        rep = evaluate(sc).report
        assert (rep.rate_r < 1) == (rep.t_opt_min is None)


def test_scenario_validation():
    g = np.zeros((2, 3, 3), dtype=np.int64)
    with pytest.raises(ValueError):
        Scenario(g, 60.0, 0, ())
    with pytest.raises(ValueError):
        Scenario(g, 60.0, 0, (0,))
    with pytest.raises(ValueError):
        Scenario(g, 60.0, 0, (5,))


def test_default_scenario_frozen_values(default_scenario):
    sc = default_scenario
    assert (sc.h.min(), sc.h.max(), sc.h_cumulative_intersection[-1]) == (108, 175, 76)
    rep = evaluate(sc).report
    assert rep.max_ra == pytest.approx(175 / 76)
    assert rep.rate_r == pytest.approx(1.194516, abs=1e-6)
    assert (rep.t_period_min, rep.tau_stable_min, rep.t_opt_min) == (19.0, 9.0, 10.0)
    assert rep.recommendation == "interval" and rep.flags == ()


def test_default_scenario_second_sink_set(default_graphs):
    rep = evaluate(Scenario(default_graphs, 60.0, 33, (14, 16, 18))).report
    assert rep.max_ra == pytest.approx(175 / 120)
    assert rep.t_opt_min is None and rep.rate_r < 1
    assert rep.recommendation == "intersection"
