"""Rates of the dynamic coding schemes over a time series of multigraphs.

Time is measured on the snapshot grid: a window ``[k1, k2]`` covers snapshots
k1..k2 inclusive. Rates are in symbols/s: a max-flow of h unit channels of
``unit_bps`` each, carrying m-bit field symbols, gives h * unit_bps / m.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np

from .constellation import RangeSeries
from .graph import MultiGraph, max_flow_matrix
from .linkbudget import LinkParams, multigraph_series

DEFAULT_THRESHOLD = 2.1


@dataclass
class Scenario:
    graphs: np.ndarray = field(repr=False)  # (steps, n, n) multiplicities
    dt_s: float
    source: int
    sinks: tuple[int, ...]
    field_m: int = 8
    unit_bps: float = 6400.0
    threshold: float = DEFAULT_THRESHOLD

    def __post_init__(self):
        self.graphs = np.asarray(self.graphs, dtype=np.int32)
        self.sinks = tuple(int(t) for t in self.sinks)
        if not self.sinks:
            raise ValueError("at least one sink is required")
        n = self.graphs.shape[1]
        if not 0 <= self.source < n or any(not 0 <= t < n for t in self.sinks):
            raise ValueError("source or sink outside the node range")
        if self.source in self.sinks:
            raise ValueError("the source cannot be a sink")
        self._flow_cache: dict[bytes, int] = {}

    @classmethod
    def from_ranges(
        cls, rs: RangeSeries, params: LinkParams, source: int, sinks: Sequence[int], **kw
    ) -> "Scenario":
        unit = kw.get("unit_bps", 6400.0)
        return cls(multigraph_series(rs.ranges, params, unit), rs.dt_s, source, tuple(sinks), **kw)

    @property
    def steps(self) -> int:
        return self.graphs.shape[0]

    @property
    def num_nodes(self) -> int:
        return self.graphs.shape[1]

    @property
    def symbol_rate(self) -> float:
        """symbols/s carried by one unit of max-flow."""
        return self.unit_bps / self.field_m

    def min_sink_flow(self, mult: np.ndarray) -> int:
        """Smallest max-flow over the sinks (the common multicast rate)."""
        key = mult.tobytes()
        hit = self._flow_cache.get(key)
        if hit is None:
            hit = min(max_flow_matrix(mult, self.source, t) for t in self.sinks)
            self._flow_cache[key] = hit
        return hit

    @cached_property
    def h(self) -> np.ndarray:
        """Per-snapshot min-sink max-flow."""
        return np.array([self.min_sink_flow(g) for g in self.graphs])

    @cached_property
    def h_cumulative_intersection(self) -> np.ndarray:
        """h_int(0, k) for every k."""
        out = np.empty(self.steps, dtype=np.int64)
        running = self.graphs[0].copy()
        for k in range(self.steps):
            np.minimum(running, self.graphs[k], out=running)
            out[k] = self.min_sink_flow(running)
        return out


@dataclass(frozen=True)
class RateSeries:
    times_s: np.ndarray
    values: np.ndarray
    kind: str

    @property
    def times_min(self) -> np.ndarray:
        return self.times_s / 60.0


def t_distribution(num_nodes: int, num_sinks: int, rate_bps: float = 6400.0) -> float:
    """Seconds needed to broadcast new code parameters: |V|^3 log2(|T|+1) / rate."""
    if num_nodes <= 0 or num_sinks <= 0 or rate_bps <= 0:
        raise ValueError("arguments must be positive")
    return num_nodes**3 * math.log2(num_sinks + 1) / rate_bps


def scenario_t_distribution(sc: Scenario) -> float:
    return t_distribution(sc.num_nodes, len(sc.sinks), sc.unit_bps)


def r_opt_series(sc: Scenario) -> RateSeries:
    return RateSeries(np.arange(sc.steps) * sc.dt_s, sc.h * sc.symbol_rate, "opt")


def intersection_graph(sc: Scenario, k1: int, k2: int) -> MultiGraph:
    if not 0 <= k1 <= k2 < sc.steps:
        raise ValueError("need 0 <= k1 <= k2 < steps")
    return MultiGraph(sc.graphs[k1 : k2 + 1].min(axis=0))


def r_intersection(sc: Scenario, k1: int, k2: int) -> float:
    if not 0 <= k1 <= k2 < sc.steps:
        raise ValueError("need 0 <= k1 <= k2 < steps")
    return sc.min_sink_flow(sc.graphs[k1 : k2 + 1].min(axis=0)) * sc.symbol_rate


def r_intersection_cumulative(sc: Scenario) -> RateSeries:
    """r_intersection(0, k) for every snapshot k."""
    return RateSeries(np.arange(sc.steps) * sc.dt_s, sc.h_cumulative_intersection * sc.symbol_rate, "intersection")


def static_field_bits(field_m: int, tau: int) -> int:
    """log2 of the smallest power of two strictly above 2^m * tau."""
    return field_m + int(math.floor(math.log2(tau))) + 1


def r_static_series(sc: Scenario) -> RateSeries:
    """Cumulative mean max-flow over the first tau snapshots, paid for with a
    field large enough to cover tau configurations."""
    tau = np.arange(1, sc.steps + 1)
    mean_h = np.cumsum(sc.h) / tau
    bits = np.array([static_field_bits(sc.field_m, int(k)) for k in tau])
    return RateSeries(np.arange(sc.steps) * sc.dt_s, mean_h * sc.unit_bps / bits, "static")


def r_interval(sc: Scenario, tau: int, T: int, t_dist_s: float | None = None) -> float:
    """Average rate over the first tau snapshots when the code is rebuilt every
    T snapshots and each rebuild costs t_dist_s seconds of airtime."""
    if T < 1 or tau < 1 or tau % T or tau > sc.steps:
        raise ValueError("T must divide tau and tau must fit the series")
    t_dist = scenario_t_distribution(sc) if t_dist_s is None else t_dist_s
    T_s = T * sc.dt_s
    if T_s <= t_dist:
        raise ValueError(f"sub-interval {T_s:g} s leaves no airtime after a {t_dist:g} s redistribution")
    total = sum(r_intersection(sc, (k - 1) * T, k * T - 1) for k in range(1, tau // T + 1))
    return total * (T_s - t_dist) / (tau * sc.dt_s)


def divisors(n: int) -> list[int]:
    return [d for d in range(1, n + 1) if n % d == 0]


def interval_sweep(sc: Scenario, tau: int | None = None, t_min: int = 1) -> list[tuple[int, float]]:
    """(T, r_interval(tau, T)) for every divisor T >= t_min of tau with positive airtime."""
    tau = sc.steps if tau is None else tau
    t_dist = scenario_t_distribution(sc)
    return [(T, r_interval(sc, tau, T, t_dist)) for T in divisors(tau) if T >= t_min and T * sc.dt_s > t_dist]


@dataclass(frozen=True)
class PeriodResult:
    minutes: float | None
    peaks: tuple[float, ...]

    @property
    def defined(self) -> bool:
        return self.minutes is not None


def t_period(values: Sequence[float], dt_s: float = 60.0) -> PeriodResult:
    """Median spacing of the local maxima at or above the 90th percentile.

    A plateau counts as one maximum (at its midpoint) when it is higher than
    the samples on both sides; maxima touching either end are ignored."""
    v = np.asarray(values, dtype=float)
    if v.size < 3:
        return PeriodResult(None, ())
    thr = np.percentile(v, 90)
    change = np.flatnonzero(np.diff(v)) + 1
    starts = np.concatenate([[0], change])
    ends = np.concatenate([change, [v.size]]) - 1
    peaks = []
    for a, b in zip(starts, ends):
        if a == 0 or b == v.size - 1:
            continue
        if v[a] > v[a - 1] and v[b] > v[b + 1] and v[a] >= thr:
            peaks.append((a + b) / 2)
    if len(peaks) < 2:
        return PeriodResult(None, tuple(p * dt_s / 60 for p in peaks))
    spacing = float(np.median(np.diff(peaks))) * dt_s / 60
    return PeriodResult(spacing, tuple(p * dt_s / 60 for p in peaks))


@dataclass(frozen=True)
class StableResult:
    steps: int
    minutes: float
    capped: bool


def tau_stable(cumulative: Sequence[float], dt_s: float = 60.0, period_min: float | None = None) -> StableResult:
    """First grid time at which the cumulative intersection rate has dropped to
    its stable level (the 10th percentile of the cumulative sequence), capped
    at twice the r_opt period."""
    c = np.asarray(cumulative, dtype=float)
    level = np.percentile(c, 10)
    k = int(np.flatnonzero(c <= level)[0])
    if period_min is not None:
        cap = int(math.floor(2 * period_min * 60 / dt_s))
        if k > cap:
            return StableResult(cap, cap * dt_s / 60, True)
    return StableResult(k, k * dt_s / 60, False)


def find_t_opt(sweep: Sequence[tuple[int, float]], tau: int, r_int: float) -> int | None:
    """The best sub-interval length, or None when the interval scheme never
    beats the intersection rate r_int (which covers the monotone case where the
    best T is the whole horizon)."""
    if not sweep:
        return None
    best_T, best = max(sweep, key=lambda x: (x[1], -x[0]))
    if best_T == tau or best < r_int:
        return None
    return best_T


@dataclass(frozen=True)
class CriteriaReport:
    sinks: tuple[int, ...]
    papr: float
    max_ra: float
    rate_r: float
    p50: float
    p75: float
    t_period_min: float | None
    tau_stable_min: float
    t_opt_min: float | None
    recommendation: str
    flags: tuple[str, ...] = ()


def recommend(max_ra: float, threshold: float = DEFAULT_THRESHOLD) -> str:
    if math.isnan(max_ra) or max_ra >= threshold:
        return "interval"
    return "intersection"


@dataclass
class Evaluation:
    """Everything the rate commands emit for one scenario."""

    r_opt: RateSeries
    r_int_cum: RateSeries
    r_static: RateSeries
    sweep: list[tuple[int, float]]
    report: CriteriaReport


def evaluate(sc: Scenario) -> Evaluation:
    opt = r_opt_series(sc)
    cum = r_intersection_cumulative(sc)
    static = r_static_series(sc)
    flags = []

    period = t_period(opt.values, sc.dt_s)
    if not period.defined:
        flags.append("t_period_undefined")
    stable = tau_stable(cum.values, sc.dt_s, period.minutes)
    if stable.capped:
        flags.append("tau_stable_capped")

    tau = sc.steps
    sweep = interval_sweep(sc, tau, t_min=max(stable.steps, 1))
    r_int = float(cum.values[-1])
    t_opt = find_t_opt(sweep, tau, r_int)

    v = opt.values
    peak = float(v.max())
    with np.errstate(divide="ignore", invalid="ignore"):
        papr = peak / float(v.mean()) if v.mean() > 0 else math.nan
        p50 = peak / float(np.median(v)) if np.median(v) > 0 else math.nan
        p75 = peak / float(np.percentile(v, 75)) if np.percentile(v, 75) > 0 else math.nan
    best_interval = max((r for _, r in sweep), default=0.0)
    if r_int > 0:
        max_ra = peak / r_int
        rate_r = best_interval / r_int
    else:
        max_ra = rate_r = math.nan
        flags.append("intersection_rate_zero")
    report = CriteriaReport(
        sinks=sc.sinks,
        papr=papr,
        max_ra=max_ra,
        rate_r=rate_r,
        p50=p50,
        p75=p75,
        t_period_min=period.minutes,
        tau_stable_min=stable.minutes,
        t_opt_min=None if t_opt is None else t_opt * sc.dt_s / 60,
        recommendation=recommend(max_ra, sc.threshold),
        flags=tuple(flags),
    )
    return Evaluation(opt, cum, static, sweep, report)


def criteria(sc: Scenario) -> CriteriaReport:
    return evaluate(sc).report
