"""Range -> SNR -> Shannon capacity -> unit-capacity multigraph."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .graph import MultiGraph

SPEED_OF_LIGHT = 299_792_458.0
BOLTZMANN_DB = -228.5991672  # 10*log10(k_B)


@dataclass(frozen=True)
class LinkParams:
    f_hz: float = 146e6
    pt_dbm: float = 30.0
    gt_dbi: float = 0.0
    gr_dbi: float = 0.0
    t_sys_k: float = 1000.0
    r_bps: float = 6400.0
    nf_db: float = 0.0
    bw_hz: float = 25e3

    def __post_init__(self):
        for name in ("f_hz", "t_sys_k", "r_bps", "bw_hz"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")


@dataclass(frozen=True)
class CapacityGraph:
    """Symmetric capacity matrix in bit/s; NaN marks a missing link."""

    cap: np.ndarray = field(repr=False)

    @property
    def n(self) -> int:
        return self.cap.shape[0]


def free_space_loss_db(d_km, f_hz):
    d_km = np.asarray(d_km, dtype=float)
    if np.any(d_km <= 0) or not f_hz > 0:
        raise ValueError("distance and frequency must be positive")
    out = 20 * np.log10(4 * math.pi * d_km * 1e3 * f_hz / SPEED_OF_LIGHT)
    return float(out) if out.ndim == 0 else out


def snr_db_from_loss(params: LinkParams, loss_db):
    """Eb/N0 in dB for a given path loss; noise figure subtracted in dB."""
    pt_dbw = params.pt_dbm - 30.0
    return (
        pt_dbw
        + params.gt_dbi
        + params.gr_dbi
        - loss_db
        - BOLTZMANN_DB
        - 10 * math.log10(params.t_sys_k)
        - 10 * math.log10(params.r_bps)
        - params.nf_db
    )


def snr_db(params: LinkParams, d_km):
    return snr_db_from_loss(params, free_space_loss_db(d_km, params.f_hz))


def capacity_bps(snr_db, bw_hz: float):
    if not bw_hz > 0:
        raise ValueError("bandwidth must be positive")
    snr_db = np.asarray(snr_db, dtype=float)
    out = bw_hz * np.log2(1.0 + np.power(10.0, snr_db / 10.0))
    return float(out) if out.ndim == 0 else out


def capacity_graph(ranges_t: np.ndarray, params: LinkParams) -> CapacityGraph:
    ranges_t = np.asarray(ranges_t, dtype=float)
    cap = np.full(ranges_t.shape, np.nan)
    ok = ~np.isnan(ranges_t)
    if ok.any():
        cap[ok] = capacity_bps(snr_db(params, ranges_t[ok]), params.bw_hz)
    return CapacityGraph(cap)


def quantize_array(cap: np.ndarray, unit_bps: float) -> np.ndarray:
    """Floor of capacity in whole units; NaN -> 0. Works on stacked snapshots."""
    if not unit_bps > 0:
        raise ValueError("unit_bps must be positive")
    units = np.floor(np.nan_to_num(cap, nan=0.0) / unit_bps).astype(np.int64)
    return units


def quantize(cap: CapacityGraph, unit_bps: float = 6400.0) -> MultiGraph:
    m = quantize_array(cap.cap, unit_bps)
    np.fill_diagonal(m, 0)
    return MultiGraph(m)


def multigraph_series(ranges: np.ndarray, params: LinkParams, unit_bps: float = 6400.0) -> np.ndarray:
    """Multiplicity matrices for every snapshot of a range series, shape (T, n, n)."""
    cap = np.full(ranges.shape, np.nan)
    ok = ~np.isnan(ranges)
    cap[ok] = capacity_bps(snr_db(params, ranges[ok]), params.bw_hz)
    m = quantize_array(cap, unit_bps)
    idx = np.arange(ranges.shape[1])
    m[:, idx, idx] = 0
    return m
