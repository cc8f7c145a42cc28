"""Circular-orbit Walker-star constellation and time-indexed range matrices.

Node numbering: plane p (0-based) holds indices p*M .. p*M + M - 1, sequential
along the plane. External files use the same order, 1-based.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

EARTH_ROTATION_RAD_S = 7.2921159e-5
_CHUNK = 64


@dataclass(frozen=True)
class GroundStation:
    lat_deg: float
    lon_deg: float
    min_elevation_deg: float = 0.0


@dataclass(frozen=True)
class ConstellationSpec:
    num_planes: int = 6
    sats_per_plane: int = 11
    altitude_km: float = 780.0
    inclination_deg: float = 86.0
    raan_spacing_deg: float = 30.0
    intra_plane_phase_deg: float = 0.0
    earth_radius_km: float = 6371.0
    mu_km3s2: float = 398600.4418
    epoch: float = 0.0
    ground_stations: tuple[GroundStation, ...] = ()

    def __post_init__(self):
        if self.num_planes < 1 or self.sats_per_plane < 1:
            raise ValueError("constellation needs at least one plane and one satellite")
        if self.altitude_km <= 0:
            raise ValueError("altitude_km must be positive")
        if not 0 <= self.inclination_deg <= 180:
            raise ValueError("inclination_deg must lie in [0, 180]")

    @property
    def num_sats(self) -> int:
        return self.num_planes * self.sats_per_plane

    @property
    def num_nodes(self) -> int:
        return self.num_sats + len(self.ground_stations)

    @property
    def radius_km(self) -> float:
        return self.earth_radius_km + self.altitude_km

    @property
    def mean_motion(self) -> float:
        return math.sqrt(self.mu_km3s2 / self.radius_km**3)

    @property
    def period_s(self) -> float:
        return 2 * math.pi / self.mean_motion


def orbital_period(radius_km: float, mu_km3s2: float = 398600.4418) -> float:
    return 2 * math.pi * math.sqrt(radius_km**3 / mu_km3s2)


def _satellite_positions(spec: ConstellationSpec, times: np.ndarray) -> np.ndarray:
    """Inertial positions, shape (len(times), num_sats, 3)."""
    planes = np.repeat(np.arange(spec.num_planes), spec.sats_per_plane)
    slots = np.tile(np.arange(spec.sats_per_plane), spec.num_planes)
    raan = np.deg2rad(planes * spec.raan_spacing_deg)
    inc = math.radians(spec.inclination_deg)
    u0 = 2 * np.pi * slots / spec.sats_per_plane + np.deg2rad(planes * spec.intra_plane_phase_deg)
    u = u0[None, :] + spec.mean_motion * (times[:, None] - spec.epoch)
    cu, su = np.cos(u), np.sin(u)
    co, so = np.cos(raan)[None, :], np.sin(raan)[None, :]
    x = cu * co - su * math.cos(inc) * so
    y = cu * so + su * math.cos(inc) * co
    z = su * math.sin(inc)
    return spec.radius_km * np.stack([x, y, z], axis=-1)


def _station_positions(spec: ConstellationSpec, times: np.ndarray) -> np.ndarray:
    if not spec.ground_stations:
        return np.zeros((len(times), 0, 3))
    lat = np.deg2rad([g.lat_deg for g in spec.ground_stations])
    lon = np.deg2rad([g.lon_deg for g in spec.ground_stations])
    theta = lon[None, :] + EARTH_ROTATION_RAD_S * (times[:, None] - spec.epoch)
    r = spec.earth_radius_km
    return r * np.stack(
        [np.cos(lat) * np.cos(theta), np.cos(lat) * np.sin(theta), np.broadcast_to(np.sin(lat), theta.shape)],
        axis=-1,
    )


def propagate(spec: ConstellationSpec, t: float) -> np.ndarray:
    """Positions (km, inertial) of every node at time t, shape (num_nodes, 3)."""
    times = np.array([float(t)])
    sats = _satellite_positions(spec, times)
    gs = _station_positions(spec, times)
    return np.concatenate([sats, gs], axis=1)[0]


def segment_clearance(p1: np.ndarray, p2: np.ndarray) -> np.ndarray:
    """Minimum distance from the origin to segment p1-p2 (broadcast over leading dims)."""
    d = p2 - p1
    dd = np.sum(d * d, axis=-1)
    with np.errstate(invalid="ignore", divide="ignore"):
        s = np.where(dd > 0, -np.sum(p1 * d, axis=-1) / dd, 0.0)
    s = np.clip(s, 0.0, 1.0)
    closest = p1 + s[..., None] * d
    return np.linalg.norm(closest, axis=-1)


def line_of_sight(p1, p2, grazing_radius_km: float) -> bool:
    return bool(segment_clearance(np.asarray(p1, float), np.asarray(p2, float)) > grazing_radius_km)


@dataclass(frozen=True)
class RangeSeries:
    """ranges[t, i, j] in km, NaN where there is no line of sight."""

    dt_s: float
    ranges: np.ndarray = field(repr=False)

    @property
    def num_steps(self) -> int:
        return self.ranges.shape[0]

    @property
    def num_nodes(self) -> int:
        return self.ranges.shape[1]

    @property
    def times(self) -> np.ndarray:
        return np.arange(self.num_steps) * self.dt_s

    def snapshot(self, k: int) -> np.ndarray:
        return self.ranges[k]

    def to_csv(self, path: str | Path) -> None:
        path = Path(path)
        with path.open("w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["t_s", "i", "j", "range_km"])
            iu, ju = np.triu_indices(self.num_nodes, k=1)
            for k in range(self.num_steps):
                vals = self.ranges[k][iu, ju]
                ok = ~np.isnan(vals)
                t = _fmt(k * self.dt_s)
                for i, j, v in zip(iu[ok], ju[ok], vals[ok]):
                    w.writerow([t, i + 1, j + 1, f"{v:.6f}"])

    @classmethod
    def from_csv(cls, path: str | Path, num_nodes: int | None = None) -> "RangeSeries":
        """Read the long-format range CSV; pairs may appear in either or both orders."""
        rows = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
        if rows.size == 0:
            raise ValueError(f"{path}: no range rows")
        times = np.unique(rows[:, 0])
        dt = float(times[1] - times[0]) if len(times) > 1 else 60.0
        n = num_nodes or int(rows[:, 1:3].max())
        steps = int(round(times.max() / dt)) + 1
        ranges = np.full((steps, n, n), np.nan)
        k = np.rint(rows[:, 0] / dt).astype(int)
        i = rows[:, 1].astype(int) - 1
        j = rows[:, 2].astype(int) - 1
        ranges[k, i, j] = rows[:, 3]
        ranges[k, j, i] = rows[:, 3]
        return cls(dt_s=dt, ranges=ranges)


def _fmt(x: float) -> str:
    return str(int(x)) if float(x).is_integer() else repr(float(x))


def range_series(
    spec: ConstellationSpec,
    duration_s: float = 86400.0,
    dt_s: float = 60.0,
    grazing_radius_km: float | None = None,
) -> RangeSeries:
    if not duration_s >= dt_s > 0:
        raise ValueError("need duration_s >= dt_s > 0")
    grazing = spec.earth_radius_km if grazing_radius_km is None else grazing_radius_km
    steps = int(round(duration_s / dt_s))
    times = spec.epoch + np.arange(steps) * dt_s
    sats = _satellite_positions(spec, times)
    ns = spec.num_sats
    n = spec.num_nodes
    ranges = np.full((steps, n, n), np.nan)
    for lo in range(0, steps, _CHUNK):
        chunk = sats[lo : lo + _CHUNK]
        p1, p2 = chunk[:, :, None, :], chunk[:, None, :, :]
        dist = np.linalg.norm(p1 - p2, axis=-1)
        visible = segment_clearance(p1, p2) > grazing
        visible &= np.swapaxes(visible, 1, 2)
        ranges[lo : lo + _CHUNK, :ns, :ns] = np.where(visible, dist, np.nan)
    if spec.ground_stations:
        gs = _station_positions(spec, times)
        rel = sats[:, None, :, :] - gs[:, :, None, :]
        gdist = np.linalg.norm(rel, axis=-1)
        up = gs / np.linalg.norm(gs, axis=-1, keepdims=True)
        sin_el = np.sum(rel * up[:, :, None, :], axis=-1) / gdist
        mask = np.deg2rad([g.min_elevation_deg for g in spec.ground_stations])
        seen = sin_el > np.sin(mask)[None, :, None]
        block = np.where(seen, gdist, np.nan)
        ranges[:, ns:, :ns] = block
        ranges[:, :ns, ns:] = np.swapaxes(block, 1, 2)
    idx = np.arange(n)
    ranges[:, idx, idx] = np.nan
    return RangeSeries(dt_s=float(dt_s), ranges=ranges)
