"""Scenario configuration: INI-style sections, every key defaulted.

An empty file reproduces the reference Iridium-like scenario.
"""
from __future__ import annotations

import configparser
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from .constellation import ConstellationSpec, GroundStation
from .linkbudget import LinkParams


class ConfigError(ValueError):
    pass


DEFAULTS: dict[str, dict[str, Any]] = {
    "constellation": {
        "num_planes": 6,
        "sats_per_plane": 11,
        "altitude_km": 780.0,
        "inclination_deg": 86.0,
        "raan_spacing_deg": 30.0,
        "intra_plane_phase_deg": 0.0,
        "earth_radius_km": 6371.0,
        "mu_km3s2": 398600.4418,
        "grazing_radius_km": None,
        "ground_stations": "",
    },
    "link": {
        "f_hz": 146e6,
        "pt_dbm": 30.0,
        "gt_dbi": 0.0,
        "gr_dbi": 0.0,
        "t_sys_k": 1000.0,
        "r_bps": 6400.0,
        "nf_db": 0.0,
        "bw_hz": 25e3,
    },
    "run": {
        "duration_s": 86400.0,
        "dt_s": 60.0,
        "source": 34,
        "sinks": "6,13,15",
        "field_m": 8,
        "min_field": False,
        "unit_bps": 6400.0,
        "threshold": 2.1,
        "retry_paths": 0,
        "seed": 0,
    },
    "io": {
        "output_dir": "out",
        "range_import": "",
        "graph_import": "",
    },
}


def _coerce(section: str, key: str, raw: str) -> Any:
    default = DEFAULTS[section][key]
    try:
        if isinstance(default, bool):
            low = raw.strip().lower()
            if low in ("1", "true", "yes", "on"):
                return True
            if low in ("0", "false", "no", "off"):
                return False
            raise ValueError(raw)
        if isinstance(default, int):
            return int(raw)
        if isinstance(default, float) or default is None:
            return None if raw.strip() == "" else float(raw)
        return raw.strip()
    except ValueError:
        raise ConfigError(f"[{section}] {key}: cannot parse {raw!r}") from None


@dataclass
class ScenarioConfig:
    values: dict[str, dict[str, Any]] = field(default_factory=lambda: {s: dict(v) for s, v in DEFAULTS.items()})

    @classmethod
    def load(cls, path: str | Path | None = None, overrides: dict[str, str] | None = None) -> "ScenarioConfig":
        cfg = cls()
        if path:
            parser = configparser.ConfigParser()
            try:
                with open(path) as fh:
                    parser.read_file(fh)
            except OSError as exc:
                raise ConfigError(f"{path}: {exc.strerror}") from None
            except configparser.Error as exc:
                raise ConfigError(f"{path}: {exc}") from None
            for section in parser.sections():
                if section not in DEFAULTS:
                    raise ConfigError(f"unknown section [{section}]")
                for key, raw in parser.items(section):
                    cfg.set(section, key, raw)
        for dotted, raw in (overrides or {}).items():
            section, key = dotted.split(".", 1)
            cfg.set(section, key, raw)
        cfg.validate()
        return cfg

    def set(self, section: str, key: str, raw: str) -> None:
        if key not in DEFAULTS.get(section, {}):
            raise ConfigError(f"unknown key [{section}] {key}")
        self.values[section][key] = _coerce(section, key, raw)

    def __getitem__(self, section: str) -> dict[str, Any]:
        return self.values[section]

    def validate(self) -> None:
        run = self["run"]
        if not run["dt_s"] > 0:
            raise ConfigError("dt_s must be positive")
        if run["dt_s"] > run["duration_s"]:
            raise ConfigError("dt_s exceeds duration_s")
        if not self.sinks:
            raise ConfigError("sink list is empty")
        if run["source"] in self.sinks:
            raise ConfigError("the source is also listed as a sink")
        if not 1 <= run["field_m"] <= 16:
            raise ConfigError("field_m must be within 1..16")
        if run["unit_bps"] <= 0:
            raise ConfigError("unit_bps must be positive")
        try:
            self.constellation()
            self.link()
        except ValueError as exc:
            raise ConfigError(str(exc)) from None

    @property
    def sinks(self) -> list[int]:
        raw = str(self["run"]["sinks"]).replace(";", ",")
        try:
            return [int(x) for x in raw.split(",") if x.strip()]
        except ValueError:
            raise ConfigError(f"bad sink list {raw!r}") from None

    def constellation(self) -> ConstellationSpec:
        c = dict(self["constellation"])
        c.pop("grazing_radius_km")
        stations = []
        for item in filter(None, (s.strip() for s in c.pop("ground_stations").split(";"))):
            try:
                stations.append(GroundStation(*(float(x) for x in item.split(":"))))
            except (TypeError, ValueError):
                raise ConfigError(f"bad ground station {item!r}, expected lat:lon[:min_elev]") from None
        return ConstellationSpec(ground_stations=tuple(stations), **c)

    def link(self) -> LinkParams:
        return LinkParams(**self["link"])

    def dump(self) -> str:
        lines = []
        for section, vals in self.values.items():
            lines.append(f"[{section}]")
            lines.extend(f"{k} = {'' if v is None else v}" for k, v in vals.items())
            lines.append("")
        return "\n".join(lines)
