"""Configuration file (TOML).

Example::

    protocol = "common.xml"
    db = "types.json"
    format = "json"
    dedup = true
    ignore = ["wrap_360"]

    [conversions]
    cm_to_m = "m"

    [mining]
    eps_approx = 0.05

Relative paths are taken relative to the configuration file.  Unknown keys are
errors.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from pathlib import Path

import tomli

from unitlint.deduction.mining import MiningConfig
from unitlint.units import Frame, UnitError, parse_unit_string

FORMATS = ("human", "json")
_PATH_KEYS = ("protocol", "qoi", "db")
_KEYS = set(_PATH_KEYS) | {"format", "dedup", "explain", "ignore", "conversions", "mining", "sample_rate_hz"}
_MINING_KEYS = {f.name for f in dataclasses.fields(MiningConfig)} - {"conversion_table"}


class ConfigError(ValueError):
    pass


@dataclass
class Config:
    protocol: Path | None = None
    qoi: Path | None = None
    db: Path | None = None
    format: str = "human"
    dedup: bool = True
    explain: bool = False
    ignore: tuple = ()
    conversions: dict = field(default_factory=dict)
    mining: MiningConfig = field(default_factory=MiningConfig)
    sample_rate_hz: float = 1.0


def config_from_dict(raw: dict, base_dir: Path = Path(".")) -> Config:
    unknown = set(raw) - _KEYS
    if unknown:
        raise ConfigError(f"unknown configuration keys: {', '.join(sorted(unknown))}")
    cfg = Config()
    for key in _PATH_KEYS:
        if key in raw:
            if not isinstance(raw[key], str):
                raise ConfigError(f"{key} must be a path string")
            setattr(cfg, key, base_dir / raw[key])
    if "format" in raw:
        if raw["format"] not in FORMATS:
            raise ConfigError(f"format must be one of {', '.join(FORMATS)}")
        cfg.format = raw["format"]
    for key in ("dedup", "explain"):
        if key in raw:
            if not isinstance(raw[key], bool):
                raise ConfigError(f"{key} must be true or false")
            setattr(cfg, key, raw[key])
    if "ignore" in raw:
        names = raw["ignore"]
        if not isinstance(names, list) or not all(isinstance(n, str) for n in names):
            raise ConfigError("ignore must be a list of function names")
        cfg.ignore = tuple(names)
    if "conversions" in raw:
        table = raw["conversions"]
        if not isinstance(table, dict):
            raise ConfigError("[conversions] must be a table of function = unit")
        for name, spec in table.items():
            try:
                if isinstance(spec, dict):
                    extra = set(spec) - {"unit", "frame"}
                    if extra or "unit" not in spec:
                        raise ConfigError(f"conversions.{name}: expected unit and optional frame")
                    unit = parse_unit_string(spec["unit"]).with_frame(Frame.parse(spec.get("frame")))
                else:
                    unit = parse_unit_string(str(spec))
            except (UnitError, ValueError) as exc:
                raise ConfigError(f"conversions.{name}: {exc}") from None
            cfg.conversions[name] = unit
    if "mining" in raw:
        table = raw["mining"]
        if not isinstance(table, dict):
            raise ConfigError("[mining] must be a table")
        unknown = set(table) - _MINING_KEYS
        if unknown:
            raise ConfigError(f"unknown [mining] keys: {', '.join(sorted(unknown))}")
        try:
            cfg.mining = MiningConfig(**table)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"[mining]: {exc}") from None
    if "sample_rate_hz" in raw:
        rate = raw["sample_rate_hz"]
        if isinstance(rate, bool) or not isinstance(rate, (int, float)) or rate <= 0:
            raise ConfigError("sample_rate_hz must be a positive number")
        cfg.sample_rate_hz = float(rate)
    return cfg


def load_config(path) -> Config:
    path = Path(path)
    try:
        with open(path, "rb") as fh:
            raw = tomli.load(fh)
    except OSError as exc:
        raise ConfigError(f"{path}: {exc.strerror}") from None
    except tomli.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from None
    return config_from_dict(raw, path.parent)
