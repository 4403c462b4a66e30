"""Experiment configuration: a strict JSON document."""
import json
import math
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

import numpy as np

SWEEP_PARAMS = ("eta", "g", "eps", "delta_f_mag")
SPACINGS = ("linear", "log")


class ConfigError(ValueError):
    """Malformed or invalid configuration; the message names the offending field."""


@dataclass(frozen=True)
class SweepSpec:
    param: str
    start: float
    stop: float
    count: int
    spacing: str = "linear"

    def points(self):
        if self.spacing == "log":
            return [float(x) for x in np.geomspace(self.start, self.stop, self.count)]
        return [float(x) for x in np.linspace(self.start, self.stop, self.count)]


@dataclass(frozen=True)
class ExperimentConfig:
    eta: complex = 1e-3
    g: float = 0.05
    eps: float = 1e-3
    delta_n_mag: float = 0.0
    delta_f_mag: float = 1e-3
    samples: int = 10_000
    seed: int = 0
    sweep: SweepSpec | None = field(default=None)

    def with_param(self, name, value):
        cast = {"eta": complex, "samples": int, "seed": int}.get(name, float)
        return replace(self, **{name: cast(value)})


_CONFIG_FIELDS = {f.name for f in fields(ExperimentConfig)}
_SWEEP_FIELDS = {f.name for f in fields(SweepSpec)}


def _real(name, value, *, nonneg=True):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"field '{name}': expected a number, got {value!r}")
    value = float(value)
    if not math.isfinite(value):
        raise ConfigError(f"field '{name}': must be finite")
    if nonneg and value < 0:
        raise ConfigError(f"field '{name}': must be >= 0, got {value!r}")
    return value


def _integer(name, value, lo, hi):
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"field '{name}': expected an integer, got {value!r}")
    if not lo <= value <= hi:
        raise ConfigError(f"field '{name}': must lie in [{lo}, {hi}], got {value!r}")
    return value


def _eta(value):
    if isinstance(value, list):
        if len(value) != 2:
            raise ConfigError("field 'eta': expected [real, imag]")
        return complex(_real("eta[0]", value[0], nonneg=False), _real("eta[1]", value[1], nonneg=False))
    return complex(_real("eta", value, nonneg=False))


def _sweep(raw):
    if not isinstance(raw, dict):
        raise ConfigError("field 'sweep': expected an object")
    unknown = sorted(set(raw) - _SWEEP_FIELDS)
    if unknown:
        raise ConfigError(f"field 'sweep.{unknown[0]}': unknown key")
    missing = sorted({"param", "start", "stop", "count"} - set(raw))
    if missing:
        raise ConfigError(f"field 'sweep.{missing[0]}': required")
    if raw["param"] not in SWEEP_PARAMS:
        raise ConfigError(f"field 'sweep.param': must be one of {SWEEP_PARAMS}, got {raw['param']!r}")
    spacing = raw.get("spacing", "linear")
    if spacing not in SPACINGS:
        raise ConfigError(f"field 'sweep.spacing': must be one of {SPACINGS}, got {spacing!r}")
    start = _real("sweep.start", raw["start"], nonneg=False)
    stop = _real("sweep.stop", raw["stop"], nonneg=False)
    count = _integer("sweep.count", raw["count"], 2, 10_000_000)
    if spacing == "log" and (start <= 0 or stop <= 0):
        raise ConfigError("field 'sweep.start': log spacing needs positive start and stop")
    return SweepSpec(raw["param"], start, stop, count, spacing)


def parse_config(raw):
    """Validate a decoded JSON object into an :class:`ExperimentConfig`."""
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    unknown = sorted(set(raw) - _CONFIG_FIELDS)
    if unknown:
        raise ConfigError(f"field '{unknown[0]}': unknown key")
    kw = {}
    if "eta" in raw:
        kw["eta"] = _eta(raw["eta"])
    for name in ("g", "eps", "delta_n_mag", "delta_f_mag"):
        if name in raw:
            kw[name] = _real(name, raw[name])
    if "samples" in raw:
        kw["samples"] = _integer("samples", raw["samples"], 1, 10**9)
    if "seed" in raw:
        kw["seed"] = _integer("seed", raw["seed"], 0, 2**64 - 1)
    if raw.get("sweep") is not None:
        kw["sweep"] = _sweep(raw["sweep"])
    return ExperimentConfig(**kw)


def load_config(path):
    text = Path(path).read_text(encoding="utf-8")
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    return parse_config(raw)
