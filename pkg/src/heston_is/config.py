"""Experiment configuration: a sectioned key-value file with command-line overrides.

Example::

    [experiment]
    kind = vrr-sweep
    regime = short

    [model]
    kappa = 15
    theta = 0.5
    sigma = 1
    rho = -0.1
    v0 = 0.5

    [market]
    s0 = 2000
    moneyness = 1.0, 1.5, 2.0
    maturities = 1/252, 1

    [simulation]
    paths = 262144
    scheme = milstein
    seed = 7

Unset keys fall back to per-experiment defaults (see :mod:`heston_is.experiments`). Numbers
may be written as fractions such as ``1/252``.
"""

from __future__ import annotations

import configparser
import io
from dataclasses import dataclass, fields
from fractions import Fraction

from .errors import HestonISError
from .model import HestonParams, Scheme

KINDS = ("table1", "vrr-sweep", "scgf-check", "optimality-report", "price")
REGIMES = ("short", "deep", "both")

HIGH_VOL = HestonParams(kappa=60.0, theta=0.36, sigma=3.0, rho=-0.1, v0=0.36)
DEEP_OTM = HestonParams(kappa=15.0, theta=0.5, sigma=1.0, rho=-0.1, v0=0.5)
DEFAULT_MONEYNESS = tuple(round(1.0 + 0.1 * i, 10) for i in range(11))


class ConfigError(HestonISError):
    """Malformed configuration file or option."""


def parse_number(text: str) -> float:
    text = text.strip()
    try:
        if "/" in text:
            return float(Fraction(text))
        return float(text)
    except (ValueError, ZeroDivisionError):
        raise ConfigError(f"not a number: {text!r}") from None


def parse_list(text: str) -> tuple[float, ...]:
    items = [t for t in text.replace(";", ",").split(",") if t.strip()]
    if not items:
        raise ConfigError("empty list")
    return tuple(parse_number(t) for t in items)


def _fmt(x: float) -> str:
    return repr(float(x))


@dataclass(frozen=True)
class ExperimentConfig:
    kind: str = "table1"
    regime: str | None = None
    params: HestonParams | None = None
    s0: float = 2000.0
    strike: float | None = None
    maturity: float | None = None
    moneyness: tuple[float, ...] | None = None
    maturities: tuple[float, ...] | None = None
    paths: int = 2**18
    steps: int | None = None
    scheme: Scheme = Scheme.MILSTEIN
    seed: int = 20240101
    chunk_size: int = 2**14
    workers: int | None = None
    scgf_points: int = 9
    scgf_fraction: float = 0.6
    scgf_scales: tuple[float, ...] = (1e-2, 1e-3, 1e-4)
    output: str | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConfigError(f"unknown experiment kind {self.kind!r}; choose from {', '.join(KINDS)}")
        if self.regime is not None and self.regime not in REGIMES:
            raise ConfigError(f"unknown regime {self.regime!r}")
        if self.regime == "both" and self.kind not in ("scgf-check", "optimality-report"):
            raise ConfigError("regime 'both' only applies to scgf-check and optimality-report")
        for name in ("moneyness", "maturities"):
            grid = getattr(self, name)
            if grid is not None and any(b <= a for a, b in zip(grid, grid[1:])):
                raise ConfigError(f"{name} grid must be strictly increasing")
        if not self.paths >= 2:
            raise ConfigError("paths must be at least 2")
        if self.steps is not None and self.steps < 1:
            raise ConfigError("steps must be positive")
        if not 0 <= self.seed < 2**64:
            raise ConfigError("seed must fit in 64 bits")
        try:
            object.__setattr__(self, "scheme", Scheme.parse(self.scheme))
        except HestonISError as exc:
            raise ConfigError(str(exc)) from None


_SECTIONS = {
    "experiment": {"kind": "kind", "regime": "regime", "output": "output"},
    "market": {"s0": "s0", "strike": "strike", "maturity": "maturity", "moneyness": "moneyness", "maturities": "maturities"},
    "simulation": {"paths": "paths", "steps": "steps", "scheme": "scheme", "seed": "seed", "chunk_size": "chunk_size", "workers": "workers"},
    "scgf": {"points": "scgf_points", "fraction": "scgf_fraction", "scales": "scgf_scales"},
}
_MODEL_KEYS = ("kappa", "theta", "sigma", "rho", "v0")
_INT_FIELDS = {"paths", "steps", "seed", "chunk_size", "workers", "scgf_points"}
_LIST_FIELDS = {"moneyness", "maturities", "scgf_scales"}
_STR_FIELDS = {"kind", "regime", "output", "scheme"}


def _convert(name: str, raw: str):
    if name in _STR_FIELDS:
        return raw.strip()
    if name in _LIST_FIELDS:
        return parse_list(raw)
    if name in _INT_FIELDS:
        try:
            return int(raw.strip())
        except ValueError:
            value = parse_number(raw)
        if not value.is_integer():
            raise ConfigError(f"{name} must be an integer, got {raw!r}")
        return int(value)
    return parse_number(raw)


def _parse(text: str) -> dict:
    cp = configparser.ConfigParser(interpolation=None)
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"cannot parse config: {exc}") from None
    values: dict = {}
    for section in cp.sections():
        if section == "model":
            keys = set(cp[section])
            unknown = keys - set(_MODEL_KEYS)
            if unknown:
                raise ConfigError(f"unknown key(s) in [model]: {', '.join(sorted(unknown))}")
            missing = set(_MODEL_KEYS) - keys
            if missing:
                raise ConfigError(f"[model] is missing: {', '.join(sorted(missing))}")
            try:
                values["params"] = HestonParams(**{k: parse_number(cp[section][k]) for k in _MODEL_KEYS})
            except HestonISError as exc:
                raise ConfigError(f"[model]: {exc}") from None
            continue
        if section not in _SECTIONS:
            raise ConfigError(f"unknown section [{section}]")
        mapping = _SECTIONS[section]
        for key, raw in cp[section].items():
            if key not in mapping:
                raise ConfigError(f"unknown key {key!r} in [{section}]")
            values[mapping[key]] = _convert(mapping[key], raw)
    return values


def _merge(values: dict, overrides: dict) -> ExperimentConfig:
    names = {f.name for f in fields(ExperimentConfig)}
    changes = {k: v for k, v in overrides.items() if v is not None}
    bad = set(changes) - names
    if bad:
        raise ConfigError(f"unknown override(s): {', '.join(sorted(bad))}")
    return ExperimentConfig(**{**values, **changes})


def loads(text: str, **overrides) -> ExperimentConfig:
    """Parse a configuration; non-``None`` overrides replace file values before validation."""
    return _merge(_parse(text), overrides)


def load(path: str, **overrides) -> ExperimentConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path!r}: {exc.strerror}") from None
    return loads(text, **overrides)


def dumps(cfg: ExperimentConfig) -> str:
    """Serialise every set field; ``loads(dumps(c)) == c``."""
    cp = configparser.ConfigParser(interpolation=None)
    default = ExperimentConfig()
    for section, mapping in _SECTIONS.items():
        entries = {}
        for key, name in mapping.items():
            value = getattr(cfg, name)
            if value is None:
                continue
            if section == "experiment" or value != getattr(default, name):
                if isinstance(value, tuple):
                    entries[key] = ", ".join(_fmt(v) for v in value)
                elif isinstance(value, Scheme):
                    entries[key] = value.value
                elif isinstance(value, float):
                    entries[key] = _fmt(value)
                else:
                    entries[key] = str(value)
        if entries:
            cp[section] = entries
        if section == "experiment" and cfg.params is not None:
            cp["model"] = {k: _fmt(getattr(cfg.params, k)) for k in _MODEL_KEYS}
    buf = io.StringIO()
    cp.write(buf)
    return buf.getvalue()


def with_overrides(cfg: ExperimentConfig, **overrides) -> ExperimentConfig:
    """Apply non-``None`` overrides (command-line flags win over the file)."""
    return _merge({f.name: getattr(cfg, f.name) for f in fields(ExperimentConfig)}, overrides)
