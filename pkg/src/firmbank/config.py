"""Flat ``key = value`` configuration files for :class:`ModelParams`."""
from __future__ import annotations

import dataclasses
import enum

from .model import ModelParams


class ConfigError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(message if line is None else f"line {line}: {message}")


_FIELDS = {f.name: f for f in dataclasses.fields(ModelParams)}
_INT_KEYS = {"n_firms", "horizon", "seed"}
_FLOAT_KEYS = {"phi", "sigma", "alpha", "omega", "initial_equity", "initial_capital"}


def _convert(key: str, raw: str):
    if key in _INT_KEYS:
        return int(raw, 0)
    if key in _FLOAT_KEYS:
        return float(raw)
    if key == "entrant_equity":
        return None if raw.lower() == "none" else float(raw)
    if key == "snapshots":
        if raw.lower() == "none":
            return None
        return tuple(int(s) for s in raw.split(",") if s.strip())
    # enum-valued
    return _FIELDS[key].default.__class__(raw.lower())


def parse_config(text: str) -> ModelParams:
    """Parse ``key = value`` lines; ``#`` starts a comment; missing keys keep their defaults."""
    values: dict[str, object] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"expected key = value, got {line!r}", lineno)
        key, raw = (s.strip() for s in line.split("=", 1))
        if key not in _FIELDS:
            raise ConfigError(f"unknown key {key!r}", lineno)
        if key in values:
            raise ConfigError(f"duplicate key {key!r}", lineno)
        try:
            values[key] = _convert(key, raw)
        except ValueError as exc:
            raise ConfigError(f"bad value for {key}: {raw!r} ({exc})", lineno) from None
    return ModelParams(**values)


def _format(value) -> str:
    if isinstance(value, enum.Enum):
        return value.value
    if value is None:
        return "none"
    if isinstance(value, tuple):
        return ",".join(str(v) for v in value)
    # repr of a float is its shortest exact round-trip form
    return repr(value)


def serialize_config(p: ModelParams) -> str:
    return "".join(f"{name} = {_format(getattr(p, name))}\n" for name in _FIELDS)


def params_dict(p: ModelParams) -> dict:
    """JSON-friendly view of the parameters."""
    out = {}
    for name in _FIELDS:
        v = getattr(p, name)
        out[name] = v.value if isinstance(v, enum.Enum) else (list(v) if isinstance(v, tuple) else v)
    return out
