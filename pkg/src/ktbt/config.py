"""Flat ``key=value`` experiment configuration files.

One or more ``key=value`` pairs per line, whitespace separated; ``#``
starts a comment. List values are comma separated. Example::

    mode=ktbt
    composition=0,0,3,3,3,3
    targets=10,10,10,10
    iterations=20000 trials=10
    study=compare
"""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from .sar.trial import Mode, SimConfig
from .sar.world import ConfigurationError

STUDIES = ("compare", "opportunities", "comm_range", "heterogeneity")
COMPARE_VARIANTS = ("bl1", "bl2", "ktbt")
REQUIRED = ("composition", "targets", "iterations", "trials")


class ConfigError(ValueError):
    def __init__(self, message: str, key: str | None = None, line: int | None = None):
        self.key = key
        self.line = line
        where = []
        if line is not None:
            where.append(f"line {line}")
        if key is not None:
            where.append(key)
        super().__init__(f"{': '.join(where)}: {message}" if where else message)


def _ints(n):
    def conv(text):
        parts = text.split(",")
        if len(parts) != n:
            raise ValueError(f"requires {n} values")
        vals = [int(p) for p in parts]
        if any(v < 0 for v in vals):
            raise ValueError("values must be non-negative")
        return tuple(vals)
    return conv


def _floats(n):
    def conv(text):
        parts = text.split(",")
        if len(parts) != n:
            raise ValueError(f"requires {n} values")
        return tuple(float(p) for p in parts)
    return conv


def _bool(text):
    low = text.lower()
    if low in ("1", "true", "yes", "on", "with"):
        return True
    if low in ("0", "false", "no", "off", "without"):
        return False
    raise ValueError(f"expected a boolean, got {text!r}")


def _study(text):
    if text not in STUDIES:
        raise ValueError(f"expected one of {', '.join(STUDIES)}")
    return text


def _list(text):
    vals = [v.strip() for v in text.split(",")]
    if not all(vals):
        raise ValueError("empty list element")
    return tuple(vals)


_PARSERS = {
    "mode": Mode.parse,
    "composition": _ints(6),
    "targets": _ints(4),
    "d_coms": float,
    "obstacles": _bool,
    "iterations": int,
    "trials": int,
    "seed": int,
    "arena": _floats(2),
    "speed": float,
    "d_t": float,
    "d_c": float,
    "t1_limit": int,
    "t2_limit": int,
    "study": _study,
    "study_values": _list,
    "output_dir": str,
}


@dataclass
class ExperimentSpec:
    config: SimConfig
    study: str | None = None
    study_values: tuple = ()
    output_dir: Path | None = None
    source: dict[str, int] = field(default_factory=dict)


def _study_values(study: str | None, raw: tuple, line: int | None) -> tuple:
    if study is None:
        if raw:
            raise ConfigError("given without a study", "study_values", line)
        return ()
    try:
        if study == "compare":
            vals = raw or COMPARE_VARIANTS
            bad = [v for v in vals if v.lower() not in COMPARE_VARIANTS]
            if bad:
                raise ValueError(f"unknown variant {bad[0]!r}; expected {', '.join(COMPARE_VARIANTS)}")
            return tuple(v.lower() for v in vals)
        if study == "opportunities":
            vals = tuple(int(v) for v in raw)
            if any(v < 0 for v in vals):
                raise ValueError("target counts must be non-negative")
        elif study == "comm_range":
            vals = tuple(float(v) for v in raw)
            if any(v < 0 for v in vals):
                raise ValueError("ranges must be non-negative")
        else:
            if raw:
                raise ValueError("the heterogeneity study takes no values")
            return ()
    except ValueError as exc:
        raise ConfigError(str(exc), "study_values", line) from None
    if not vals:
        raise ConfigError(f"study {study} requires study_values", "study_values", line)
    return vals


def parse_config(text: str) -> ExperimentSpec:
    values: dict[str, object] = {}
    where: dict[str, int] = {}
    lines = text.splitlines()
    for n, raw in enumerate(lines, start=1):
        body = raw.split("#", 1)[0]
        for token in body.split():
            key, sep, val = token.partition("=")
            if not sep:
                raise ConfigError(f"expected key=value, got {token!r}", None, n)
            if key not in _PARSERS:
                raise ConfigError("unknown key", key, n)
            if key in values:
                raise ConfigError(f"duplicate key (first set on line {where[key]})", key, n)
            if not val:
                raise ConfigError("missing value", key, n)
            try:
                values[key] = _PARSERS[key](val)
            except ValueError as exc:
                msg = str(exc)
                if msg.startswith("requires"):
                    msg = f"{key} {msg}"
                elif "invalid literal" in msg or "could not convert" in msg:
                    msg = f"type mismatch: {val!r}"
                raise ConfigError(msg, key, n) from None
            where[key] = n
    end = len(lines) + 1
    for key in REQUIRED:
        if key not in values:
            raise ConfigError("missing required key", key, end)

    study = values.pop("study", None)
    study_values = _study_values(study, values.pop("study_values", ()), where.get("study_values", where.get("study")))
    output_dir = values.pop("output_dir", None)
    try:
        config = SimConfig(**values)
    except ConfigurationError as exc:
        if "density" in str(exc):
            key = "composition"
        else:
            key = next((k for k in ("composition", "targets", "arena") if k in str(exc)), None)
        raise ConfigError(str(exc), key, where.get(key)) from None
    return ExperimentSpec(config, study, study_values, Path(output_dir) if output_dir else None, where)


def load_config(path) -> ExperimentSpec:
    return parse_config(Path(path).read_text())
