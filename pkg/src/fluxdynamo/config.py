"""Scenario config files.

Grammar (one scenario per file)::

    # comment            ; also a comment
    [radial_modes]       <- exactly one header, before any key
    eta = 1e-3           <- scenario parameter, numeric
    sweep = eta 1e-6 1e-1 6 log   <- key start stop count [linear|log]
    output = radial.csv
    format = csv         <- csv or json

Keys may appear once. Whitespace around ``=`` and tokens is ignored.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ConfigError
from .scenarios import REQUIRED, SCENARIOS

FORMATS = ("csv", "json")
RESERVED = ("sweep", "output", "format")
_HEADER = re.compile(r"^\[\s*([A-Za-z_][A-Za-z0-9_]*)\s*\]$")


@dataclass(frozen=True)
class Sweep:
    key: str
    start: float
    stop: float
    count: int
    spacing: str = "linear"

    def values(self) -> np.ndarray:
        if self.spacing == "log":
            return np.logspace(math.log10(self.start), math.log10(self.stop), self.count)
        return np.linspace(self.start, self.stop, self.count)


@dataclass(frozen=True)
class ScenarioConfig:
    scenario: str
    parameters: dict[str, float]
    sweep: Sweep | None = None
    output: str | None = None
    format: str = "csv"
    source: str | None = field(default=None, compare=False)

    def cells(self) -> list[dict[str, float]]:
        """Parameter maps in sweep order; a single cell without a sweep."""
        if self.sweep is None:
            return [dict(self.parameters)]
        return [{**self.parameters, self.sweep.key: float(v)} for v in self.sweep.values()]


def _number(text: str, key: str, line: int, path) -> float:
    try:
        value = float(text)
    except ValueError:
        raise ConfigError(f"value for '{key}' is not a number: {text!r}", line, path) from None
    if not math.isfinite(value):
        raise ConfigError(f"value for '{key}' must be finite", line, path)
    return value


def parse_config(text: str, path: str | None = None) -> ScenarioConfig:
    scenario = None
    header_line = None
    seen: dict[str, int] = {}
    params: dict[str, float] = {}
    sweep = None
    output = None
    fmt = "csv"

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line[0] in "#;":
            continue
        m = _HEADER.match(line)
        if m:
            if scenario is not None:
                raise ConfigError("only one [scenario] header is allowed", lineno, path)
            name = m.group(1)
            if name not in SCENARIOS:
                known = ", ".join(SCENARIOS)
                raise ConfigError(f"unknown scenario '{name}' (known: {known})", lineno, path)
            scenario, header_line = SCENARIOS[name], lineno
            continue
        if "=" not in line:
            raise ConfigError(f"expected 'key = value', got {line!r}", lineno, path)
        if scenario is None:
            raise ConfigError("key before the [scenario] header", lineno, path)
        key, _, value = (part.strip() for part in line.partition("="))
        if not key:
            raise ConfigError("empty key", lineno, path)
        if key in seen:
            raise ConfigError(f"duplicate key '{key}' (first on line {seen[key]})", lineno, path)
        seen[key] = lineno

        if key == "output":
            if not value:
                raise ConfigError("output path is empty", lineno, path)
            output = value
        elif key == "format":
            if value not in FORMATS:
                raise ConfigError(f"format must be one of {FORMATS}, got {value!r}", lineno, path)
            fmt = value
        elif key == "sweep":
            tokens = value.split()
            if len(tokens) not in (4, 5):
                raise ConfigError("sweep needs: key start stop count [linear|log]", lineno, path)
            skey = tokens[0]
            if skey not in scenario.params:
                raise ConfigError(f"unknown sweep key '{skey}' for scenario '{scenario.name}'", lineno, path)
            start = _number(tokens[1], "sweep start", lineno, path)
            stop = _number(tokens[2], "sweep stop", lineno, path)
            count_f = _number(tokens[3], "sweep count", lineno, path)
            if count_f != int(count_f) or count_f < 2:
                raise ConfigError("sweep count must be an integer >= 2", lineno, path)
            spacing = tokens[4] if len(tokens) == 5 else "linear"
            if spacing not in ("linear", "log"):
                raise ConfigError(f"sweep spacing must be 'linear' or 'log', got {spacing!r}", lineno, path)
            if spacing == "log" and not (start > 0 and stop > 0):
                raise ConfigError("log sweep bounds must be positive", lineno, path)
            sweep = Sweep(skey, start, stop, int(count_f), spacing)
        elif key in scenario.params:
            number = _number(value, key, lineno, path)
            if key in scenario.integer_params and number != int(number):
                raise ConfigError(f"'{key}' must be an integer", lineno, path)
            params[key] = number
        else:
            raise ConfigError(f"unknown key '{key}' for scenario '{scenario.name}'", lineno, path)

    if scenario is None:
        raise ConfigError("missing [scenario] header", None, path)
    swept = sweep.key if sweep else None
    for key, default in scenario.params.items():
        if default is REQUIRED and key not in params and key != swept:
            raise ConfigError(f"missing required key '{key}' for scenario '{scenario.name}'", header_line, path)
    if sweep is not None and sweep.key in scenario.integer_params:
        if any(v != int(v) for v in sweep.values()):
            raise ConfigError(f"sweep over integer key '{sweep.key}' yields non-integers", seen["sweep"], path)
    return ScenarioConfig(scenario.name, params, sweep, output, fmt, source=path)


def load_config(path) -> ScenarioConfig:
    p = Path(path)
    try:
        text = p.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc.strerror}", None, str(p)) from None
    return parse_config(text, str(p))
