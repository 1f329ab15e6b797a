"""Run configuration: flat ``key = value`` text or JSON.

Numbers may be written as decimals, fractions (``1/10``) or powers
(``2^-4``); lists are comma separated, optionally in brackets.  ``#`` starts
a comment in the text format.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field, fields

from .errors import ConfigError

COMMANDS = ("deriv-test", "diffusion", "black-scholes", "stability-scan", "bounds")

# extra numeric parameters forwarded to the manufactured case
CASE_PARAMS = ("sigma", "r", "a", "b", "d", "p", "c_l", "c_r", "lambda_l", "lambda_r", "T")

_ALIASES = {"lambda": "lam", "gamma3": "free_param", "gamma4": "free_param", "gamma": "free_param"}

_POWER = re.compile(r"^\s*([-+]?[\d.]+(?:e[-+]?\d+)?)\s*(?:\^|\*\*)\s*\(?\s*([-+]?[\d.]+)\s*\)?\s*$", re.I)
_FRACTION = re.compile(r"^\s*([-+]?[\d.]+(?:e[-+]?\d+)?)\s*/\s*([-+]?[\d.]+(?:e[-+]?\d+)?)\s*$", re.I)


def parse_number(text) -> float:
    if isinstance(text, (int, float)) and not isinstance(text, bool):
        return float(text)
    s = str(text).strip()
    m = _POWER.match(s)
    if m:
        return float(m.group(1)) ** float(m.group(2))
    m = _FRACTION.match(s)
    if m:
        den = float(m.group(2))
        if den == 0:
            raise ValueError(f"zero denominator in {s!r}")
        return float(m.group(1)) / den
    return float(s)


def parse_list(text) -> list:
    if isinstance(text, (list, tuple)):
        return [parse_number(v) for v in text]
    s = str(text).strip()
    if s.startswith("[") and s.endswith("]"):
        s = s[1:-1]
    return [parse_number(p) for p in s.split(",") if p.strip()]


@dataclass
class RunConfig:
    command: str
    case: str | None = None
    order: int = 3
    alpha: float | None = None
    lam: float | None = None
    free_param: float = 0.0
    grid: list = field(default_factory=list)
    tau: object = "h"
    boundary: str = "one-sided"
    case_params: dict = field(default_factory=dict)
    alphas: list = field(default_factory=list)
    lambdas: list = field(default_factory=list)
    gammas: list = field(default_factory=list)
    n_terms: int = 250
    samples: int = 4096
    h: float = 0.01
    out: str | None = None
    format: str = "csv"

    def validate(self) -> "RunConfig":
        if self.command not in COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}; expected one of {', '.join(COMMANDS)}")
        if self.format not in ("csv", "json"):
            raise ConfigError(f"format must be csv or json, got {self.format!r}")
        if self.command in ("deriv-test", "diffusion", "black-scholes"):
            if self.case is None:
                raise ConfigError(f"{self.command} needs a case")
            if self.order not in (2, 3):
                raise ConfigError(f"order must be 2 or 3, got {self.order}")
            if len(self.grid) < 2:
                raise ConfigError("grid needs at least two spacings to estimate orders")
            if any(b >= a for a, b in zip(self.grid, self.grid[1:])):
                raise ConfigError("grid spacings must be strictly decreasing")
            for h in self.grid:
                self.intervals(h)
            if self.tau != "h" and not (isinstance(self.tau, float) and self.tau > 0):
                raise ConfigError(f"tau must be 'h' or a positive number, got {self.tau!r}")
        if self.command == "stability-scan" and not (self.alphas and self.lambdas and self.gammas):
            raise ConfigError("stability-scan needs alphas, lambdas and gammas")
        if self.command == "bounds" and not self.alphas:
            raise ConfigError("bounds needs alphas")
        return self

    @staticmethod
    def intervals(h: float, length: float = 1.0) -> int:
        M = round(length / h)
        if M < 1 or abs(M * h - length) > 1e-9 * length:
            raise ConfigError(f"spacing {h} does not divide the unit interval")
        return M

    def steps(self, h: float, T: float = 1.0) -> int:
        if self.tau == "h":
            return self.intervals(h, T)
        N = round(T / self.tau)
        if abs(N * self.tau - T) > 1e-9 * T:
            raise ConfigError(f"tau={self.tau} does not divide T={T}")
        return N


_FIELDS = {f.name for f in fields(RunConfig)} - {"case_params"}
_INTS = {"order", "n_terms", "samples"}
_FLOATS = {"alpha", "lam", "free_param", "h"}
_LISTS = {"grid", "alphas", "lambdas", "gammas"}
_CASE_KEYS = {k.lower(): k for k in CASE_PARAMS}


def _coerce(key, value, line):
    try:
        if key in _INTS:
            v = parse_number(value)
            if v != int(v):
                raise ValueError(f"expected an integer, got {value!r}")
            return int(v)
        if key in _FLOATS or key in CASE_PARAMS:
            return parse_number(value)
        if key in _LISTS:
            return parse_list(value)
        if key == "tau":
            return "h" if str(value).strip().lower() == "h" else parse_number(value)
        return str(value).strip()
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad value for {key}: {exc}", line) from None


def from_mapping(items, command: str | None = None) -> RunConfig:
    """Build a config from ``(key, value, line)`` triples."""
    kw, extra = {}, {}
    for key, value, line in items:
        key = key.strip().lower().replace("-", "_")
        key = _ALIASES.get(key, key)
        if key in _CASE_KEYS:
            extra[_CASE_KEYS[key]] = _coerce(_CASE_KEYS[key], value, line)
        elif key in _FIELDS:
            kw[key] = _coerce(key, value, line)
        else:
            raise ConfigError(f"unknown key {key!r}", line)
    if command is not None:
        if kw.get("command", command) != command:
            raise ConfigError(f"config is for {kw['command']!r}, not {command!r}")
        kw["command"] = command
    if "command" not in kw:
        raise ConfigError("no command given")
    cfg = RunConfig(case_params=extra, **kw)
    return cfg.validate()


def parse_text(text: str, command: str | None = None) -> RunConfig:
    stripped = text.lstrip()
    if stripped.startswith("{"):
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"invalid JSON: {exc.msg}", exc.lineno) from None
        return from_mapping(((k, v, None) for k, v in data.items()), command)
    items = []
    for n, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"expected key = value, got {raw.strip()!r}", n)
        key, value = line.split("=", 1)
        if not key.strip():
            raise ConfigError("empty key", n)
        items.append((key, value, n))
    return from_mapping(items, command)


def load(path, command: str | None = None) -> RunConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_text(fh.read(), command)


def describe(cfg: RunConfig) -> dict:
    d = {f.name: getattr(cfg, f.name) for f in fields(cfg)}
    return {k: v for k, v in d.items() if v not in (None, [], {}) or k == "case"}
