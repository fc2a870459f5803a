"""Flat key=value configuration for the sweep front end.

Grammar (one statement per line):

    # comment                     blank lines and '#' comments are skipped
    key = value                   top-level keys before any section header
    [section]                     then keys of that section

Top level:   engine = analytic|ed        N = <even int >= 4>
             norm = frobenius|max-eig|trace      workers = auto|<int >= 1>
[window]     lambda_x = lo:hi:count      lambda_y = lo:hi:count      h = <float>
[quench]     dlambda_x, dlambda_y, dh = <float>   direction = lambda_x|lambda_y|h
[times]      values = t1, t2, ...        (nonnegative floats)
[output]     path = <file>               json = true|false
             tensor = full|delta        ('delta' emits only the time-dependent part)
[point]      lambda_x, lambda_y = <float>    (time-series base point; defaults to
                                             the window center)

Unknown keys or malformed values fail with the offending line number.
``load_config(emit_config(cfg))`` round-trips exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

ENGINES = ("analytic", "ed")
NORMS = ("frobenius", "max-eig", "trace")
TENSORS = ("full", "delta")
DIRECTIONS = ("lambda_x", "lambda_y", "h")


class ConfigError(ValueError):
    """Malformed configuration text; carries the 1-based line number."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        where = f" (line {line})" if line is not None else ""
        super().__init__(f"{message}{where}")


@dataclass(frozen=True)
class AxisRange:
    """Inclusive scan range lo..hi sampled at ``count`` evenly spaced points."""

    lo: float
    hi: float
    count: int

    def values(self) -> np.ndarray:
        return np.linspace(self.lo, self.hi, self.count)


@dataclass(frozen=True)
class SweepConfig:
    """Validated scan/time-series settings with all defaults filled in."""

    engine: str
    n_sites: int
    lambda_x: AxisRange
    lambda_y: AxisRange
    h: float = 0.0
    quench: tuple[float, float, float] = (0.0, 0.0, 0.0)
    direction: str = "h"
    times: tuple[float, ...] = (0.0,)
    norm: str = "frobenius"
    tensor: str = "full"
    workers: int = 0  # 0 = auto
    out_path: str = "scan.csv"
    json_mirror: bool = False
    point: tuple[float, float] | None = None

    def with_overrides(self, **kwargs) -> "SweepConfig":
        """Copy with non-None keyword overrides (CLI flags win over file values)."""
        updates = {k: v for k, v in kwargs.items() if v is not None}
        return replace(self, **updates) if updates else self


_SCHEMA = {
    ("", "engine"),
    ("", "N"),
    ("", "norm"),
    ("", "workers"),
    ("window", "lambda_x"),
    ("window", "lambda_y"),
    ("window", "h"),
    ("quench", "dlambda_x"),
    ("quench", "dlambda_y"),
    ("quench", "dh"),
    ("quench", "direction"),
    ("times", "values"),
    ("output", "path"),
    ("output", "json"),
    ("output", "tensor"),
    ("point", "lambda_x"),
    ("point", "lambda_y"),
}
_SECTIONS = ("window", "quench", "times", "output", "point")


def _parse_float(text: str, line: int, what: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise ConfigError(f"{what}: expected a number, got {text!r}", line) from None
    if not np.isfinite(value):
        raise ConfigError(f"{what}: value must be finite, got {text!r}", line)
    return value


def _parse_range(text: str, line: int, what: str) -> AxisRange:
    parts = text.split(":")
    if len(parts) != 3:
        raise ConfigError(f"{what}: expected lo:hi:count, got {text!r}", line)
    lo = _parse_float(parts[0], line, what)
    hi = _parse_float(parts[1], line, what)
    try:
        count = int(parts[2])
    except ValueError:
        raise ConfigError(f"{what}: count must be an integer, got {parts[2]!r}", line) from None
    if count < 2:
        raise ConfigError(f"{what}: count must be >= 2, got {count}", line)
    if hi <= lo:
        raise ConfigError(f"{what}: needs hi > lo, got {text!r}", line)
    return AxisRange(lo, hi, count)


def load_config(text: str) -> SweepConfig:
    """Parse and validate configuration text; defaults echoed into the result."""
    entries: dict[tuple[str, str], tuple[str, int]] = {}
    section = ""
    for lineno, raw in enumerate(text.splitlines(), start=1):
        stmt = raw.split("#", 1)[0].strip()
        if not stmt:
            continue
        if stmt.startswith("["):
            if not stmt.endswith("]"):
                raise ConfigError(f"unterminated section header {stmt!r}", lineno)
            section = stmt[1:-1].strip()
            if section not in _SECTIONS:
                raise ConfigError(f"unknown section [{section}]", lineno)
            continue
        if "=" not in stmt:
            raise ConfigError(f"expected key = value, got {stmt!r}", lineno)
        key, value = (part.strip() for part in stmt.split("=", 1))
        if (section, key) not in _SCHEMA:
            where = f"[{section}] " if section else ""
            raise ConfigError(f"unknown key {where}{key!r}", lineno)
        if (section, key) in entries:
            raise ConfigError(f"duplicate key {key!r}", lineno)
        entries[(section, key)] = (value, lineno)

    def take(section: str, key: str):
        return entries.pop((section, key), None)

    def require(section: str, key: str):
        item = take(section, key)
        if item is None:
            where = f"[{section}] " if section else ""
            raise ConfigError(f"missing required key {where}{key}")
        return item

    value, line = require("", "engine")
    if value not in ENGINES:
        raise ConfigError(f"engine must be one of {ENGINES}, got {value!r}", line)
    engine = value

    value, line = require("", "N")
    try:
        n_sites = int(value)
    except ValueError:
        raise ConfigError(f"N must be an integer, got {value!r}", line) from None
    if n_sites % 2 != 0:
        raise ConfigError(f"N must be even, got {n_sites}", line)
    if n_sites < 4:
        raise ConfigError(f"N must be >= 4, got {n_sites}", line)
    if engine == "ed" and n_sites > 12:
        raise ConfigError(f"engine=ed supports N <= 12, got {n_sites}", line)

    norm = "frobenius"
    if (item := take("", "norm")) is not None:
        value, line = item
        if value not in NORMS:
            raise ConfigError(f"norm must be one of {NORMS}, got {value!r}", line)
        norm = value

    workers = 0
    if (item := take("", "workers")) is not None:
        value, line = item
        if value != "auto":
            try:
                workers = int(value)
            except ValueError:
                raise ConfigError(f"workers must be 'auto' or an integer, got {value!r}", line) from None
            if workers < 1:
                raise ConfigError(f"workers must be >= 1, got {workers}", line)

    value, line = require("window", "lambda_x")
    axis_x = _parse_range(value, line, "window lambda_x")
    value, line = require("window", "lambda_y")
    axis_y = _parse_range(value, line, "window lambda_y")
    h = 0.0
    if (item := take("window", "h")) is not None:
        h = _parse_float(item[0], item[1], "window h")

    offsets = []
    for key in ("dlambda_x", "dlambda_y", "dh"):
        if (item := take("quench", key)) is not None:
            offsets.append(_parse_float(item[0], item[1], f"quench {key}"))
        else:
            offsets.append(0.0)
    direction = "h"
    if (item := take("quench", "direction")) is not None:
        value, line = item
        if value not in DIRECTIONS:
            raise ConfigError(f"direction must be one of {DIRECTIONS}, got {value!r}", line)
        direction = value

    times: tuple[float, ...] = (0.0,)
    if (item := take("times", "values")) is not None:
        value, line = item
        parsed = []
        for chunk in value.split(","):
            chunk = chunk.strip()
            if not chunk:
                continue
            tval = _parse_float(chunk, line, "times values")
            if tval < 0:
                raise ConfigError(f"times must be nonnegative, got {tval}", line)
            parsed.append(tval)
        if not parsed:
            raise ConfigError("times values is empty", line)
        times = tuple(parsed)

    out_path = "scan.csv"
    if (item := take("output", "path")) is not None:
        out_path = item[0]
    json_mirror = False
    if (item := take("output", "json")) is not None:
        value, line = item
        if value not in ("true", "false"):
            raise ConfigError(f"json must be true or false, got {value!r}", line)
        json_mirror = value == "true"
    tensor = "full"
    if (item := take("output", "tensor")) is not None:
        value, line = item
        if value not in TENSORS:
            raise ConfigError(f"tensor must be one of {TENSORS}, got {value!r}", line)
        tensor = value

    point = None
    px = take("point", "lambda_x")
    py = take("point", "lambda_y")
    if (px is None) != (py is None):
        raise ConfigError("[point] needs both lambda_x and lambda_y")
    if px is not None:
        point = (
            _parse_float(px[0], px[1], "point lambda_x"),
            _parse_float(py[0], py[1], "point lambda_y"),
        )

    return SweepConfig(
        engine=engine,
        n_sites=n_sites,
        lambda_x=axis_x,
        lambda_y=axis_y,
        h=h,
        quench=(offsets[0], offsets[1], offsets[2]),
        direction=direction,
        times=times,
        norm=norm,
        tensor=tensor,
        workers=workers,
        out_path=out_path,
        json_mirror=json_mirror,
        point=point,
    )


def emit_config(cfg: SweepConfig) -> str:
    """Canonical text form; parsing it reproduces ``cfg`` exactly."""
    lines = [
        f"engine = {cfg.engine}",
        f"N = {cfg.n_sites}",
        f"norm = {cfg.norm}",
        f"workers = {'auto' if cfg.workers == 0 else cfg.workers}",
        "",
        "[window]",
        f"lambda_x = {cfg.lambda_x.lo!r}:{cfg.lambda_x.hi!r}:{cfg.lambda_x.count}",
        f"lambda_y = {cfg.lambda_y.lo!r}:{cfg.lambda_y.hi!r}:{cfg.lambda_y.count}",
        f"h = {cfg.h!r}",
        "",
        "[quench]",
        f"dlambda_x = {cfg.quench[0]!r}",
        f"dlambda_y = {cfg.quench[1]!r}",
        f"dh = {cfg.quench[2]!r}",
        f"direction = {cfg.direction}",
        "",
        "[times]",
        "values = " + ", ".join(repr(t) for t in cfg.times),
        "",
        "[output]",
        f"path = {cfg.out_path}",
        f"json = {'true' if cfg.json_mirror else 'false'}",
        f"tensor = {cfg.tensor}",
    ]
    if cfg.point is not None:
        lines += ["", "[point]", f"lambda_x = {cfg.point[0]!r}", f"lambda_y = {cfg.point[1]!r}"]
    return "\n".join(lines) + "\n"
