"""Run configuration: defaults, flat-keyed config files, flag overrides.

Config files are plain text, one ``key = value`` per line, ``#`` comments.
Keys are the dotted names listed in KEY_FIELDS; command-line flags always
win over file values, which win over defaults. Every run echoes its fully
resolved configuration next to its outputs so results are reproducible
from the output directory alone.
"""

from __future__ import annotations

import datetime as dt
from dataclasses import dataclass, fields, replace
from pathlib import Path

from .dispersion import LINKAGES
from .errors import ConfigError
from .panel import TICKER_NAMES
from .turning_points import TurningPointParams


def _parse_bool(text):
    lowered = str(text).strip().lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"not a boolean: {text!r}")


def _parse_date(text):
    try:
        return dt.date.fromisoformat(str(text).strip())
    except ValueError as exc:
        raise ConfigError(f"bad date {text!r}: {exc}") from None


def parse_tickers(text):
    if isinstance(text, (tuple, list)):
        return tuple(text)
    parts = tuple(p.strip() for p in str(text).split(",") if p.strip())
    if not parts:
        raise ConfigError("empty ticker list")
    return parts


@dataclass(frozen=True)
class RunConfig:
    data_dir: Path = Path("data")
    out_dir: Path = Path("out")
    start: dt.date = dt.date(2019, 1, 1)
    end: dt.date = dt.date(2021, 6, 30)
    correlation_days: int = 90
    spectral_days: int = 90
    inconsistency_days: int = 90
    volatility_days: int = 90
    tp_l: int = 17
    tp_delta: float = 0.2
    tp_epsilon: float = 0.01
    sg_window: int = 31
    sg_degree: int = 3
    exclude_diagonal: bool = False
    linkage: str = "average"
    url_template: str = ""
    tickers: tuple = tuple(TICKER_NAMES)

    def __post_init__(self):
        object.__setattr__(self, "data_dir", Path(self.data_dir))
        object.__setattr__(self, "out_dir", Path(self.out_dir))
        for name in ("correlation_days", "spectral_days",
                     "inconsistency_days", "volatility_days"):
            if getattr(self, name) < 2:
                raise ConfigError(f"windows.{name.removesuffix('_days')}_days "
                                  f"must be >= 2, got {getattr(self, name)}")
        if self.end < self.start:
            raise ConfigError(f"range end {self.end} before start {self.start}")
        self.turning_point_params()  # validates l/delta/epsilon
        if self.sg_window < 1 or self.sg_window % 2 == 0:
            raise ConfigError(f"sg.window must be odd and positive, got {self.sg_window}")
        if not 0 <= self.sg_degree < self.sg_window:
            raise ConfigError(f"sg.degree must lie in 0..sg.window-1, got {self.sg_degree}")
        if self.linkage not in LINKAGES:
            raise ConfigError(f"cluster.linkage must be one of {LINKAGES}, "
                              f"got {self.linkage!r}")

    def turning_point_params(self) -> TurningPointParams:
        return TurningPointParams(self.tp_l, self.tp_delta, self.tp_epsilon)

    @property
    def price_csv(self) -> Path:
        return self.data_dir / "price.csv"

    @property
    def marketcap_csv(self) -> Path:
        return self.data_dir / "marketcap.csv"


# dotted config key -> (RunConfig field, parser)
KEY_FIELDS = {
    "data.dir": ("data_dir", Path),
    "output.dir": ("out_dir", Path),
    "range.from": ("start", _parse_date),
    "range.to": ("end", _parse_date),
    "windows.correlation_days": ("correlation_days", int),
    "windows.spectral_days": ("spectral_days", int),
    "windows.inconsistency_days": ("inconsistency_days", int),
    "windows.volatility_days": ("volatility_days", int),
    "tp.l": ("tp_l", int),
    "tp.delta": ("tp_delta", float),
    "tp.epsilon": ("tp_epsilon", float),
    "sg.window": ("sg_window", int),
    "sg.degree": ("sg_degree", int),
    "stats.exclude_diagonal": ("exclude_diagonal", _parse_bool),
    "cluster.linkage": ("linkage", str),
    "data.url_template": ("url_template", str),
    "data.tickers": ("tickers", parse_tickers),
}

_FIELD_KEYS = {field: key for key, (field, _) in KEY_FIELDS.items()}


def parse_config_file(path) -> dict:
    """Field overrides from a flat-keyed config file."""
    overrides = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            stripped = line.strip()
            if not stripped or stripped.startswith("#"):
                continue
            if "=" not in stripped:
                raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
            key, _, value = stripped.partition("=")
            key = key.strip()
            if key not in KEY_FIELDS:
                raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
            field, parser = KEY_FIELDS[key]
            try:
                overrides[field] = parser(value.strip())
            except ConfigError as exc:
                raise ConfigError(f"{path}:{lineno}: {exc}") from None
            except (TypeError, ValueError) as exc:
                raise ConfigError(f"{path}:{lineno}: bad value for {key}: {exc}") from None
    return overrides


def resolve_config(config_path=None, **flag_overrides) -> RunConfig:
    """Defaults, overlaid with the config file, overlaid with flags."""
    values = {}
    if config_path is not None:
        values.update(parse_config_file(config_path))
    values.update({k: v for k, v in flag_overrides.items() if v is not None})
    try:
        return replace(RunConfig(), **values)
    except TypeError as exc:
        raise ConfigError(str(exc)) from None


def config_echo_text(cfg: RunConfig) -> str:
    """The fully resolved configuration in config-file syntax."""
    lines = []
    for field in fields(cfg):
        key = _FIELD_KEYS[field.name]
        value = getattr(cfg, field.name)
        if isinstance(value, tuple):
            value = ",".join(value)
        elif isinstance(value, bool):
            value = "true" if value else "false"
        elif isinstance(value, dt.date):
            value = value.isoformat()
        lines.append(f"{key} = {value}")
    return "\n".join(sorted(lines)) + "\n"
