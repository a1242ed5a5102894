"""Pipeline configuration: defaults, JSON (de)serialization, digests.

One JSON config file drives every stage; command-line flags override single
fields.  Stage outputs embed the digest of the canonical config JSON so a
pipeline mixing configs is refused (unless forced).
"""

from __future__ import annotations

import dataclasses
import datetime as dt
import hashlib
import json
from dataclasses import dataclass, field

from .backtest import DEFAULT_CV_TABLE
from .errors import ConfigurationError


@dataclass(frozen=True)
class SynthConfig:
    """Knobs of the synthetic data generator."""

    n_assets: int = 50
    start_price_low: float = 5.0
    start_price_high: float = 500.0
    daily_drift: float = 0.0002
    daily_vol: float = 0.02
    events_per_day: float = 0.3
    n_categories: int = 220
    n_financial_columns: int = 204
    signal_strength: float = 0.0  # 0 = pure-noise target, 1 = fully planted


@dataclass(frozen=True)
class PipelineConfig:
    calendar_start: str = "2003-01-31"
    calendar_end: str = "2021-12-31"
    windows: tuple[int, ...] = (21, 63, 252)
    signature_depth: int = 4
    ma_lags: tuple[int, ...] = (5, 21)
    category_count: int = 200
    category_selection_start: str = "2003-01-31"
    category_selection_end: str = "2015-12-25"
    cv_table: tuple[tuple[str, ...], ...] = DEFAULT_CV_TABLE
    quantiles: int = 5
    ridge_lambda: float = 1.0
    seed: int = 0
    synth: SynthConfig = field(default_factory=SynthConfig)

    def __post_init__(self):
        if list(self.windows) != sorted(self.windows) or min(self.windows, default=0) < 2:
            raise ConfigurationError(f"windows must be ascending and >= 2, got {self.windows}")
        if len(set(self.windows)) != len(self.windows):
            raise ConfigurationError(f"windows must be distinct, got {self.windows}")
        if self.signature_depth < 1:
            raise ConfigurationError(f"signature depth must be >= 1, got {self.signature_depth}")
        if list(self.ma_lags) != sorted(self.ma_lags) or min(self.ma_lags, default=0) < 2:
            raise ConfigurationError(f"ma_lags must be ascending and >= 2, got {self.ma_lags}")
        if self.quantiles < 3 or self.quantiles % 2 == 0:
            raise ConfigurationError(f"quantiles must be an odd integer >= 3, got {self.quantiles}")
        if self.ridge_lambda <= 0:
            raise ConfigurationError(f"ridge_lambda must be > 0, got {self.ridge_lambda}")
        if self.category_count < 1:
            raise ConfigurationError(f"category_count must be >= 1, got {self.category_count}")
        for name in ("calendar_start", "calendar_end",
                     "category_selection_start", "category_selection_end"):
            dt.date.fromisoformat(getattr(self, name))  # raises on malformed dates

    # -- serialization ------------------------------------------------------

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["windows"] = list(self.windows)
        d["ma_lags"] = list(self.ma_lags)
        d["cv_table"] = [list(row) for row in self.cv_table]
        return d

    def canonical_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))

    def digest(self) -> str:
        return hashlib.sha256(self.canonical_json().encode("utf-8")).hexdigest()

    @classmethod
    def from_dict(cls, data: dict) -> "PipelineConfig":
        data = dict(data)
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigurationError(f"unknown config keys: {sorted(unknown)}")
        if "windows" in data:
            data["windows"] = tuple(int(w) for w in data["windows"])
        if "ma_lags" in data:
            data["ma_lags"] = tuple(int(w) for w in data["ma_lags"])
        if "cv_table" in data:
            data["cv_table"] = tuple(tuple(str(x) for x in row) for row in data["cv_table"])
        if "synth" in data and isinstance(data["synth"], dict):
            synth_known = {f.name for f in dataclasses.fields(SynthConfig)}
            unknown = set(data["synth"]) - synth_known
            if unknown:
                raise ConfigurationError(f"unknown synth config keys: {sorted(unknown)}")
            data["synth"] = SynthConfig(**data["synth"])
        return cls(**data)


def load_config(path: str | None, overrides: dict | None = None) -> PipelineConfig:
    """Config from a JSON file (or defaults), with flag overrides on top."""
    data: dict = {}
    if path is not None:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
        if not isinstance(data, dict):
            raise ConfigurationError(f"{path}: config must be a JSON object")
    for key, value in (overrides or {}).items():
        if value is None:
            continue
        if key.startswith("synth."):
            data.setdefault("synth", {})
            if not isinstance(data["synth"], dict):
                data["synth"] = dataclasses.asdict(data["synth"])
            data["synth"][key.split(".", 1)[1]] = value
        else:
            data[key] = value
    return PipelineConfig.from_dict(data)


def save_config(config: PipelineConfig, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(config.to_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")
