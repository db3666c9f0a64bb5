"""Experiment configuration: plain-text key=value files with CLI overrides."""

from __future__ import annotations

from dataclasses import dataclass, fields
from pathlib import Path
from typing import Dict, Optional, Tuple

from .estimators import Tolerances

INVERSE_MODES = ("via_upi", "via_upi_inverse")


def parse_frequency_list(text: str) -> Tuple[float, ...]:
    """Comma-separated non-negative frequencies in rad/s."""
    items = [s.strip() for s in str(text).split(",") if s.strip()]
    if not items:
        raise ValueError("empty frequency list")
    return tuple(float(s) for s in items)


def read_config_file(path) -> Dict[str, str]:
    values: Dict[str, str] = {}
    p = Path(path)
    if not p.is_file():
        raise FileNotFoundError(f"config file not found: {p}")
    for lineno, line in enumerate(p.read_text().splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ValueError(f"{p}:{lineno}: expected 'key = value', got {line!r}")
        key, val = line.split("=", 1)
        values[key.strip()] = val.strip()
    return values


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything one two-experiment run needs, resolved and validated."""

    model: Path
    set_s: Tuple[float, ...]
    set_q: Tuple[float, ...]
    out: Path
    dt: float = 0.1
    duration_swapped: float = 25.0
    duration_twosided: float = 40.0
    eta_cpi: float = 1e-7
    eta_upi: float = 1e-7
    eta_ub: float = 1e-7
    rank_tol: float = 1e-10
    snr_v_db: Optional[float] = None
    snr_z_db: Optional[float] = None
    seed: int = 0
    inverse_mode: str = "via_upi"
    w_init: Optional[int] = None
    p_init: Optional[int] = None

    def __post_init__(self):
        if self.dt <= 0:
            raise ValueError("dt must be positive")
        if self.duration_swapped <= 0 or self.duration_twosided <= 0:
            raise ValueError("durations must be positive")
        if self.inverse_mode not in INVERSE_MODES:
            raise ValueError(f"inverse_mode must be one of {INVERSE_MODES}")
        object.__setattr__(self, "model", Path(self.model))
        object.__setattr__(self, "out", Path(self.out))
        object.__setattr__(self, "set_s", tuple(self.set_s))
        object.__setattr__(self, "set_q", tuple(self.set_q))

    def tolerances(self) -> Tolerances:
        return Tolerances(eta_cpi=self.eta_cpi, eta_upi=self.eta_upi,
                          eta_ub=self.eta_ub, rank_tol=self.rank_tol)


_PARSERS = {
    "model": Path,
    "out": Path,
    "set_s": parse_frequency_list,
    "set_q": parse_frequency_list,
    "dt": float,
    "duration_swapped": float,
    "duration_twosided": float,
    "eta_cpi": float,
    "eta_upi": float,
    "eta_ub": float,
    "rank_tol": float,
    "snr_v_db": float,
    "snr_z_db": float,
    "seed": int,
    "inverse_mode": str,
    "w_init": int,
    "p_init": int,
}

_REQUIRED = ("model", "set_s", "set_q", "out")


def resolve_config(file_path=None, **overrides) -> ExperimentConfig:
    """Merge a config file (if any) with non-None keyword overrides."""
    raw: Dict[str, object] = {}
    if file_path is not None:
        for key, text in read_config_file(file_path).items():
            if key not in _PARSERS:
                raise ValueError(f"unknown config key {key!r}")
            raw[key] = _PARSERS[key](text)
    for key, val in overrides.items():
        if val is None:
            continue
        if key not in _PARSERS:
            raise ValueError(f"unknown config key {key!r}")
        raw[key] = _PARSERS[key](val)
    missing = [k for k in _REQUIRED if k not in raw]
    if missing:
        raise ValueError(f"missing required configuration: {', '.join(missing)}")
    valid = {f.name for f in fields(ExperimentConfig)}
    assert set(raw) <= valid
    return ExperimentConfig(**raw)
