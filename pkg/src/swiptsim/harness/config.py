"""Scenario description and the flat ``key = value`` config-file format.

A config file holds one ``key = value`` pair per line; ``#`` starts a
comment.  Keys mirror the CLI flags (without leading dashes, ``-`` and ``_``
interchangeable); list values are comma separated::

    protocol = ps
    mod = dpsk
    M = 2
    K = 1
    snr_db = 20, 25, 30, 35
    rho = 0.8
    d0d = 3
    d0r = 2
"""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ..channel import Geometry, NoiseModel, PathLossModel
from ..detectors import DetectorKind
from ..errors import DomainError
from ..protocol import LinkBudget, ProtocolConfig, link_budget

SIGMA0_SQ = 1.0


class ConfigError(ValueError):
    """Malformed or inconsistent scenario description."""


@dataclass(frozen=True)
class TrialsPolicy:
    max_trials: int = 2_000_000
    min_errors: int = 200
    batch: int = 20_000

    def __post_init__(self):
        if not (self.min_errors >= 1):
            raise ConfigError("min_errors must be at least 1")
        if not (self.batch >= 1):
            raise ConfigError("batch must be at least 1")
        if not (self.max_trials >= self.batch):
            raise ConfigError("max_trials must be at least batch")


@dataclass(frozen=True)
class ScenarioConfig:
    protocol: str = "ps"
    modulation: str = "dpsk"
    M: int = 2
    K: int = 1
    d0d: float = 3.0
    d0r: tuple = (2.0,)
    pathloss: str = "bounded"
    exponent: float = 4.0
    partition_loss_db: float = 3.4
    eta: float = 0.6
    rate: float = 1.0
    snr_db: tuple = (35.0,)
    rho: Optional[float] = 0.8
    alpha: Optional[float] = 0.4
    detector: str = "gld"
    integration_tol: float = 1e-10
    trials: TrialsPolicy = field(default_factory=TrialsPolicy)
    seed: int = 2015
    noise_split: float = 0.5
    carrier_mhz: Optional[float] = None  # provenance only; the path-loss law ignores it
    diagnostic: Optional[str] = None

    def __post_init__(self):
        d0r = tuple(float(d) for d in np.atleast_1d(self.d0r)) if self.K else ()
        if self.K and len(d0r) == 1 and self.K > 1:
            d0r = d0r * self.K
        if len(d0r) != self.K:
            raise ConfigError(f"d0r lists {len(d0r)} relays but K={self.K}")
        object.__setattr__(self, "d0r", d0r)
        snr = tuple(float(s) for s in np.atleast_1d(self.snr_db))
        if not snr or not all(np.isfinite(snr)):
            raise ConfigError("SNR grid must be nonempty and finite")
        object.__setattr__(self, "snr_db", snr)
        if self.diagnostic is not None:
            _parse_diagnostic(self.diagnostic)
        # surface component-level validation early
        try:
            self.protocol_config(snr[0])
            self.geometry()
            self.pathloss_model()
            self.noise_model()
            self.detector_kind()
        except DomainError as exc:
            raise ConfigError(str(exc)) from exc

    def replace(self, **changes) -> "ScenarioConfig":
        return dataclasses.replace(self, **changes)

    def protocol_config(self, snr_db: float) -> ProtocolConfig:
        return ProtocolConfig(
            kind=self.protocol,
            modulation=self.modulation,
            M=self.M,
            K=self.K,
            rate=self.rate,
            p0=10.0 ** (snr_db / 10.0) * SIGMA0_SQ,
            rho=self.rho if self.protocol == "ps" else None,
            alpha=self.alpha if self.protocol == "ts" else None,
            eta=self.eta,
        )

    def geometry(self) -> Geometry:
        return Geometry(self.d0d, self.d0r)

    def pathloss_model(self) -> PathLossModel:
        return PathLossModel(self.pathloss, self.exponent, self.partition_loss_db)

    def noise_model(self) -> NoiseModel:
        return NoiseModel(SIGMA0_SQ, self.noise_split)

    def detector_kind(self) -> DetectorKind:
        return DetectorKind(self.detector, self.integration_tol)

    def link_budget(self, snr_db: float) -> LinkBudget:
        return link_budget(self.protocol_config(snr_db), self.geometry(), self.pathloss_model(),
                           self.noise_model())


def _parse_diagnostic(spec: str):
    if spec in ("clamp", "guess"):
        return spec, None
    if spec.startswith("coin:"):
        p = float(spec.split(":", 1)[1])
        if not 0 <= p <= 1:
            raise ConfigError("coin diagnostic probability must lie in [0, 1]")
        return "coin", p
    raise ConfigError(f"unknown diagnostic mode {spec!r}")


# --- key/value parsing -----------------------------------------------------

def _floats(text):
    if isinstance(text, (list, tuple)):
        return tuple(float(v) for v in text)
    parts = [p for p in str(text).replace(";", ",").split(",") if p.strip()]
    return tuple(float(p) for p in parts)


_ALIASES = {
    "mod": "modulation",
    "snr": "snr_db",
    "trials": "max_trials",
    "d0r_list": "d0r",
}

_SCALAR = {
    "protocol": str,
    "modulation": str,
    "M": int,
    "K": int,
    "d0d": float,
    "pathloss": str,
    "exponent": float,
    "partition_loss_db": float,
    "eta": float,
    "rate": float,
    "rho": float,
    "alpha": float,
    "detector": str,
    "integration_tol": float,
    "seed": int,
    "noise_split": float,
    "carrier_mhz": float,
    "diagnostic": str,
}
_LIST = ("snr_db", "d0r")
_TRIALS = {"max_trials": int, "min_errors": int, "batch": int}
# accepted by the run command, not part of the scenario itself
_RUN_KEYS = {"out": str, "sweep": str, "values": _floats, "workers": int}


def _canonical_key(key: str) -> str:
    key = key.strip().lstrip("-").replace("-", "_")
    if key in ("m",):
        return "M"
    if key in ("k",):
        return "K"
    return _ALIASES.get(key, key)


def parse_config_text(text: str) -> dict:
    """Parse ``key = value`` lines into a raw dict (values still strings)."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        if not key:
            raise ConfigError(f"line {lineno}: empty key")
        out[_canonical_key(key)] = value
    return out


def build_scenario(settings: dict, base: Optional[ScenarioConfig] = None):
    """Turn raw settings into (ScenarioConfig, run options).

    Unknown keys raise ConfigError.  Returns the scenario and a dict with the
    run-only keys (out, sweep, values, workers) that were present.
    """
    base = base or ScenarioConfig()
    changes, trials, run = {}, {}, {}
    for key, value in settings.items():
        key = _canonical_key(key)
        if value is None:
            continue
        try:
            if key in _SCALAR:
                if isinstance(value, str) and value.strip().lower() in ("", "none"):
                    changes[key] = None
                else:
                    changes[key] = _SCALAR[key](value)
            elif key in _LIST:
                changes[key] = _floats(value)
            elif key in _TRIALS:
                trials[key] = _TRIALS[key](value)
            elif key in _RUN_KEYS:
                run[key] = _RUN_KEYS[key](value)
            else:
                raise ConfigError(f"unknown setting {key!r}")
        except (TypeError, ValueError) as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(f"bad value for {key!r}: {value!r}") from exc
    if "K" in changes and "d0r" not in changes and changes["K"] != base.K:
        if changes["K"] == 0:
            changes["d0r"] = ()
        elif base.K:
            changes["d0r"] = (base.d0r[0],)
    if "d0r" in changes and "K" not in changes:
        changes["K"] = len(changes["d0r"])
    if trials:
        t = dataclasses.asdict(base.trials)
        t.update(trials)
        if "max_trials" in trials and "batch" not in trials:
            t["batch"] = min(t["batch"], t["max_trials"])
        changes["trials"] = TrialsPolicy(**t)
    return base.replace(**changes), run
