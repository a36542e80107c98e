"""Parameter sweeps and their CSV output."""
from __future__ import annotations

import csv
import hashlib
import json
import dataclasses
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator, Optional, TextIO

from .. import __version__
from ..errors import AccuracyError, DomainError
from .config import ConfigError, ScenarioConfig
from .montecarlo import SerEstimate, estimate_ser

AXES = ("snr", "rho", "alpha", "position", "M")

CSV_COLUMNS = (
    "protocol", "modulation", "M", "K", "detector", "snr_db", "rho", "alpha", "rate", "pathloss",
    "exponent", "d0d", "d0r_list", "trials", "errors", "ser", "stderr", "seed",
)


@dataclass(frozen=True)
class SweepRow:
    """One sweep point: its single-SNR scenario and the estimate (or the failure)."""

    config: ScenarioConfig
    estimate: Optional[SerEstimate]
    error: Optional[str] = None

    @property
    def snr_db(self) -> float:
        return self.config.snr_db[0]


def point_config(scenario: ScenarioConfig, axis: str, value) -> ScenarioConfig:
    """Scenario with ``axis`` set to ``value`` (SNR collapses to one entry)."""
    if axis not in AXES:
        raise ConfigError(f"sweep axis must be one of {AXES}, got {axis!r}")
    snr = scenario.snr_db[:1]
    if axis == "snr":
        return scenario.replace(snr_db=(float(value),))
    if axis == "rho":
        if scenario.protocol != "ps":
            raise ConfigError("a rho sweep needs the PS protocol")
        return scenario.replace(rho=float(value), snr_db=snr)
    if axis == "alpha":
        if scenario.protocol != "ts":
            raise ConfigError("an alpha sweep needs the TS protocol")
        return scenario.replace(alpha=float(value), snr_db=snr)
    if axis == "position":
        return scenario.replace(d0r=tuple(float(value) * scenario.d0d for _ in range(scenario.K)), snr_db=snr)
    return scenario.replace(M=int(value), snr_db=snr)


def sweep(scenario: ScenarioConfig, axis: str, values: Iterable, *, workers: int = 1) -> Iterator[SweepRow]:
    """Yield one row per value; point ``i`` is seeded by (master seed, i).

    A point whose configuration or numerics fail yields a row carrying the
    error message and the sweep moves on.
    """
    if axis not in AXES:
        raise ConfigError(f"sweep axis must be one of {AXES}, got {axis!r}")
    for i, value in enumerate(values):
        try:
            cfg = point_config(scenario, axis, value)
            est = estimate_ser(cfg, point_id=i, workers=workers)
            yield SweepRow(cfg, est)
        except (ConfigError, DomainError, AccuracyError, FloatingPointError) as exc:
            yield SweepRow(scenario, None, f"{axis}={value}: {exc}")


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def row_values(row: SweepRow) -> list:
    c, e = row.config, row.estimate
    return [
        c.protocol, c.modulation, c.M, c.K, c.detector, c.snr_db[0],
        c.rho if c.protocol == "ps" else None,
        c.alpha if c.protocol == "ts" else None,
        float(c.rate), c.pathloss, float(c.exponent), float(c.d0d),
        ";".join(repr(d) for d in c.d0r),
        e.trials if e else 0, e.errors if e else 0,
        e.ser if e else float("nan"), e.stderr if e else float("nan"),
        e.seed if e else c.seed,
    ]


def scenario_hash(scenario: ScenarioConfig) -> str:
    payload = json.dumps(dataclasses.asdict(scenario), sort_keys=True, default=repr)
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()[:16]


def write_csv(rows: Iterable[SweepRow], fh: TextIO, scenario: Optional[ScenarioConfig] = None,
              axis: Optional[str] = None) -> None:
    """Write rows as CSV to an open text stream, flushing after each one.

    Provenance goes into leading ``#`` comment lines; failed points appear as
    rows with zero trials plus a ``# error:`` comment.
    """
    if scenario is not None:
        fh.write(f"# swiptsim {__version__}\n")
        fh.write(f"# scenario_hash {scenario_hash(scenario)}\n")
        fh.write(f"# seed {scenario.seed} streams SeedSequence(seed, spawn_key=(point, batch))\n")
        if axis:
            fh.write(f"# axis {axis}\n")
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    fh.flush()
    for row in rows:
        if row.error:
            fh.write(f"# error: {row.error}\n")
        writer.writerow([_fmt(v) for v in row_values(row)])
        fh.flush()


def emit_csv(rows: Iterable[SweepRow], path, scenario: Optional[ScenarioConfig] = None,
             axis: Optional[str] = None) -> Path:
    """Write rows to ``path`` (UTF-8, '\\n' line endings) and return the path."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="") as fh:
        write_csv(rows, fh, scenario, axis)
    return path


def read_csv(path) -> list:
    """Rows of a CSV written by :func:`emit_csv` as dicts of strings."""
    with open(path, encoding="utf-8", newline="") as fh:
        lines = [ln for ln in fh if not ln.startswith("#")]
    return list(csv.DictReader(lines))
