"""Named figure scenarios at desk-scale trial budgets.

Each preset is a list of curves.  A curve is one scenario plus a sweep axis
and grid, written to ``<out_dir>/<preset>_<curve>.csv``.  SNR grids are cut to
5-7 points so the deepest point sits near SER 1e-5 under the default
2e6-trial cap.
"""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from .config import ConfigError, ScenarioConfig, TrialsPolicy
from .sweep import emit_csv, sweep

DESK_TRIALS = TrialsPolicy(max_trials=2_000_000, min_errors=200, batch=20_000)

RHO_GRID = (0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.95)
ALPHA_GRID = (0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9)
POSITION_GRID = tuple(round(0.1 * i, 1) for i in range(1, 10))


@dataclass(frozen=True)
class Curve:
    name: str
    scenario: ScenarioConfig
    axis: str
    values: tuple


def _coefficient_curves(base: ScenarioConfig) -> list:
    """rho sweep for PS and alpha sweep for TS, both modulations."""
    curves = []
    for mod in ("dpsk", "fsk"):
        curves.append(Curve(f"ps_{mod}", base.replace(protocol="ps", modulation=mod), "rho", RHO_GRID))
        curves.append(Curve(f"ts_{mod}", base.replace(protocol="ts", modulation=mod), "alpha", ALPHA_GRID))
    return curves


def _snr_curves(base: ScenarioConfig, protocols, snr_grid, tag: str = "") -> list:
    curves = []
    for proto in protocols:
        for mod in ("dpsk", "fsk"):
            name = f"{proto}_{mod}{tag}"
            curves.append(Curve(name, base.replace(protocol=proto, modulation=mod), "snr", tuple(snr_grid)))
    return curves


def _position_curves(base: ScenarioConfig) -> list:
    curves = []
    for proto in ("ps", "ts"):
        for mod in ("dpsk", "fsk"):
            curves.append(Curve(f"{proto}_{mod}", base.replace(protocol=proto, modulation=mod),
                                "position", POSITION_GRID))
    return curves


def _base(**kw) -> ScenarioConfig:
    kw.setdefault("trials", DESK_TRIALS)
    return ScenarioConfig(**kw)


K1 = dict(K=1, d0r=(2.0,))
K2 = dict(K=2, d0r=(1.0, 1.5), rate=0.5)
K3 = dict(K=3, d0r=(0.75, 1.5, 2.25), rate=1.0)


def _fig2():
    return _coefficient_curves(_base(**K1, M=2, rate=1.0, snr_db=(35.0,)))


def _fig3a():
    return _coefficient_curves(_base(**K2, M=2, snr_db=(30.0,)))


def _fig3b():
    return _coefficient_curves(_base(**K3, M=2, snr_db=(35.0,)))


def _fig4():
    base = _base(**K3, M=2, rho=0.8, alpha=0.55)
    return _snr_curves(base, ("ps", "ts", "grid"), (15.0, 20.0, 25.0, 30.0, 35.0, 40.0))


def _fig5a():
    return _position_curves(_base(K=1, d0r=(1.5,), exponent=2.7, snr_db=(26.0,), rho=0.8, alpha=0.4))


def _fig5b():
    return _position_curves(_base(K=1, d0r=(1.5,), exponent=4.0, snr_db=(35.0,), rho=0.8, alpha=0.4))


def _fig6a():
    return _coefficient_curves(_base(K=1, d0r=(1.0,), M=4, rate=2.0, snr_db=(38.0,)))


def _fig6b():
    return _coefficient_curves(_base(K=1, d0r=(1.0,), M=8, rate=3.0, snr_db=(40.0,)))


SNR_HIGH = (20.0, 25.0, 30.0, 35.0, 40.0, 45.0)


def _fig7():
    return (_snr_curves(_base(**K1, rate=1.0, rho=0.8), ("ps",), SNR_HIGH, "_k1")
            + _snr_curves(_base(**K2, rho=0.85), ("ps",), SNR_HIGH, "_k2"))


def _fig8():
    return (_snr_curves(_base(**K1, rate=1.0, alpha=0.4), ("ts",), SNR_HIGH, "_k1")
            + _snr_curves(_base(**K2, alpha=0.6), ("ts",), SNR_HIGH, "_k2"))


INDOOR = dict(pathloss="indoor", exponent=1.6, partition_loss_db=3.4, d0d=10.0, K=3,
              d0r=(1.0, 1.0, 1.0), rate=1.0, rho=0.8, alpha=0.55, carrier_mhz=900.0)


def _fig10():
    return _snr_curves(_base(**INDOOR), ("ps", "ts"), (20.0, 25.0, 30.0, 35.0, 40.0, 45.0))


PRESETS = {
    "fig2": _fig2,
    "fig3a": _fig3a,
    "fig3b": _fig3b,
    "fig4": _fig4,
    "fig5a": _fig5a,
    "fig5b": _fig5b,
    "fig6a": _fig6a,
    "fig6b": _fig6b,
    "fig7": _fig7,
    "fig8": _fig8,
    "fig10": _fig10,
}


def preset_curves(preset: str, **overrides) -> list:
    """Curves of a preset, with scenario fields replaced by ``overrides``."""
    if preset not in PRESETS:
        raise ConfigError(f"unknown preset {preset!r}; choose from {', '.join(PRESETS)}")
    curves = PRESETS[preset]()
    if overrides:
        curves = [Curve(c.name, c.scenario.replace(**overrides), c.axis, c.values) for c in curves]
    return curves


def run_figure(preset: str, out_dir, *, workers: int = 1, curves: Optional[list] = None,
               **overrides) -> tuple:
    """Run every curve of ``preset``; returns (CSV paths, failed point count).

    ``curves`` restricts the run to the named curves.
    """
    out_dir = Path(out_dir)
    selected = preset_curves(preset, **overrides)
    if curves is not None:
        unknown = set(curves) - {c.name for c in selected}
        if unknown:
            raise ConfigError(f"preset {preset} has no curve(s) {sorted(unknown)}")
        selected = [c for c in selected if c.name in curves]
    paths, failures = [], 0
    for curve in selected:
        rows = []

        def tracked():
            for row in sweep(curve.scenario, curve.axis, curve.values, workers=workers):
                rows.append(row)
                yield row

        path = emit_csv(tracked(), out_dir / f"{preset}_{curve.name}.csv", curve.scenario, curve.axis)
        failures += sum(1 for r in rows if r.error)
        paths.append(path)
    return paths, failures

