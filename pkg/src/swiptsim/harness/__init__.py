"""Monte-Carlo harness: scenarios, SER estimation, sweeps, CSV output and presets."""
from .config import ConfigError, ScenarioConfig, TrialsPolicy, build_scenario, parse_config_text
from .montecarlo import SerEstimate, estimate_ser
from .presets import PRESETS, preset_curves, run_figure
from .sweep import CSV_COLUMNS, SweepRow, emit_csv, read_csv, sweep

__all__ = [
    "ConfigError", "ScenarioConfig", "TrialsPolicy", "build_scenario", "parse_config_text",
    "SerEstimate", "estimate_ser", "CSV_COLUMNS", "SweepRow", "emit_csv", "read_csv", "sweep",
    "PRESETS", "preset_curves", "run_figure",
]
