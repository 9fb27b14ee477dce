"""Monte Carlo engine, scenario presets, verification oracles and CLI."""

from .config import ScenarioConfig, load_config, preset_config
from .engine import CurvePoint, RunReport, run_bounds, run_curve

__all__ = ["CurvePoint", "RunReport", "ScenarioConfig", "load_config", "preset_config", "run_bounds", "run_curve"]
