"""Scenario configuration, TOML loading and figure presets."""

from __future__ import annotations

import dataclasses
import sys
from dataclasses import dataclass, field
from pathlib import Path

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from ..codec import NetworkCode, make_code, preset_code
from ..receivers import ReceiverKind

BOUND_LABELS = tuple(
    f"union-{kind}-{mode}" for kind in ("errfree", "min", "qinv") for mode in ("codeword", "info")
)
RELAY_STATS_MODES = ("instantaneous", "average")


class ConfigError(ValueError):
    pass


@dataclass
class ScenarioConfig:
    code: NetworkCode
    m: float = 1.0
    snr_db: list[float] = field(default_factory=lambda: [0.0, 5.0, 10.0, 15.0, 20.0])
    receivers: list[ReceiverKind] = field(default_factory=lambda: [ReceiverKind.OPT_SOFT])
    bounds: list[str] = field(default_factory=list)
    min_errors: int = 50
    max_trials: int = 10_000_000
    batch: int = 20_000
    seed: int = 1
    refade: bool = False
    relay_stats: str = "instantaneous"
    bound_trials: int = 100_000
    name: str = "scenario"

    def __post_init__(self):
        if self.min_errors < 1:
            raise ConfigError("min_errors must be >= 1")
        if not self.snr_db:
            raise ConfigError("SNR sweep is empty")
        if self.max_trials < 1 or self.batch < 1:
            raise ConfigError("max_trials and batch must be positive")
        if self.relay_stats not in RELAY_STATS_MODES:
            raise ConfigError(f"relay_stats must be one of {RELAY_STATS_MODES}")
        for b in self.bounds:
            if b not in BOUND_LABELS:
                raise ConfigError(f"unknown bound {b!r}; choose from {BOUND_LABELS}")
        if self.m < 0.5:
            raise ConfigError("m must be >= 0.5")
        self.receivers = [ReceiverKind(r) if not isinstance(r, ReceiverKind) else r for r in self.receivers]
        self.snr_db = [float(s) for s in self.snr_db]

    def replace(self, **changes) -> "ScenarioConfig":
        return dataclasses.replace(self, **changes)


def _code_from_section(sec: dict) -> NetworkCode:
    if "preset" in sec:
        code = preset_code(sec["preset"])
        if "relays" in sec:
            code = make_code(code.q, code.G.tolist(), sec["relays"], name=code.name)
        return code
    if "generator" not in sec or "q" not in sec:
        raise ConfigError("[code] needs either preset or both q and generator")
    return make_code(int(sec["q"]), sec["generator"], sec.get("relays"), name=sec.get("name", "custom"))


def config_from_dict(d: dict) -> ScenarioConfig:
    known = {"name", "seed", "code", "channel", "sweep", "receivers", "stopping"}
    unknown = set(d) - known
    if unknown:
        raise ConfigError(f"unknown top-level keys: {sorted(unknown)}")
    if "code" not in d:
        raise ConfigError("missing [code] section")
    if "seed" not in d:
        raise ConfigError("config must set a seed")
    ch = d.get("channel", {})
    sw = d.get("sweep", {})
    rx = d.get("receivers", {})
    st = d.get("stopping", {})
    kwargs = dict(
        code=_code_from_section(d["code"]),
        name=d.get("name", "scenario"),
        seed=int(d["seed"]),
        m=float(ch.get("m", 1.0)),
        refade=bool(ch.get("refade", False)),
        relay_stats=ch.get("relay_stats", "instantaneous"),
        receivers=rx.get("kinds", ["opt-soft"]),
        bounds=list(rx.get("bounds", [])),
        bound_trials=int(rx.get("bound_trials", 100_000)),
    )
    if "snr_db" in sw:
        kwargs["snr_db"] = list(sw["snr_db"])
    for key in ("min_errors", "max_trials", "batch"):
        if key in st:
            kwargs[key] = int(st[key])
    try:
        return ScenarioConfig(**kwargs)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def load_config(path: str | Path) -> ScenarioConfig:
    path = Path(path)
    try:
        with path.open("rb") as fh:
            data = tomllib.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    return config_from_dict(data)


# --------------------------------------------------------------------------
# figure presets

_HARD = ["opt-hard", "qinv-hard", "min-hard"]
_SOFT = ["opt-soft", "qinv-soft"]
_UNION = ["union-min-info", "union-qinv-info"]

FIGURE_PRESETS = {
    "fig-2user-gf2-m1-hard": dict(code="G2", m=1, receivers=_HARD, snr_db=[0, 5, 10, 15, 20, 25, 30]),
    "fig-3user-gf2-m1-hard": dict(code="G3", m=1, receivers=_HARD, snr_db=[0, 5, 10, 15, 20, 25]),
    "fig-2user-gf2-m2-hard": dict(code="G2", m=2, receivers=_HARD, snr_db=[0, 5, 10, 15, 20]),
    "fig-2user-gf2-m1-soft": dict(code="G2", m=1, receivers=_SOFT, snr_db=[0, 5, 10, 15, 20, 25, 30]),
    "fig-3user-gf2-m1-soft": dict(code="G3", m=1, receivers=_SOFT, snr_db=[0, 5, 10, 15, 20, 25]),
    "fig-2user-gf2-m1-union": dict(code="G2", m=1, receivers=["opt-soft"], bounds=_UNION, snr_db=[5, 10, 15, 20, 25, 30]),
    "fig-3user-gf2-m1-union": dict(code="G3", m=1, receivers=["opt-soft"], bounds=_UNION, snr_db=[5, 10, 15, 20, 25]),
    "fig-2user-gf4-m1-union": dict(code="G1", m=1, receivers=["opt-soft"], bounds=_UNION, snr_db=[5, 10, 15, 20, 25, 30]),
    "fig-2user-gf2-m2-union": dict(code="G2", m=2, receivers=["opt-soft"], bounds=["union-qinv-info"], snr_db=[5, 10, 15, 20]),
}


def preset_config(name: str, seed: int = 1, **overrides) -> ScenarioConfig:
    if name not in FIGURE_PRESETS:
        raise ConfigError(f"unknown figure preset {name!r}; choose from {sorted(FIGURE_PRESETS)}")
    p = dict(FIGURE_PRESETS[name])
    code = preset_code(p.pop("code"))
    p.update(overrides)
    return ScenarioConfig(code=code, seed=seed, name=name, **p)
