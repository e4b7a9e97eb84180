"""Run configuration: one INI document with a flat section per module.

Every key has a default; a config file only needs the values it changes.
Later files override earlier ones, so a best-member fragment can be layered
on top of a base config.
"""

from __future__ import annotations

import configparser
import io
from dataclasses import dataclass, field, fields
from typing import Optional

from .bearing import BearingParameters, GeometryError, OperatingMode
from .masks import MaskError, ReceptiveFieldParams
from .metrics import SurrogateConfig
from .moea import GaConfig
from .regressor import RegressorConfig, RegressorError


class ConfigError(ValueError):
    pass


DEFAULTS = {
    "bearing": {
        "inner_raceway_diameter": 29.30,
        "outer_raceway_diameter": 39.80,
        "pitch_diameter": 34.55,
        "ball_diameter": 7.92,
        "contact_angle": 0.0,
        "ball_count": 8,
    },
    "operating": {"shaft_frequency": 35.0, "sampling_frequency": 25600.0, "window": "rectangular"},
    "receptive_field": {
        "center_bandwidth": 4.0,
        "surround_bandwidth": 12.0,
        "sigma_rule_center": 2.0,
        "sigma_rule_surround": 2.0,
        "inhibition_factor": 1.0 / 3.0,
    },
    "expansion": {"n_harmonics": 2, "n_sidebands": 2},
    "regressor": {
        "n_learners": 30,
        "bootstrap_fraction": 1.0,
        "min_leaf_size": 5,
        "max_depth": "none",
        "replace": True,
        "stride": 2,
    },
    "surrogate": {"order": 0, "maximize_smoothness": False, "per_mode": False},
    "ga": {
        "population_size": 50,
        "max_generations": 300,
        "spread_tolerance": 1e-4,
        "stall_generations": 25,
        "crossover_probability": 0.9,
        "crossover_eta": 20.0,
        "mutation_eta": 20.0,
        "mutation_rate": "none",
    },
    "synth": {"n_samples": 32768, "noise_std": 0.05, "peak": 1.0},
    "run": {"seed": "none", "threads": 1},
}


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _opt_int(text) -> Optional[int]:
    return None if str(text).strip().lower() in ("none", "") else int(text)


def _opt_float(text) -> Optional[float]:
    return None if str(text).strip().lower() in ("none", "") else float(text)


@dataclass
class RunConfig:
    bearing: BearingParameters = field(default_factory=lambda: BearingParameters(**DEFAULTS["bearing"]))
    operating: OperatingMode = field(default_factory=OperatingMode)
    window: str = "rectangular"
    receptive_field: ReceptiveFieldParams = field(default_factory=ReceptiveFieldParams)
    expansion: tuple = (2, 2)
    regressor: RegressorConfig = field(default_factory=RegressorConfig)
    order: int = 0
    maximize_smoothness: bool = False
    per_mode: bool = False
    ga: GaConfig = field(default_factory=GaConfig)
    synth_n_samples: int = 32768
    synth_noise_std: float = 0.05
    synth_peak: float = 1.0
    seed: Optional[int] = None
    threads: int = 1

    @property
    def surrogate(self) -> SurrogateConfig:
        return SurrogateConfig(self.regressor, self.order, tuple(self.expansion), self.window, self.maximize_smoothness)

    def to_parser(self) -> configparser.ConfigParser:
        cp = configparser.ConfigParser()
        b = self.bearing
        cp["bearing"] = {k: _fmt(getattr(b, k)) for k in DEFAULTS["bearing"] if getattr(b, k) is not None}
        cp["operating"] = {
            "shaft_frequency": _fmt(self.operating.shaft_frequency),
            "sampling_frequency": _fmt(self.operating.sampling_frequency),
            "window": self.window,
        }
        cp["receptive_field"] = {f.name: _fmt(getattr(self.receptive_field, f.name)) for f in fields(ReceptiveFieldParams)}
        cp["expansion"] = {"n_harmonics": str(self.expansion[0]), "n_sidebands": str(self.expansion[1])}
        r = self.regressor
        cp["regressor"] = {
            "n_learners": str(r.n_learners),
            "bootstrap_fraction": _fmt(r.bootstrap_fraction),
            "min_leaf_size": str(r.min_leaf_size),
            "max_depth": "none" if r.max_depth is None else str(r.max_depth),
            "replace": _fmt(r.replace),
            "stride": str(r.stride),
        }
        cp["surrogate"] = {
            "order": str(self.order),
            "maximize_smoothness": _fmt(self.maximize_smoothness),
            "per_mode": _fmt(self.per_mode),
        }
        g = self.ga
        cp["ga"] = {
            "population_size": str(g.population_size),
            "max_generations": str(g.max_generations),
            "spread_tolerance": _fmt(g.spread_tolerance),
            "stall_generations": str(g.stall_generations),
            "crossover_probability": _fmt(g.crossover_probability),
            "crossover_eta": _fmt(g.crossover_eta),
            "mutation_eta": _fmt(g.mutation_eta),
            "mutation_rate": "none" if g.mutation_rate is None else _fmt(g.mutation_rate),
        }
        cp["synth"] = {
            "n_samples": str(self.synth_n_samples),
            "noise_std": _fmt(self.synth_noise_std),
            "peak": _fmt(self.synth_peak),
        }
        cp["run"] = {"seed": "none" if self.seed is None else str(self.seed), "threads": str(self.threads)}
        return cp

    def dumps(self) -> str:
        buf = io.StringIO()
        self.to_parser().write(buf)
        return buf.getvalue()


def _parser_with_defaults() -> configparser.ConfigParser:
    cp = configparser.ConfigParser()
    for section, values in DEFAULTS.items():
        cp[section] = {k: _fmt(v) for k, v in values.items()}
    return cp


def loads(*texts: str) -> RunConfig:
    cp = _parser_with_defaults()
    for text in texts:
        layer = configparser.ConfigParser()
        try:
            layer.read_string(text)
        except configparser.Error as exc:
            raise ConfigError(str(exc)) from None
        for section in layer.sections():
            if section == "evaluation":  # metadata written alongside best-member fragments
                continue
            if section not in DEFAULTS:
                raise ConfigError(f"unknown section [{section}]")
            for key, value in layer[section].items():
                if key not in DEFAULTS[section]:
                    raise ConfigError(f"unknown key {key!r} in [{section}]")
                cp[section][key] = value
    return _build(cp)


def load(*paths) -> RunConfig:
    texts = []
    for p in paths:
        try:
            with open(p) as fh:
                texts.append(fh.read())
        except OSError as exc:
            raise ConfigError(f"cannot read config {p}: {exc}") from None
    return loads(*texts)


def _build(cp: configparser.ConfigParser) -> RunConfig:
    try:
        b = cp["bearing"]
        bearing = BearingParameters(
            inner_raceway_diameter=_opt_float(b["inner_raceway_diameter"]),
            outer_raceway_diameter=_opt_float(b["outer_raceway_diameter"]),
            pitch_diameter=_opt_float(b["pitch_diameter"]),
            ball_diameter=float(b["ball_diameter"]),
            contact_angle=float(b["contact_angle"]),
            ball_count=int(b["ball_count"]),
        )
        o = cp["operating"]
        operating = OperatingMode(float(o["shaft_frequency"]), float(o["sampling_frequency"]))
        window = o["window"].strip()
        if window not in ("rectangular", "hann"):
            raise ConfigError(f"window must be 'rectangular' or 'hann', got {window!r}")
        rf = cp["receptive_field"]
        params = ReceptiveFieldParams(**{f.name: float(rf[f.name]) for f in fields(ReceptiveFieldParams)})
        e = cp["expansion"]
        expansion = (int(e["n_harmonics"]), int(e["n_sidebands"]))
        if expansion[0] < 1 or expansion[1] < 0:
            raise ConfigError("need n_harmonics >= 1 and n_sidebands >= 0")
        r = cp["regressor"]
        regressor = RegressorConfig(
            n_learners=int(r["n_learners"]),
            bootstrap_fraction=float(r["bootstrap_fraction"]),
            min_leaf_size=int(r["min_leaf_size"]),
            max_depth=_opt_int(r["max_depth"]),
            replace=r.getboolean("replace"),
            stride=int(r["stride"]),
        )
        s = cp["surrogate"]
        g = cp["ga"]
        ga = GaConfig(
            population_size=int(g["population_size"]),
            max_generations=int(g["max_generations"]),
            spread_tolerance=float(g["spread_tolerance"]),
            stall_generations=int(g["stall_generations"]),
            crossover_probability=float(g["crossover_probability"]),
            crossover_eta=float(g["crossover_eta"]),
            mutation_eta=float(g["mutation_eta"]),
            mutation_rate=_opt_float(g["mutation_rate"]),
        )
        sy = cp["synth"]
        run = cp["run"]
        cfg = RunConfig(
            bearing=bearing,
            operating=operating,
            window=window,
            receptive_field=params,
            expansion=expansion,
            regressor=regressor,
            order=int(s["order"]),
            maximize_smoothness=s.getboolean("maximize_smoothness"),
            per_mode=s.getboolean("per_mode"),
            ga=ga,
            synth_n_samples=int(sy["n_samples"]),
            synth_noise_std=float(sy["noise_std"]),
            synth_peak=float(sy["peak"]),
            seed=_opt_int(run["seed"]),
            threads=int(run["threads"]),
        )
    except (ValueError, GeometryError, MaskError, RegressorError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(str(exc)) from None
    if cfg.order < 0 or cfg.threads < 1 or cfg.synth_n_samples < 2 or cfg.synth_noise_std < 0:
        raise ConfigError("order >= 0, threads >= 1, synth n_samples >= 2 and noise_std >= 0 required")
    if cfg.seed is not None and not 0 <= cfg.seed < 2**64:
        raise ConfigError("seed must be an unsigned 64-bit integer")
    return cfg


def default_config() -> RunConfig:
    return loads()


def best_member_fragment(params: ReceptiveFieldParams, seed: int, objectives: dict) -> str:
    """Config fragment holding a Pareto member's receptive field and how it was scored."""
    cp = configparser.ConfigParser()
    cp["receptive_field"] = {f.name: _fmt(getattr(params, f.name)) for f in fields(ReceptiveFieldParams)}
    cp["evaluation"] = {"seed": str(seed), **{k: _fmt(float(v)) for k, v in objectives.items()}}
    buf = io.StringIO()
    cp.write(buf)
    return buf.getvalue()


def fragment_seed(text: str) -> Optional[int]:
    cp = configparser.ConfigParser()
    cp.read_string(text)
    return int(cp["evaluation"]["seed"]) if cp.has_section("evaluation") else None
