"""JSON experiment configuration.

Recognised keys (anything else is rejected); ``n``, ``B``, ``r``, ``v`` and
``seed`` are required::

    n                 agent count, integer >= 1
    B                 side of the square domain, > 0
    r                 neighbour radius, 0 < r < B
    v                 speed per step, > 0
    seed              master seed, integer in [0, 2**64 - 1]
    delta             noise amplitude (default 0.05)
    noise_kind        "uniform" | "two_point" | "truncated_gaussian"
    horizon           number of steps (default 500)
    initializer       object with a "kind" key (see below); default uniform
    runs              Monte-Carlo run count (default 50)
    outputs           output path prefix (default "vicsek")
    emit_plot         write SVG plots where applicable (default false)
    controller_alpha  drive runs with the merging controller at this alpha
    deltas            noise amplitudes for sweeps (default [0.05, 0.02, 0.01])
    tau               heading-spread threshold (default 0.1)
    epsilon           diameter threshold for controller runs (default r/3)

Initializer objects::

    {"kind": "uniform", "lo": -0.0785, "hi": 0.0785}
    {"kind": "explicit", "theta": [...], "x": [[x, y], ...]}
    {"kind": "two_clusters", "gap": 20, "lo": ..., "hi": ...}
    {"kind": "cluster", "diameter": 2.0, "lo": ..., "hi": ...}
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

from .ensemble import ControllerNoise, NoiseSource, RandomNoise
from .initial import ClusterInit, ExplicitInit, Initializer, TwoClustersInit, UniformInit
from .model import SimParams
from .noise import NoiseKind, RngStream

__all__ = ["ConfigError", "ExperimentConfig", "parse_config", "load_config", "generate_initial_state"]

FIG2_DELTAS = (0.05, 0.02, 0.01)

_KEYS = {
    "n", "B", "r", "v", "seed", "delta", "noise_kind", "horizon", "initializer", "runs",
    "outputs", "emit_plot", "controller_alpha", "deltas", "tau", "epsilon",
}
_REQUIRED = ("n", "B", "r", "v", "seed")
_INIT_KEYS = {
    "uniform": {"kind", "lo", "hi"},
    "explicit": {"kind", "theta", "x"},
    "two_clusters": {"kind", "gap", "lo", "hi"},
    "cluster": {"kind", "diameter", "lo", "hi"},
}


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class ExperimentConfig:
    params: SimParams
    initializer: Initializer
    noise_source: NoiseSource
    runs: int = 50
    outputs: str = "vicsek"
    emit_plot: bool = False
    deltas: tuple[float, ...] = FIG2_DELTAS
    tau: float = 0.1
    epsilon: float | None = None

    @property
    def controller_alpha(self) -> float | None:
        return self.noise_source.alpha if isinstance(self.noise_source, ControllerNoise) else None


def _number(doc: dict, key: str, default=None) -> float:
    value = doc.get(key, default)
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
        raise ConfigError(f"{key} must be a finite number (got {value!r})")
    return float(value)


def _integer(doc: dict, key: str, default=None) -> int:
    value = doc.get(key, default)
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{key} must be an integer (got {value!r})")
    return value


def _initializer(entry) -> Initializer:
    if entry is None:
        return UniformInit()
    if not isinstance(entry, dict) or "kind" not in entry:
        raise ConfigError('initializer must be an object with a "kind" key')
    kind = entry["kind"]
    if kind not in _INIT_KEYS:
        raise ConfigError(f"initializer.kind must be one of {sorted(_INIT_KEYS)} (got {kind!r})")
    unknown = set(entry) - _INIT_KEYS[kind]
    if unknown:
        raise ConfigError(f"unknown initializer keys for {kind!r}: {sorted(unknown)}")
    angles = {}
    for k in ("lo", "hi"):
        if k in entry:
            angles[k] = _number(entry, k)
    try:
        if kind == "uniform":
            return UniformInit(**angles)
        if kind == "two_clusters":
            return TwoClustersInit(_number(entry, "gap"), **angles)
        if kind == "cluster":
            return ClusterInit(_number(entry, "diameter"), **angles)
        theta, x = entry.get("theta"), entry.get("x")
        if not isinstance(theta, list) or not isinstance(x, list):
            raise ConfigError("explicit initializer needs lists 'theta' and 'x'")
        if not all(isinstance(p, list) and len(p) == 2 for p in x):
            raise ConfigError("explicit initializer 'x' must be a list of [x, y] pairs")
        return ExplicitInit(tuple(float(t) for t in theta), tuple((float(p[0]), float(p[1])) for p in x))
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"initializer: {exc}") from None


def parse_config(text: str) -> ExperimentConfig:
    """Parse and validate a JSON configuration document."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise ConfigError("configuration must be a JSON object")
    unknown = set(doc) - _KEYS
    if unknown:
        raise ConfigError(f"unknown configuration keys: {sorted(unknown)}")
    missing = [k for k in _REQUIRED if k not in doc]
    if missing:
        raise ConfigError(f"missing required keys: {missing}")

    try:
        kind = NoiseKind(doc.get("noise_kind", "uniform"))
    except ValueError:
        raise ConfigError(
            f"noise_kind must be one of {[k.value for k in NoiseKind]} (got {doc.get('noise_kind')!r})"
        ) from None
    try:
        params = SimParams(
            n=_integer(doc, "n"),
            B=_number(doc, "B"),
            r=_number(doc, "r"),
            v=_number(doc, "v"),
            delta=_number(doc, "delta", 0.05),
            seed=_integer(doc, "seed"),
            noise_kind=kind,
            horizon=_integer(doc, "horizon", 500),
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from None

    alpha = doc.get("controller_alpha")
    if alpha is None:
        source: NoiseSource = RandomNoise(kind)
    else:
        alpha = _number(doc, "controller_alpha")
        if not 0 < alpha < params.delta:
            raise ConfigError(f"controller_alpha must satisfy 0 < controller_alpha < delta (got {alpha})")
        source = ControllerNoise(alpha)

    runs = _integer(doc, "runs", 50)
    if runs < 1:
        raise ConfigError(f"runs must be >= 1 (got {runs})")
    outputs = doc.get("outputs", "vicsek")
    if not isinstance(outputs, str) or not outputs:
        raise ConfigError("outputs must be a non-empty string")
    emit_plot = doc.get("emit_plot", False)
    if not isinstance(emit_plot, bool):
        raise ConfigError("emit_plot must be true or false")
    deltas = doc.get("deltas", list(FIG2_DELTAS))
    if not isinstance(deltas, list) or not deltas:
        raise ConfigError("deltas must be a non-empty list")
    deltas = tuple(_number({"deltas": d}, "deltas") for d in deltas)
    if any(d < 0 for d in deltas):
        raise ConfigError("deltas must all be >= 0")
    tau = _number(doc, "tau", 0.1)
    if tau <= 0:
        raise ConfigError("tau must be > 0")
    epsilon = None
    if doc.get("epsilon") is not None:
        epsilon = _number(doc, "epsilon")
        if not 0 < epsilon < params.r:
            raise ConfigError(f"epsilon must satisfy 0 < epsilon < r (got {epsilon})")

    if isinstance(source, ControllerNoise):
        source = ControllerNoise(source.alpha, epsilon)

    init = _initializer(doc.get("initializer"))
    if isinstance(init, ExplicitInit) and (len(init.theta) != params.n or len(init.x) != params.n):
        raise ConfigError(f"explicit initializer lists must have length n={params.n}")
    return ExperimentConfig(params, init, source, runs, outputs, emit_plot, deltas, tau, epsilon)


def load_config(path) -> ExperimentConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    return parse_config(text)


def generate_initial_state(config: ExperimentConfig, rng: RngStream):
    return config.initializer.generate(config.params, rng)
