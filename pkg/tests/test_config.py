import json
import math

import numpy as np
import pytest

from vicsek_mean.config import ConfigError, generate_initial_state, load_config, parse_config
from vicsek_mean.ensemble import ControllerNoise, RandomNoise
from vicsek_mean.initial import ClusterInit, ExplicitInit, TwoClustersInit, UniformInit
from vicsek_mean.noise import NoiseKind, RngStream

BASE = {"n": 5, "B": 40, "r": 8, "v": 2, "seed": 1}


def doc(**kw):
    d = dict(BASE)
    d.update(kw)
    return json.dumps(d)


def test_minimal_document():
    cfg = parse_config(doc())
    p = cfg.params
    assert (p.n, p.B, p.r, p.v, p.delta, p.horizon) == (5, 40.0, 8.0, 2.0, 0.05, 500)
    assert isinstance(cfg.initializer, UniformInit)
    assert cfg.noise_source == RandomNoise(NoiseKind.UNIFORM)
    assert cfg.runs == 50 and not cfg.emit_plot


def test_radius_larger_than_box():
    with pytest.raises(ConfigError, match="r must satisfy 0 < r < B"):
        parse_config(doc(r=50))


@pytest.mark.parametrize("key", ["seed", "n", "B", "r", "v"])
def test_missing_required(key):
    d = dict(BASE)
    del d[key]
    with pytest.raises(ConfigError, match=key):
        parse_config(json.dumps(d))


@pytest.mark.parametrize(
    "kw",
    [
        dict(colour="red"),
        dict(noise_kind="cauchy"),
        dict(n=2.5),
        dict(seed=True),
        dict(runs=0),
        dict(emit_plot="yes"),
        dict(controller_alpha=0.2, delta=0.1),
        dict(deltas=[]),
        dict(tau=0),
        dict(epsilon=9),
        dict(initializer={"kind": "spiral"}),
        dict(initializer={"kind": "uniform", "lo": 1, "hi": 0}),
        dict(initializer={"kind": "explicit", "theta": [0], "x": [[1, 1]]}),
        dict(initializer={"kind": "cluster", "diameter": 2, "extra": 1}),
    ],
)
def test_rejected_documents(kw):
    with pytest.raises(ConfigError):
        parse_config(doc(**kw))


def test_invalid_json():
    with pytest.raises(ConfigError, match="JSON"):
        parse_config("{not json")
    with pytest.raises(ConfigError):
        parse_config("[1, 2]")


def test_controller_and_initializers():
    cfg = parse_config(doc(delta=0.1, controller_alpha=0.04, epsilon=2.0))
    assert cfg.noise_source == ControllerNoise(0.04, 2.0) and cfg.controller_alpha == 0.04
    cfg = parse_config(doc(initializer={"kind": "two_clusters", "gap": 20}))
    assert cfg.initializer == TwoClustersInit(20.0)
    cfg = parse_config(doc(initializer={"kind": "cluster", "diameter": 2.5, "lo": -1, "hi": 1}))
    assert cfg.initializer == ClusterInit(2.5, -1.0, 1.0)
    cfg = parse_config(doc(n=2, initializer={"kind": "explicit", "theta": [0, 1], "x": [[1, 1], [2, 2]]}))
    assert isinstance(cfg.initializer, ExplicitInit)


def test_load_config_missing_file(tmp_path):
    with pytest.raises(ConfigError, match="cannot read"):
        load_config(tmp_path / "nope.json")


def test_uniform_angles_moments():
    cfg = parse_config(doc(n=100_000))
    w = generate_initial_state(cfg, RngStream(5))
    half = math.pi / 40
    assert np.all(np.abs(w.theta) <= half)
    assert abs(w.theta.mean()) < 4 * (half / math.sqrt(3)) / math.sqrt(w.n)
    assert np.all((w.x >= 0) & (w.x <= 40))


def test_two_clusters_layout():
    cfg = parse_config(doc(n=4, initializer={"kind": "two_clusters", "gap": 20}))
    w = generate_initial_state(cfg, RngStream(0))
    assert np.array_equal(w.x[0], w.x[1]) and np.array_equal(w.x[2], w.x[3])
    assert np.hypot(*(w.x[0] - w.x[2])) == 20.0


def test_cluster_diameter_bound():
    cfg = parse_config(doc(n=50, initializer={"kind": "cluster", "diameter": 3.0}))
    for k in range(20):
        w = generate_initial_state(cfg, RngStream(1, k))
        d = np.hypot(*(w.x[:, None, :] - w.x[None, :, :]).transpose(2, 0, 1))
        assert d.max() <= 3.0


def test_repo_configs_parse():
    from pathlib import Path

    root = Path(__file__).resolve().parents[1] / "configs"
    for path in sorted(root.glob("*.json")):
        load_config(path)
