import csv
import xml.etree.ElementTree as ET

import numpy as np
import pytest

from vicsek_mean.ensemble import ControllerNoise, ensemble_mean, run_trajectory
from vicsek_mean.initial import ClusterInit
from vicsek_mean.model import SimParams
from vicsek_mean.output import (
    METRICS_HEADER,
    render_plot,
    write_control_csv,
    write_metrics_csv,
    write_positions_csv,
    write_summary_csv,
)

SVG = "{http://www.w3.org/2000/svg}"


def params(horizon=2, delta=0.05):
    return SimParams(n=4, B=40.0, r=8.0, v=2.0, delta=delta, seed=7, horizon=horizon)


def read(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


def test_metrics_rows_and_round_trip(tmp_path):
    tr = run_trajectory(params())
    path = tmp_path / "m.csv"
    write_metrics_csv([tr], path)
    rows = read(path)
    assert tuple(rows[0]) == METRICS_HEADER
    assert len(rows) == 4
    assert [float(r[2]) for r in rows[1:]] == tr.d_theta.tolist()
    assert [float(r[3]) for r in rows[1:]] == tr.d_x.tolist()
    assert b"\r" not in path.read_bytes()


def test_metrics_byte_identical_on_rerun(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    write_metrics_csv([run_trajectory(params(20))], a)
    write_metrics_csv([run_trajectory(params(20))], b)
    assert a.read_bytes() == b.read_bytes()


def test_summary_csv(tmp_path):
    s = ensemble_mean(params(10), 5)
    path = tmp_path / "s.csv"
    write_summary_csv(s, path)
    rows = read(path)
    assert rows[0][:3] == ["t", "mean_d_theta", "std_d_theta"]
    assert len(rows) == 12
    assert np.array_equal([float(r[1]) for r in rows[1:]], s.mean_d_theta)


def test_control_and_positions_csv(tmp_path):
    tr = run_trajectory(params(5), ClusterInit(20.0), ControllerNoise(), keep_states=True)
    write_control_csv(tr, tmp_path / "c.csv")
    rows = read(tmp_path / "c.csv")
    assert rows[1][1] in {"AngleContract", "BoundaryAlign", "TwoGroupMerge", "Idle"}
    assert rows[-1][1] == ""
    write_positions_csv(tr, tmp_path / "p.csv")
    assert len(read(tmp_path / "p.csv")) == 1 + 6 * 4
    with pytest.raises(ValueError):
        write_positions_csv(run_trajectory(params()), tmp_path / "q.csv")


def test_unwritable_path_names_path(tmp_path):
    bad = tmp_path / "missing" / "m.csv"
    with pytest.raises(OSError, match="missing"):
        write_metrics_csv([run_trajectory(params())], bad)


def test_plot_structure(tmp_path):
    series = [(d, ensemble_mean(params(30, d), 4)) for d in (0.05, 0.01)]
    path = tmp_path / "p.svg"
    render_plot(series, path)
    root = ET.parse(path).getroot()
    lines = root.findall(f"{SVG}polyline")
    assert len(lines) == 2
    assert len(root.findall(f"{SVG}polygon")) == 2
    legend = [t.text for t in root.iter(f"{SVG}text") if t.get("class") == "legend"]
    assert legend == ["delta=0.05", "delta=0.01"]


def test_flat_zero_series_is_horizontal(tmp_path):
    s = ensemble_mean(params(10, 0.0), 3, ClusterInit(2.0))
    path = tmp_path / "z.svg"
    render_plot([(0.0, s)], path)
    line = ET.parse(path).getroot().find(f"{SVG}polyline")
    ys = {p.split(",")[1] for p in line.get("points").split()[1:]}
    assert len(ys) == 1


def test_plot_rejects_bad_input(tmp_path):
    with pytest.raises(ValueError):
        render_plot([], tmp_path / "x.svg")
    a, b = ensemble_mean(params(10), 2), ensemble_mean(params(12), 2)
    with pytest.raises(ValueError, match="horizons"):
        render_plot([(0.05, a), (0.05, b)], tmp_path / "x.svg")
