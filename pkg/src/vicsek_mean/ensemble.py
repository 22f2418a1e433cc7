"""Monte-Carlo estimators over independent runs.

Run ``k`` of an experiment draws its initial state and all of its noise from
``RngStream(params.seed, k)``, so any run can be replayed on its own and the
results do not depend on how runs are scheduled across threads. Aggregates
are always reduced in run-index order.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterator, Sequence, TypeVar

import numpy as np
from statsmodels.stats.proportion import proportion_confint

from .control import ControllerPhase, merge_controller
from .initial import Initializer, UniformInit
from .model import (
    MetricsRecord,
    SimParams,
    WorldState,
    _components_from_neighbors,
    lists_from_adjacency,
    neighbor_lists,
    pair_distances,
    step,
)
from .noise import NoiseKind, RngStream, sample_noise

__all__ = [
    "RandomNoise",
    "ControllerNoise",
    "Frame",
    "TrajectoryRecord",
    "EnsembleSummary",
    "EscapeEstimate",
    "ExceedanceEstimate",
    "HittingTimeStats",
    "SweepRow",
    "EscapeSearch",
    "iter_run",
    "run_trajectory",
    "ensemble_runs",
    "summarize",
    "ensemble_mean",
    "escape_probability",
    "escape_delta_search",
    "sup_exceedance",
    "hitting_time_stats",
    "delta_sweep",
    "plateau_window",
    "resolve_workers",
]

Z95 = 1.96
PLATEAU_FRACTION = 0.2

T = TypeVar("T")


@dataclass(frozen=True)
class RandomNoise:
    """i.i.d. noise; ``kind=None`` means ``params.noise_kind``."""

    kind: NoiseKind | None = None


@dataclass(frozen=True)
class ControllerNoise:
    """Noise chosen by ``merge_controller`` (``alpha`` defaults to ``delta/2``, ``epsilon`` to ``r/3``)."""

    alpha: float | None = None
    epsilon: float | None = None


NoiseSource = RandomNoise | ControllerNoise


def resolve_workers(workers: int | None) -> int:
    if workers is None or workers == 0:
        return os.cpu_count() or 1
    if workers < 0:
        raise ValueError("workers must be >= 0")
    return int(workers)


def _map_runs(fn: Callable[[int], T], runs: int, workers: int | None) -> list[T]:
    if runs < 1:
        raise ValueError("need at least one run")
    workers = resolve_workers(workers)
    if workers == 1 or runs == 1:
        return [fn(k) for k in range(runs)]
    with ThreadPoolExecutor(max_workers=min(workers, runs)) as pool:
        return list(pool.map(fn, range(runs)))


# ---------------------------------------------------------------- single runs


@dataclass(frozen=True)
class Frame:
    """State at step ``t`` together with the quantities the update needs."""

    world: WorldState
    neighbors: list[np.ndarray]
    d_x: float
    noise: np.ndarray | None
    phase: ControllerPhase | None

    @property
    def record(self) -> MetricsRecord:
        th = self.world.theta
        return MetricsRecord(
            t=self.world.t,
            d_theta=float(th.max() - th.min()),
            d_x=self.d_x,
            components=len(_components_from_neighbors(self.neighbors)),
            mean_heading=float(np.mean(th)),
        )


def iter_run(
    params: SimParams,
    initializer: Initializer = UniformInit(),
    source: NoiseSource = RandomNoise(),
    run_index: int = 0,
) -> Iterator[Frame]:
    """Yield frames ``t = 0 .. params.horizon`` of run ``run_index``.

    The last frame carries no noise. Stopping iteration early is allowed.
    """
    rng = RngStream(params.seed, run_index)
    world = initializer.generate(params, rng)
    use_grid = world.n >= params.grid_threshold
    kind = (source.kind or params.noise_kind) if isinstance(source, RandomNoise) else None
    while True:
        dist = pair_distances(world.x)
        if use_grid:
            nbrs = neighbor_lists(world, params.r, params.B, use_grid=True)
        else:
            nbrs = lists_from_adjacency(dist <= params.r)
        d_x = float(dist.max())
        if world.t >= params.horizon:
            yield Frame(world, nbrs, d_x, None, None)
            return
        if isinstance(source, ControllerNoise):
            xi, phase = merge_controller(world, params, source.alpha, source.epsilon)
        else:
            xi, phase = sample_noise(kind, params.delta, world.n, rng), None
        yield Frame(world, nbrs, d_x, xi, phase)
        world = step(world, params, xi, nbrs)


@dataclass(frozen=True)
class TrajectoryRecord:
    """Per-step metrics of one run, ``t = 0 .. horizon``."""

    run_index: int
    t: np.ndarray
    d_theta: np.ndarray
    d_x: np.ndarray
    components: np.ndarray
    mean_heading: np.ndarray
    phases: tuple[str, ...] | None = None
    states: tuple[WorldState, ...] | None = field(default=None, repr=False)

    @property
    def records(self) -> list[MetricsRecord]:
        return [
            MetricsRecord(int(t), float(a), float(b), int(c), float(m))
            for t, a, b, c, m in zip(self.t, self.d_theta, self.d_x, self.components, self.mean_heading)
        ]

    def __len__(self):
        return self.t.size


def run_trajectory(
    params: SimParams,
    initializer: Initializer = UniformInit(),
    source: NoiseSource = RandomNoise(),
    run_index: int = 0,
    keep_states: bool = False,
) -> TrajectoryRecord:
    recs, phases, states = [], [], []
    for fr in iter_run(params, initializer, source, run_index):
        recs.append(fr.record)
        if fr.phase is not None:
            phases.append(fr.phase.phase.value)
        if keep_states:
            states.append(fr.world)
    cols = list(zip(*[(r.t, r.d_theta, r.d_x, r.components, r.mean_heading) for r in recs]))
    return TrajectoryRecord(
        run_index=run_index,
        t=np.asarray(cols[0], dtype=np.int64),
        d_theta=np.asarray(cols[1], dtype=float),
        d_x=np.asarray(cols[2], dtype=float),
        components=np.asarray(cols[3], dtype=np.int64),
        mean_heading=np.asarray(cols[4], dtype=float),
        phases=tuple(phases) if isinstance(source, ControllerNoise) else None,
        states=tuple(states) if keep_states else None,
    )


# ---------------------------------------------------------------- ensemble means


def plateau_window(horizon: int) -> slice:
    """Steps ``t > 0.8 * horizon``; just ``t = horizon`` when that would be empty."""
    start = int(math.floor((1 - PLATEAU_FRACTION) * horizon)) + 1
    return slice(min(start, horizon), horizon + 1)


@dataclass(frozen=True)
class EnsembleSummary:
    """Per-step cross-run statistics of ``d_theta``.

    ``std_d_theta`` is the sample standard deviation (``ddof=1``); with a
    single run it and ``ci_halfwidth`` are NaN and ``ci_defined`` is False.
    """

    t: np.ndarray
    mean_d_theta: np.ndarray
    std_d_theta: np.ndarray
    ci_halfwidth: np.ndarray
    runs: int
    tau: float
    a: float
    exceed_tau_count: np.ndarray
    exceed_a_count: np.ndarray
    delta: float
    d_theta_runs: np.ndarray = field(repr=False)

    @property
    def ci_defined(self) -> bool:
        return self.runs > 1

    @property
    def horizon(self) -> int:
        return int(self.t[-1])

    def plateau(self) -> tuple[float, float]:
        """Trailing-window average of the mean curve and its standard error.

        The standard error is taken over the per-run window averages.
        """
        w = plateau_window(self.horizon)
        per_run = self.d_theta_runs[:, w].mean(axis=1)
        value = float(self.mean_d_theta[w].mean())
        se = float(per_run.std(ddof=1) / math.sqrt(self.runs)) if self.runs > 1 else math.nan
        return value, se


def ensemble_runs(
    params: SimParams,
    runs: int,
    initializer: Initializer = UniformInit(),
    source: NoiseSource = RandomNoise(),
    workers: int | None = 1,
) -> list[TrajectoryRecord]:
    """Trajectories for run indices ``0 .. runs-1``, in that order."""
    return _map_runs(lambda k: run_trajectory(params, initializer, source, k), runs, workers)


def summarize(trajs: Sequence[TrajectoryRecord], delta: float, tau: float, a: float) -> EnsembleSummary:
    runs = len(trajs)
    dth = np.stack([tr.d_theta for tr in trajs])
    dx = np.stack([tr.d_x for tr in trajs])
    mean = dth.mean(axis=0)
    if runs > 1:
        std = dth.std(axis=0, ddof=1)
        ci = Z95 * std / math.sqrt(runs)
    else:
        std = np.full_like(mean, np.nan)
        ci = np.full_like(mean, np.nan)
    return EnsembleSummary(
        t=trajs[0].t.copy(),
        mean_d_theta=mean,
        std_d_theta=std,
        ci_halfwidth=ci,
        runs=runs,
        tau=tau,
        a=a,
        exceed_tau_count=(dth > tau).sum(axis=0),
        exceed_a_count=(dx > a).sum(axis=0),
        delta=delta,
        d_theta_runs=dth,
    )


def ensemble_mean(
    params: SimParams,
    runs: int,
    initializer: Initializer = UniformInit(),
    source: NoiseSource = RandomNoise(),
    tau: float = 0.1,
    a: float | None = None,
    workers: int | None = 1,
) -> EnsembleSummary:
    """Cross-run statistics of ``d_theta``; exceedance counts use ``tau`` and ``a`` (default ``r``)."""
    trajs = ensemble_runs(params, runs, initializer, source, workers)
    return summarize(trajs, params.delta, tau, params.r if a is None else a)


@dataclass(frozen=True)
class SweepRow:
    delta: float
    plateau: float
    plateau_se: float
    tau: float
    passed: bool


def delta_sweep(
    params: SimParams,
    deltas: Sequence[float],
    tau: float,
    runs: int,
    initializer: Initializer = UniformInit(),
    workers: int | None = 1,
) -> list[SweepRow]:
    """Plateau of the ensemble-mean ``d_theta`` for each noise amplitude, passed iff ``< tau``."""
    if not deltas:
        raise ValueError("deltas must be non-empty")
    rows = []
    for d in deltas:
        if d < 0:
            raise ValueError(f"negative delta {d}")
        summary = ensemble_mean(params.replace(delta=float(d)), runs, initializer, tau=tau, workers=workers)
        value, se = summary.plateau()
        rows.append(SweepRow(float(d), value, se, tau, bool(value < tau)))
    return rows


# ---------------------------------------------------------------- proportions


def wilson_interval(count: np.ndarray, runs: int) -> tuple[np.ndarray, np.ndarray]:
    lo, hi = proportion_confint(np.asarray(count), runs, alpha=0.05, method="wilson")
    return np.asarray(lo, dtype=float), np.asarray(hi, dtype=float)


@dataclass(frozen=True)
class EscapeEstimate:
    """Per-step fraction of runs whose flock diameter exceeds ``a``, with Wilson 95% bounds."""

    a: float
    delta: float
    runs: int
    count: np.ndarray
    frequency: np.ndarray
    lower: np.ndarray
    upper: np.ndarray


def escape_probability(
    params: SimParams,
    a: float,
    runs: int,
    initializer: Initializer,
    workers: int | None = 1,
) -> EscapeEstimate:
    """Estimate ``P{d_x(t) > a}`` for every step from a cohesive start.

    Every run must start with ``d_x(0) <= a / 3``.
    """
    if not 0 < a <= params.r:
        raise ValueError(f"a must satisfy 0 < a <= r (got a={a}, r={params.r})")

    def one(k: int) -> np.ndarray:
        out = np.empty(params.horizon + 1, dtype=bool)
        for fr in iter_run(params, initializer, RandomNoise(), k):
            if fr.world.t == 0 and fr.d_x > a / 3:
                raise ValueError(f"run {k}: initial diameter {fr.d_x:.6g} exceeds a/3 = {a / 3:.6g}")
            out[fr.world.t] = fr.d_x > a
        return out

    escaped = np.stack(_map_runs(one, runs, workers))
    count = escaped.sum(axis=0)
    lo, hi = wilson_interval(count, runs)
    return EscapeEstimate(a, params.delta, runs, count, count / runs, lo, hi)


@dataclass(frozen=True)
class EscapeSearch:
    best_delta: float | None
    tested: tuple[tuple[float, float, bool], ...]  # (delta, max Wilson upper bound, passed)


def escape_delta_search(
    params: SimParams,
    a: float,
    runs: int,
    initializer: Initializer,
    rho: float = 0.05,
    hi: float | None = None,
    iterations: int = 6,
    workers: int | None = 1,
) -> EscapeSearch:
    """Bisect for the largest tested ``delta`` whose escape upper bounds all stay below ``rho``."""
    hi = params.delta if hi is None else hi
    lo = 0.0
    tested = []

    def passes(d: float) -> bool:
        est = escape_probability(params.replace(delta=d), a, runs, initializer, workers)
        worst = float(est.upper.max())
        tested.append((d, worst, worst < rho))
        return worst < rho

    if passes(hi):
        return EscapeSearch(hi, tuple(tested))
    best = None
    for _ in range(iterations):
        mid = 0.5 * (lo + hi)
        if passes(mid):
            best, lo = mid, mid
        else:
            hi = mid
    return EscapeSearch(best, tuple(tested))


@dataclass(frozen=True)
class ExceedanceEstimate:
    """``probability[T]`` estimates ``P{max_{t <= T} d_theta(t) > tau}``."""

    tau: float
    runs: int
    count: np.ndarray
    probability: np.ndarray

    @property
    def stderr(self) -> np.ndarray:
        p = self.probability
        return np.sqrt(p * (1 - p) / self.runs)


def sup_exceedance(
    params: SimParams,
    tau: float,
    runs: int,
    initializer: Initializer = UniformInit(),
    workers: int | None = 1,
) -> ExceedanceEstimate:
    if not tau > 0:
        raise ValueError("tau must be > 0")
    trajs = _map_runs(lambda k: run_trajectory(params, initializer, RandomNoise(), k), runs, workers)
    running = np.maximum.accumulate(np.stack([tr.d_theta for tr in trajs]), axis=1)
    count = (running > tau).sum(axis=0)
    return ExceedanceEstimate(tau, runs, count, count / runs)


# ---------------------------------------------------------------- hitting times


@dataclass(frozen=True)
class HittingTimeStats:
    """First steps with flock diameter ``< epsilon``; ``None`` marks a run censored at the horizon."""

    epsilon: float
    horizon: int
    samples: tuple[int | None, ...]
    phase_logs: tuple[tuple[str, ...], ...] = field(repr=False, default=())

    @property
    def censored(self) -> tuple[bool, ...]:
        return tuple(s is None for s in self.samples)

    @property
    def finite_fraction(self) -> float:
        return sum(s is not None for s in self.samples) / len(self.samples)


def hitting_time_stats(
    params: SimParams,
    epsilon: float,
    runs: int,
    initializer: Initializer = UniformInit(),
    source: NoiseSource | None = None,
    workers: int | None = 1,
) -> HittingTimeStats:
    """Hitting times of ``d_x < epsilon`` with ``params.horizon`` as the step cap.

    The default source is the merging controller with its idle threshold set
    to ``epsilon``.
    """
    if not 0 < epsilon < params.r:
        raise ValueError("epsilon must satisfy 0 < epsilon < r")
    if source is None:
        source = ControllerNoise(epsilon=epsilon)

    def one(k: int) -> tuple[int | None, tuple[str, ...]]:
        log = []
        for fr in iter_run(params, initializer, source, k):
            if fr.d_x < epsilon:
                return fr.world.t, tuple(log)
            if fr.phase is not None:
                log.append(fr.phase.phase.value)
        return None, tuple(log)

    results = _map_runs(one, runs, workers)
    return HittingTimeStats(
        epsilon=epsilon,
        horizon=params.horizon,
        samples=tuple(s for s, _ in results),
        phase_logs=tuple(log for _, log in results),
    )
