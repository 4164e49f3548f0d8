"""Run orchestration: one seeded simulation, and aggregation over many.

Each run is an independent single-threaded event loop; multiple runs differ
only in their seed and can execute in separate processes. The per-second
sampling chain records live node count and mean node load (and, on request,
whether the overlay is weakly connected among live nodes).
"""

from collections import deque
from dataclasses import dataclass
from multiprocessing import get_context

from .analytics import MetricsCollector, aggregate, build_frames
from .cloudenv import CloudEnv
from .engine import Engine
from .workload import Client, RateTrace, TraceTransform, load_trace, rate_at


@dataclass
class RunResult:
    seed: int
    frames: dict
    totals: dict
    summary: dict
    connectivity_fraction: float = None


def _load_workload(spec):
    if spec.trace_file is not None:
        trace = load_trace(spec.trace_file)
    else:
        trace = RateTrace([tuple(p) for p in spec.points])
    return trace, TraceTransform(spec.rate_scale, spec.time_scale)


def weakly_connected(nodes):
    """True when the live nodes' view graph is weakly connected."""
    if len(nodes) <= 1:
        return True
    live = {node.id for node in nodes}
    adjacency = {node.id: [] for node in nodes}
    for node in nodes:
        for nb in node.view.ids():
            if nb in live:
                adjacency[node.id].append(nb)
                adjacency[nb].append(node.id)
    start = nodes[0].id
    seen = {start}
    frontier = deque([start])
    while frontier:
        for nb in adjacency[frontier.popleft()]:
            if nb not in seen:
                seen.add(nb)
                frontier.append(nb)
    return len(seen) == len(live)


def run_single(config, seed, track_connectivity=False):
    """Execute one simulation run and return its frames and summaries."""
    config.validate()
    engine = Engine(seed, latency=config.latency)
    metrics = MetricsCollector(config.duration)
    env = CloudEnv(engine, config, metrics)
    trace, transform = _load_workload(config.workload)
    client = Client(engine, env, metrics, trace, transform)

    def sample():
        now = engine.now
        live = env.live_nodes()
        n = len(live)
        mean_load = (
            sum(node.measured_load(now) for node in live) / n if n else 0.0
        )
        connected = weakly_connected(live) if track_connectivity else None
        metrics.sample(now, n, mean_load, connected)
        engine.schedule(1.0, sample)

    env.bootstrap()
    env.start()
    client.start()
    engine.schedule(0.5, sample)  # mid-frame samples
    engine.run_until(config.duration)

    frames = build_frames(
        metrics,
        lambda t: rate_at(trace, transform, t),
        config.capacity.mean(),
        config.scaler,
        config.latency,
    )
    connectivity = None
    if track_connectivity:
        flags = [c for c in metrics.connected if c is not None]
        connectivity = sum(flags) / len(flags) if flags else 1.0
    return RunResult(
        seed=seed,
        frames=frames,
        totals=metrics.totals(),
        summary=metrics.summary(config.warmup),
        connectivity_fraction=connectivity,
    )


def _run_one(args):
    config, seed, track = args
    return run_single(config, seed, track)


def run_many(config, runs, base_seed=None, processes=1, track_connectivity=False):
    """Run ``runs`` seeded simulations; returns (RunAggregate, [RunResult])."""
    if runs < 1:
        raise ValueError("need at least one run")
    if base_seed is None:
        base_seed = config.base_seed
    seeds = [base_seed + i for i in range(runs)]
    jobs = [(config, seed, track_connectivity) for seed in seeds]
    if processes > 1 and runs > 1:
        with get_context("fork").Pool(min(processes, runs)) as pool:
            results = pool.map(_run_one, jobs)
    else:
        results = [_run_one(job) for job in jobs]
    aggr = aggregate(
        [r.frames for r in results], [r.summary for r in results], config.name
    )
    return aggr, results
