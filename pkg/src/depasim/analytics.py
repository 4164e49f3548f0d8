"""Metric collection and analytic baselines.

Per-second frames accumulate request lifecycle counts and response/pending
times; a sampling chain adds node counts and mean load. The analytic side
provides the centralized-oracle baselines: the optimal node count for a
target load, and the M/M/m response time via a numerically stable Erlang-C.
"""

import csv
import math
import os

FRAME_COLUMNS = (
    "t", "issued", "processed", "rejected", "lost", "nodes",
    "n_opt_des", "n_opt_min", "n_opt_max",
    "mean_load", "resp_time", "pend_time", "opt_resp_time",
)


# -- analytic baselines -------------------------------------------------------

def n_opt(lam, c_avg, load):
    """Optimal node count for arrival rate lam at target per-node load."""
    if c_avg <= 0 or load <= 0:
        raise ValueError("c_avg and load must be positive")
    return lam / (c_avg * load)


def erlang_c(m, a):
    """Probability that an arrival waits in an M/M/m queue with offered load a.

    Uses the Erlang-B recurrence (no raw factorials), so it stays stable for
    thousands of servers.
    """
    if m < 1:
        raise ValueError("need at least one server")
    if a <= 0:
        return 0.0
    if a >= m:
        raise ValueError("unstable system: offered load %g >= %d servers" % (a, m))
    b = 1.0
    for k in range(1, m + 1):
        b = a * b / (k + a * b)
    rho = a / m
    return b / (1.0 - rho + rho * b)


def mmm_response_time(lam, mu, m, network_latency=0.0):
    """Mean response time of an M/M/m system plus the round-trip latency."""
    if mu <= 0:
        raise ValueError("service rate must be positive")
    if lam < 0:
        raise ValueError("arrival rate must be non-negative")
    if lam >= m * mu:
        raise ValueError("unstable system: lambda %g >= m*mu %g" % (lam, m * mu))
    wait = erlang_c(m, lam / mu) / (m * mu - lam) if lam > 0 else 0.0
    return 1.0 / mu + wait + 2.0 * network_latency


# -- per-run collection -------------------------------------------------------

class MetricsCollector:
    """Accumulates request/node lifecycle events into 1-second frames."""

    def __init__(self, duration):
        self.duration = duration
        n = int(math.ceil(duration)) + 1
        self.n_frames = n
        self.issued = [0] * n
        self.processed = [0] * n
        self.rejected = [0] * n
        self.lost = [0] * n
        self.resp_sum = [0.0] * n
        self.resp_n = [0] * n
        self.pend_sum = [0.0] * n
        self.pend_n = [0] * n
        self.nodes = [None] * n
        self.mean_load = [None] * n
        self.connected = [None] * n

    def _frame(self, t):
        idx = int(t)
        return idx if idx < self.n_frames else self.n_frames - 1

    def record_issued(self, t):
        self.issued[self._frame(t)] += 1

    def record_rejected(self, t):
        self.rejected[self._frame(t)] += 1

    def record_lost(self, t, count=1):
        self.lost[self._frame(t)] += count

    def record_processed(self, t, response_time):
        i = self._frame(t)
        self.processed[i] += 1
        self.resp_sum[i] += response_time
        self.resp_n[i] += 1

    def record_pending(self, t, pending_time):
        i = self._frame(t)
        self.pend_sum[i] += pending_time
        self.pend_n[i] += 1

    def sample(self, t, live_nodes, mean_load, connected=None):
        i = self._frame(t)
        self.nodes[i] = live_nodes
        self.mean_load[i] = mean_load
        self.connected[i] = connected

    def totals(self):
        issued = sum(self.issued)
        processed = sum(self.processed)
        rejected = sum(self.rejected)
        lost = sum(self.lost)
        return {
            "issued": issued,
            "processed": processed,
            "rejected": rejected,
            "lost": lost,
            "in_flight": issued - processed - rejected - lost,
        }

    def summary(self, warmup=0.0):
        """Scenario scalars over frames at or after the warmup cutoff."""
        start = int(warmup)
        issued = sum(self.issued[start:])
        rejected = sum(self.rejected[start:])
        lost = sum(self.lost[start:])
        resp_sum = sum(self.resp_sum[start:])
        resp_n = sum(self.resp_n[start:])
        return {
            "issued": issued,
            "processed": sum(self.processed[start:]),
            "rejected": rejected,
            "lost": lost,
            "resp_sum": resp_sum,
            "resp_n": resp_n,
            "avg_resp_time_s": resp_sum / resp_n if resp_n else None,
            "rejected_pct": 100.0 * rejected / issued if issued else 0.0,
            "lost_pct": 100.0 * lost / issued if issued else 0.0,
        }


def build_frames(collector, rate_fn, c_avg, scaler, latency):
    """Turn a collector into the documented frame table (dict of columns).

    ``rate_fn`` maps a frame time to the configured arrival rate, used for the
    optimal-node and optimal-response baselines; the M/M/m baseline treats
    servers as homogeneous at the mean capacity and is re-evaluated against
    the sampled live node count of each frame.
    """
    n = collector.n_frames
    table = {col: [None] * n for col in FRAME_COLUMNS}
    mu = c_avg
    for i in range(n):
        t = float(i)
        lam = rate_fn(t)
        table["t"][i] = t
        table["issued"][i] = collector.issued[i]
        table["processed"][i] = collector.processed[i]
        table["rejected"][i] = collector.rejected[i]
        table["lost"][i] = collector.lost[i]
        table["nodes"][i] = collector.nodes[i]
        table["n_opt_des"][i] = n_opt(lam, c_avg, scaler.load_des)
        table["n_opt_min"][i] = n_opt(lam, c_avg, scaler.load_max)
        table["n_opt_max"][i] = n_opt(lam, c_avg, scaler.load_min)
        table["mean_load"][i] = collector.mean_load[i]
        if collector.resp_n[i]:
            table["resp_time"][i] = collector.resp_sum[i] / collector.resp_n[i]
        if collector.pend_n[i]:
            table["pend_time"][i] = collector.pend_sum[i] / collector.pend_n[i]
        m = collector.nodes[i]
        if m and lam < m * mu:
            table["opt_resp_time"][i] = mmm_response_time(lam, mu, m, latency)
    return table


# -- cross-run aggregation ----------------------------------------------------

class RunAggregate:
    """Elementwise min/avg/max frame envelopes plus scenario scalars."""

    def __init__(self, frames_min, frames_avg, frames_max, scalars, n_runs):
        self.frames_min = frames_min
        self.frames_avg = frames_avg
        self.frames_max = frames_max
        self.scalars = scalars
        self.n_runs = n_runs


def aggregate(tables, summaries, scenario_name=""):
    """Combine per-run frame tables and summaries into a RunAggregate."""
    if not tables:
        raise ValueError("no runs to aggregate")
    length = len(tables[0]["t"])
    for table in tables:
        if len(table["t"]) != length:
            raise ValueError("mismatched frame series lengths across runs")
    frames_min = {}
    frames_avg = {}
    frames_max = {}
    for col in FRAME_COLUMNS:
        mins, avgs, maxs = [], [], []
        columns = [table[col] for table in tables]
        for i in range(length):
            values = [c[i] for c in columns if c[i] is not None]
            if values:
                mins.append(min(values))
                avgs.append(sum(values) / len(values))
                maxs.append(max(values))
            else:
                mins.append(None)
                avgs.append(None)
                maxs.append(None)
        frames_min[col] = mins
        frames_avg[col] = avgs
        frames_max[col] = maxs
    issued = sum(s["issued"] for s in summaries)
    rejected = sum(s["rejected"] for s in summaries)
    lost = sum(s["lost"] for s in summaries)
    resp_sum = sum(s["resp_sum"] for s in summaries)
    resp_n = sum(s["resp_n"] for s in summaries)
    scalars = {
        "scenario": scenario_name,
        "avg_resp_time_s": resp_sum / resp_n if resp_n else None,
        "rejected_pct": 100.0 * rejected / issued if issued else 0.0,
        "lost_pct": 100.0 * lost / issued if issued else 0.0,
    }
    return RunAggregate(frames_min, frames_avg, frames_max, scalars, len(tables))


def _cell(value):
    if value is None:
        return ""
    if isinstance(value, float):
        return "%.6g" % value
    return str(value)


def emit_csv(aggr, destination):
    """Write frames.csv (across-run averages) and summary.csv under a directory."""
    os.makedirs(destination, exist_ok=True)
    frames_path = os.path.join(destination, "frames.csv")
    with open(frames_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(FRAME_COLUMNS)
        avg = aggr.frames_avg
        for i in range(len(avg["t"])):
            writer.writerow([_cell(avg[col][i]) for col in FRAME_COLUMNS])
    summary_path = os.path.join(destination, "summary.csv")
    with open(summary_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["scenario", "avg_resp_time_s", "rejected_pct", "lost_pct"])
        s = aggr.scalars
        writer.writerow([
            s["scenario"], _cell(s["avg_resp_time_s"]),
            _cell(s["rejected_pct"]), _cell(s["lost_pct"]),
        ])
    return frames_path, summary_path
