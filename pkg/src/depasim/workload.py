"""Trace ingestion and client request generation.

The workload is a piecewise-constant rate trace driving a Poisson arrival
process: after each arrival the current rate is re-read and the next gap is
drawn from an exponential with that rate. A transform scales the rate axis
and compresses the time axis. A single client issues every request, resolving
an entry node through the DNS registry.

The repository ships a synthetic stand-in for the original 48-hour trace
(same peak rate, duration, and double-peak profile); ``reference_points``
regenerates it deterministically.
"""

import math
from bisect import bisect_right
from dataclasses import dataclass

from .node import Request, REJECTED


class TraceError(ValueError):
    pass


@dataclass
class TraceTransform:
    rate_scale: float = 1.0
    time_scale: float = 1.0


class RateTrace:
    """Ordered (time_offset, rate) breakpoints; rate holds until the next one."""

    def __init__(self, points):
        if not points:
            raise TraceError("trace has no breakpoints")
        last = None
        for i, (t, r) in enumerate(points):
            if i == 0 and t != 0.0:
                raise TraceError("trace must start at time 0 (line 1 starts at %g)" % t)
            if last is not None and t <= last:
                raise TraceError("trace times must be strictly increasing (offset %g)" % t)
            if r < 0:
                raise TraceError("negative rate %g at offset %g" % (r, t))
            last = t
        self.points = [(float(t), float(r)) for t, r in points]
        self.times = [p[0] for p in self.points]
        self.duration = self.points[-1][0]


def load_trace(path):
    """Parse a two-column "time_seconds rate_per_second" trace file."""
    points = []
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 2:
                raise TraceError("line %d: expected two columns" % lineno)
            try:
                t, r = float(parts[0]), float(parts[1])
            except ValueError:
                raise TraceError("line %d: non-numeric value" % lineno) from None
            if points and t <= points[-1][0]:
                raise TraceError("line %d: time offsets must be strictly increasing" % lineno)
            if r < 0:
                raise TraceError("line %d: negative rate" % lineno)
            points.append((t, r))
    if not points:
        raise TraceError("empty trace file: %s" % path)
    return RateTrace(points)


def rate_at(trace, transform, t):
    """Request rate at transformed time t; the last breakpoint holds forever."""
    if t < 0:
        return 0.0
    original = t / transform.time_scale
    idx = bisect_right(trace.times, original) - 1
    return trace.points[idx][1] * transform.rate_scale


def next_positive_time(trace, transform, t):
    """Earliest transformed time > t with a positive rate, or None."""
    scale = transform.time_scale
    original = t / scale
    idx = bisect_right(trace.times, original) - 1
    for time, rate in trace.points[max(idx, 0):]:
        transformed = time * scale
        if transformed > t and rate > 0:
            return transformed
    return None


class Client:
    """The single request issuer; also the sink for responses."""

    alive = True

    def __init__(self, engine, env, metrics, trace, transform):
        self.engine = engine
        self.env = env
        self.metrics = metrics
        self.trace = trace
        self.transform = transform
        self.rng = engine.rng("workload")
        self.issued = 0
        env.client = self

    def start(self):
        self._schedule_next()

    def _schedule_next(self):
        now = self.engine.now
        rate = rate_at(self.trace, self.transform, now)
        if rate > 0:
            gap = self.rng.expovariate(rate)
        else:
            upcoming = next_positive_time(self.trace, self.transform, now)
            if upcoming is None:
                return  # trace exhausted
            rate = rate_at(self.trace, self.transform, upcoming)
            gap = (upcoming - now) + self.rng.expovariate(rate)
        self.engine.schedule(gap, self._issue)

    def _issue(self):
        now = self.engine.now
        self.issued += 1
        self.metrics.record_issued(now)
        entry = self.env.dns.resolve()
        if entry is None:
            # no entry point into the system at all
            self.metrics.record_rejected(now)
        else:
            req = Request(self.issued, now, entry)
            node = self.env.lookup(entry)
            self.engine.send(
                node,
                lambda: node.on_request(req),
                on_drop=lambda: self._timeout(req),
            )
        self._schedule_next()

    def _timeout(self, req):
        req.state = REJECTED
        self.metrics.record_rejected(self.engine.now)


# -- synthetic reference trace ------------------------------------------------

TRACE_DURATION = 172800.0  # 48 hours
TRACE_PEAK = 700.0
TRACE_STEP = 300.0


def reference_points():
    """Deterministic 48 h double-peak profile peaking at 700 req/sec.

    A smooth baseline plus two dominant activity peaks (and a late bump),
    with a mild oscillation for texture; the whole curve is normalized so the
    maximum is exactly the published peak rate.
    """

    def shape(hours):
        base = 60.0 + 45.0 / (1.0 + math.exp(-(hours - 1.8) / 0.35))
        peak1 = 640.0 * math.exp(-(((hours - 10.7) / 1.15) ** 2))
        peak2 = 430.0 * math.exp(-(((hours - 28.4) / 1.9) ** 2))
        bump = 130.0 * math.exp(-(((hours - 35.6) / 0.75) ** 2))
        wobble = 1.0 + 0.05 * math.sin(2.0 * math.pi * hours / 0.9)
        return (base + peak1 + peak2 + bump) * wobble

    times = [i * TRACE_STEP for i in range(int(TRACE_DURATION / TRACE_STEP) + 1)]
    raw = [shape(t / 3600.0) for t in times]
    scale = TRACE_PEAK / max(raw)
    return [(t, round(r * scale, 3)) for t, r in zip(times, raw)]


def write_trace(path, points):
    with open(path, "w") as fh:
        fh.write("# synthetic 48 h reference trace, one 'time_seconds rate_per_second' pair per line\n")
        for t, r in points:
            fh.write("%g %g\n" % (t, r))
