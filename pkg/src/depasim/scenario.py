"""Experiment definitions: parameters, capacity mixtures, workload, faults.

A ScenarioConfig fully determines a simulation run given a seed. Configs can
be loaded from YAML files (unknown keys are errors, every invariant is
checked at parse time) and round-trip through to_dict()/from_dict(). The
seven packaged presets mirror the published experiment roster at desk scale;
``rate_scale=10`` reproduces the full ~10,000-node scale.
"""

import dataclasses
from dataclasses import dataclass, field
from importlib import resources

import yaml

from .autoscaler import ScalerParams
from .balancer import AdmissionPolicy


class ScenarioError(ValueError):
    pass


@dataclass
class OverlayParams:
    degree: int = 60
    period: float = 0.3
    max_age: int = 30
    heal: int = 15
    swap: int = 0

    def validate(self):
        if self.degree <= 0:
            raise ScenarioError("overlay.degree must be positive")
        if self.period <= 0:
            raise ScenarioError("overlay.period must be positive")
        if self.max_age <= 0:
            raise ScenarioError("overlay.max_age must be positive")
        if self.heal < 0 or self.swap < 0:
            raise ScenarioError("overlay.heal and overlay.swap must be >= 0")


@dataclass
class CapacityDistribution:
    """Weighted mixture of node capacities (probability, req/sec)."""

    mixture: list = field(default_factory=lambda: [[0.5, 0.5], [0.3, 1.83], [0.2, 1.0]])

    def validate(self):
        if not self.mixture:
            raise ScenarioError("capacity mixture must not be empty")
        total = 0.0
        for item in self.mixture:
            if len(item) != 2:
                raise ScenarioError("capacity mixture entries are [probability, capacity] pairs")
            prob, cap = item
            if prob < 0 or cap <= 0:
                raise ScenarioError(
                    "capacity mixture needs probabilities >= 0 and capacities > 0"
                )
            total += prob
        if abs(total - 1.0) > 1e-9:
            raise ScenarioError("capacity mixture probabilities must sum to 1")

    def mean(self):
        return sum(p * c for p, c in self.mixture)

    def sample(self, rng):
        r = rng.random()
        acc = 0.0
        for prob, cap in self.mixture:
            acc += prob
            if r < acc:
                return cap
        return self.mixture[-1][1]


@dataclass
class ChurnParams:
    p_fail: float = 0.05
    t_fail: float = 10.0
    start: float = 0.0
    end: float = float("inf")

    def validate(self):
        if not (0.0 <= self.p_fail <= 1.0):
            raise ScenarioError("churn.p_fail must be within [0, 1]")
        if self.t_fail <= 0:
            raise ScenarioError("churn.t_fail must be positive")
        if self.end < self.start:
            raise ScenarioError("churn window end must not precede its start")


@dataclass
class DisruptiveEvent:
    fraction: float = 0.3
    at: float = 200.0

    def validate(self):
        if not (0.0 <= self.fraction <= 1.0):
            raise ScenarioError("disruption fraction must be within [0, 1]")
        if self.at < 0:
            raise ScenarioError("disruption time must be non-negative")


@dataclass
class WorkloadSpec:
    """Either an inline piecewise-constant trace or a trace file path."""

    trace_file: str = None
    points: list = None  # [[time_seconds, rate_per_second], ...]
    rate_scale: float = 1.0
    time_scale: float = 1.0

    def validate(self):
        if (self.trace_file is None) == (self.points is None):
            raise ScenarioError("workload needs exactly one of trace_file or points")
        if self.rate_scale <= 0 or self.time_scale <= 0:
            raise ScenarioError("workload scale factors must be positive")


@dataclass
class ScenarioConfig:
    name: str = "custom"
    duration: float = 300.0
    base_seed: int = 1
    initial_nodes: int = 10
    warmup: float = 30.0
    latency: float = 0.01
    boot_delay: float = 1.0
    providers: int = 1
    dns_entries: int = 30
    node_floor: int = 1
    node_ceiling: int = None
    workload: WorkloadSpec = field(default_factory=WorkloadSpec)
    capacity: CapacityDistribution = field(default_factory=CapacityDistribution)
    scaler: ScalerParams = field(default_factory=ScalerParams)
    admission: AdmissionPolicy = field(default_factory=AdmissionPolicy)
    overlay: OverlayParams = field(default_factory=OverlayParams)
    churn: ChurnParams = None
    disruptions: list = field(default_factory=list)

    def validate(self):
        if self.duration <= 0:
            raise ScenarioError("duration must be positive")
        if self.initial_nodes < 1:
            raise ScenarioError("initial_nodes must be at least 1")
        if self.warmup < 0 or self.warmup >= self.duration:
            raise ScenarioError("warmup must lie within [0, duration)")
        if self.latency < 0:
            raise ScenarioError("latency must be non-negative")
        if self.boot_delay < 0:
            raise ScenarioError("boot_delay must be non-negative")
        if self.providers < 1:
            raise ScenarioError("at least one provider is required")
        if self.dns_entries < 1:
            raise ScenarioError("dns_entries must be at least 1")
        if self.node_floor < 1:
            raise ScenarioError("node_floor must be at least 1")
        if self.node_ceiling is not None and self.node_ceiling < self.node_floor:
            raise ScenarioError("node_ceiling must be >= node_floor")
        self.workload.validate()
        self.capacity.validate()
        self.scaler.validate()
        self.admission.validate()
        self.overlay.validate()
        if self.churn is not None:
            self.churn.validate()
        for event in self.disruptions:
            event.validate()
        return self

    def to_dict(self):
        out = dataclasses.asdict(self)
        if out["churn"] is not None and out["churn"]["end"] == float("inf"):
            out["churn"]["end"] = "inf"
        return out


_NESTED = {
    "workload": WorkloadSpec,
    "capacity": CapacityDistribution,
    "scaler": ScalerParams,
    "admission": AdmissionPolicy,
    "overlay": OverlayParams,
    "churn": ChurnParams,
}


def _build(cls, data, context):
    if not isinstance(data, dict):
        raise ScenarioError("%s section must be a mapping" % context)
    known = {f.name for f in dataclasses.fields(cls)}
    unknown = set(data) - known
    if unknown:
        raise ScenarioError(
            "unknown key(s) in %s: %s" % (context, ", ".join(sorted(unknown)))
        )
    return cls(**data)


def from_dict(data):
    """Build a validated ScenarioConfig from a plain nested mapping."""
    if not isinstance(data, dict):
        raise ScenarioError("scenario config must be a mapping")
    data = dict(data)
    kwargs = {}
    for key, cls in _NESTED.items():
        if key in data:
            section = data.pop(key)
            if section is None:
                kwargs[key] = None
            else:
                if key == "churn" and section.get("end") == "inf":
                    section = dict(section, end=float("inf"))
                kwargs[key] = _build(cls, section, key)
    if "disruptions" in data:
        events = data.pop("disruptions") or []
        kwargs["disruptions"] = [
            _build(DisruptiveEvent, e, "disruptions") for e in events
        ]
    known = {f.name for f in dataclasses.fields(ScenarioConfig)}
    unknown = set(data) - known
    if unknown:
        raise ScenarioError("unknown key(s): %s" % ", ".join(sorted(unknown)))
    kwargs.update(data)
    return ScenarioConfig(**kwargs).validate()


def parse_config(path):
    """Load and validate a scenario from a YAML file."""
    with open(path) as fh:
        data = yaml.safe_load(fh)
    return from_dict(data)


def packaged_trace_path():
    """Filesystem path of the bundled synthetic reference trace."""
    return str(resources.files("depasim").joinpath("data/townhall_trace.txt"))


# Compression of the 48 h reference trace onto a 45 minute run.
TRACE_TIME_SCALE = 2700.0 / 172800.0

# Constant per-second request rate of the disaster-recovery experiments at
# desk scale; rate_scale=10 restores the published 7200 req/sec.
DISRUPTIVE_BASE_RATE = 720.0

PRESET_NAMES = (
    "reference",
    "homogeneous",
    "extreme-unbalanced",
    "churn-soft",
    "churn-heavy",
    "disruptive-soft",
    "disruptive-heavy",
)


def preset(name, rate_scale=1.0, base_seed=1):
    """Build one of the packaged experiment scenarios."""
    if name not in PRESET_NAMES:
        raise ScenarioError(
            "unknown preset %r (known: %s)" % (name, ", ".join(PRESET_NAMES))
        )
    traced = WorkloadSpec(
        trace_file=packaged_trace_path(),
        rate_scale=rate_scale,
        time_scale=TRACE_TIME_SCALE,
    )
    cfg = ScenarioConfig(name=name, duration=2700.0, base_seed=base_seed,
                         workload=traced)
    if name == "homogeneous":
        cfg.capacity = CapacityDistribution(mixture=[[1.0, 1.0]])
    elif name == "extreme-unbalanced":
        cfg.capacity = CapacityDistribution(mixture=[[0.5, 0.1], [0.5, 1.9]])
    elif name == "churn-soft":
        cfg.churn = ChurnParams(p_fail=0.05, t_fail=10.0, start=250.0, end=2250.0)
    elif name == "churn-heavy":
        cfg.churn = ChurnParams(p_fail=0.10, t_fail=10.0, start=250.0, end=2250.0)
    elif name.startswith("disruptive"):
        fraction = 0.3 if name.endswith("soft") else 0.6
        cfg.duration = 450.0
        cfg.workload = WorkloadSpec(
            points=[[0.0, DISRUPTIVE_BASE_RATE]], rate_scale=rate_scale
        )
        cfg.disruptions = [DisruptiveEvent(fraction=fraction, at=200.0)]
    return cfg.validate()
