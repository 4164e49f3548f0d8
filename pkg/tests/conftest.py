import pytest

from depasim import scenario
from depasim.analytics import MetricsCollector
from depasim.cloudenv import CloudEnv
from depasim.engine import Engine


def constant_rate_config(rate=20.0, duration=60.0, **overrides):
    """Small constant-rate scenario used by the component tests."""
    cfg = scenario.ScenarioConfig(
        name="test",
        duration=duration,
        warmup=0.0,
        workload=scenario.WorkloadSpec(points=[[0.0, rate]]),
        capacity=scenario.CapacityDistribution(mixture=[[1.0, 1.0]]),
    )
    for key, value in overrides.items():
        setattr(cfg, key, value)
    return cfg.validate()


class _StubClient:
    """Stands in for the workload client as the response sink."""

    alive = True


@pytest.fixture
def small_world():
    """A bootstrapped environment without tickers, requests fed by hand."""
    cfg = constant_rate_config()
    engine = Engine(1, latency=cfg.latency)
    metrics = MetricsCollector(cfg.duration)
    env = CloudEnv(engine, cfg, metrics)
    env.client = _StubClient()
    env.bootstrap()
    return engine, env, metrics, cfg
