import pytest

from depasim.engine import ConfigError, Engine


def test_clock_starts_at_zero_and_ends_at_horizon():
    engine = Engine(1)
    assert engine.now == 0.0
    engine.run_until(5.0)
    assert engine.now == 5.0


def test_events_fire_in_time_order():
    engine = Engine(1)
    fired = []
    engine.schedule(2.0, lambda: fired.append("b"))
    engine.schedule(1.0, lambda: fired.append("a"))
    engine.schedule(3.0, lambda: fired.append("c"))
    engine.run_until(10.0)
    assert fired == ["a", "b", "c"]


def test_same_timestamp_fires_in_insertion_order():
    engine = Engine(1)
    fired = []
    for tag in range(20):
        engine.schedule(1.0, lambda tag=tag: fired.append(tag))
    engine.run_until(2.0)
    assert fired == list(range(20))


def test_events_beyond_horizon_stay_queued():
    engine = Engine(1)
    fired = []
    engine.schedule(5.0, lambda: fired.append(1))
    engine.run_until(4.0)
    assert fired == []
    engine.run_until(6.0)
    assert fired == [1]


def test_negative_delay_rejected():
    engine = Engine(1)
    with pytest.raises(ConfigError):
        engine.schedule(-0.1, lambda: None)


def test_negative_latency_rejected():
    with pytest.raises(ConfigError):
        Engine(1, latency=-1.0)


def test_cancelled_event_does_not_fire():
    engine = Engine(1)
    fired = []
    handle = engine.schedule(1.0, lambda: fired.append(1))
    handle.cancel()
    engine.run_until(2.0)
    assert fired == []


def test_event_can_schedule_more_events():
    engine = Engine(1)
    fired = []

    def first():
        fired.append("first")
        engine.schedule(1.0, lambda: fired.append("second"))

    engine.schedule(1.0, first)
    engine.run_until(3.0)
    assert fired == ["first", "second"]


def test_rng_streams_are_deterministic_per_seed():
    a = Engine(7)
    b = Engine(7)
    assert [a.rng("x").random() for _ in range(5)] == [
        b.rng("x").random() for _ in range(5)
    ]


def test_rng_streams_are_independent():
    engine = Engine(7)
    pristine = Engine(7).rng("x")
    reference = [pristine.random() for _ in range(5)]
    # draining another stream must not perturb stream "x"
    other = engine.rng("y")
    for _ in range(100):
        other.random()
    assert [engine.rng("x").random() for _ in range(5)] == reference


def test_rng_distinct_streams_differ():
    engine = Engine(7)
    assert engine.rng("x").random() != engine.rng("y").random()


class _Dest:
    def __init__(self):
        self.alive = True
        self.received = []


def test_send_delivers_after_latency():
    engine = Engine(1, latency=0.25)
    dest = _Dest()
    times = []
    engine.send(dest, lambda: times.append(engine.now))
    engine.run_until(1.0)
    assert times == [0.25]


def test_send_to_dead_destination_invokes_on_drop():
    engine = Engine(1, latency=0.1)
    dest = _Dest()
    dropped = []
    engine.send(dest, lambda: dest.received.append(1),
                on_drop=lambda: dropped.append(1))
    dest.alive = False  # dies in transit
    engine.run_until(1.0)
    assert dest.received == []
    assert dropped == [1]
