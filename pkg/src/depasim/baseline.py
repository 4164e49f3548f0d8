"""Simulated centralized baseline: a plain M/M/m cluster behind a perfect router.

No scaling, no admission control, no overlay: one shared FIFO queue feeding m
identical exponential servers. Used to validate the event engine and the
analytic M/M/m response-time formula against each other.
"""

from collections import deque

from .engine import Engine


def simulate_mmm(m, lam, mu, n_requests, seed=1, warmup=None):
    """Mean response time over ``n_requests`` completions (after a warmup).

    ``warmup`` completions are discarded first (default: 5% of n_requests) so
    the empty-system start does not bias the estimate.
    """
    if warmup is None:
        warmup = n_requests // 20
    engine = Engine(seed, latency=0.0)
    arrivals = engine.rng("arrivals")
    service = engine.rng("service")

    queue = deque()
    state = {"busy": 0, "issued": 0, "done": 0, "resp_sum": 0.0, "resp_n": 0}
    total = n_requests + warmup

    def complete(t_arrived):
        state["done"] += 1
        if state["done"] > warmup:
            state["resp_sum"] += engine.now - t_arrived
            state["resp_n"] += 1
        if queue:
            start_service(queue.popleft())
        else:
            state["busy"] -= 1

    def start_service(t_arrived):
        engine.schedule(service.expovariate(mu), lambda: complete(t_arrived))

    def arrive():
        state["issued"] += 1
        if state["busy"] < m:
            state["busy"] += 1
            start_service(engine.now)
        else:
            queue.append(engine.now)
        if state["issued"] < total:
            engine.schedule(arrivals.expovariate(lam), arrive)

    engine.schedule(arrivals.expovariate(lam), arrive)
    engine.run_until(float("inf"))
    return state["resp_sum"] / state["resp_n"]
