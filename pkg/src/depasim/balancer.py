"""Node-level load balancing primitives.

Two mechanisms: admission control (accept / forward with a hop budget /
reject, driven by a soft and a hard queue limit) and capacity-weighted
dimension exchange (two nodes average their queues, weighting by capacity).
Queue expiry of over-age pending requests lives with the node, which owns
the queue; the timeout itself is part of the admission policy here.
"""

from dataclasses import dataclass

ACCEPT = "accept"
FORWARD = "forward"
REJECT = "reject"


@dataclass
class AdmissionPolicy:
    """Queue limits, counted over a node's whole occupancy.

    A soft limit of 1 makes any busy node hand arrivals to a random
    neighbor while the hop budget lasts, which is what keeps the response
    time near the single-service time; the hard limit is the queue cap.
    Each extra hop multiplies the chance of settling on a busy node by
    roughly the system load, so the budget trades tail latency against
    queue-expiry rejections at slow nodes.
    """

    soft_limit: int = 1
    hard_limit: int = 20
    forward_limit: int = 6
    max_pending: float = 4.0  # seconds a request may sit in a queue

    def validate(self):
        if not (0 < self.soft_limit <= self.hard_limit):
            raise ValueError(
                "queue limits must satisfy 0 < soft <= hard, got soft=%r hard=%r"
                % (self.soft_limit, self.hard_limit)
            )
        if self.forward_limit < 0:
            raise ValueError("forward limit must be non-negative")
        if self.max_pending <= 0:
            raise ValueError("max pending time must be positive")


def admit(queue_len, hops, policy):
    """Admission decision for a request arriving with ``hops`` forwards done.

    Accept below the soft limit, or below the hard limit once the hop budget
    is spent; forward while the budget lasts; reject otherwise.
    """
    if queue_len < policy.soft_limit:
        return ACCEPT
    if hops < policy.forward_limit:
        return FORWARD
    if queue_len < policy.hard_limit:
        return ACCEPT
    return REJECT


def exchange_amount(queue_a, queue_b, cap_a, cap_b):
    """Signed number of requests A should hand to B to equalize queue/capacity.

    Positive means A sends to B. Truncated toward zero (each side computes
    the same whole number of requests it would send), so the function is
    exactly antisymmetric and one application never increases
    |q_A/C_A - q_B/C_B|.
    """
    return int((queue_a * cap_b - queue_b * cap_a) / (cap_a + cap_b))
