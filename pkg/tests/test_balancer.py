import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from depasim.balancer import (
    ACCEPT,
    FORWARD,
    REJECT,
    AdmissionPolicy,
    admit,
    exchange_amount,
)

POLICY = AdmissionPolicy(soft_limit=10, hard_limit=20, forward_limit=3)


@pytest.mark.parametrize("queue_len,hops,expected", [
    (0, 0, ACCEPT),          # under the soft limit
    (9, 3, ACCEPT),
    (10, 0, FORWARD),        # at the soft limit with hop budget left
    (19, 2, FORWARD),
    (10, 3, ACCEPT),         # budget spent, room under the hard limit
    (19, 3, ACCEPT),
    (20, 3, REJECT),         # budget spent, queue full
    (25, 5, REJECT),
])
def test_admission_truth_table(queue_len, hops, expected):
    assert admit(queue_len, hops, POLICY) == expected


def test_policy_validation():
    AdmissionPolicy().validate()
    with pytest.raises(ValueError):
        AdmissionPolicy(soft_limit=0).validate()
    with pytest.raises(ValueError):
        AdmissionPolicy(soft_limit=5, hard_limit=4).validate()
    with pytest.raises(ValueError):
        AdmissionPolicy(forward_limit=-1).validate()
    with pytest.raises(ValueError):
        AdmissionPolicy(max_pending=0).validate()


def test_exchange_balanced_pair_moves_nothing():
    assert exchange_amount(5, 5, 1.0, 1.0) == 0
    assert exchange_amount(10, 5, 2.0, 1.0) == 0


def test_exchange_direction():
    assert exchange_amount(10, 0, 1.0, 1.0) == 5
    assert exchange_amount(0, 10, 1.0, 1.0) == -5


def test_exchange_weights_by_capacity():
    # equal queue ratios after the move: 12 vs 0 with caps 1:3
    assert exchange_amount(12, 0, 1.0, 3.0) == 9


queues = st.integers(min_value=0, max_value=200)
caps = st.floats(min_value=0.05, max_value=5.0)


@settings(max_examples=300, deadline=None)
@given(qa=queues, qb=queues, ca=caps, cb=caps)
def test_exchange_invariants(qa, qb, ca, cb):
    n = exchange_amount(qa, qb, ca, cb)
    # the sender always has enough requests to cover the transfer
    assert -qb <= n <= qa
    # conservation: a transfer never creates or destroys requests
    qa2, qb2 = qa - n, qb + n
    assert qa2 + qb2 == qa + qb
    assert qa2 >= 0 and qb2 >= 0
    # non-worsening: the capacity-relative imbalance never grows
    before = abs(qa / ca - qb / cb)
    after = abs(qa2 / ca - qb2 / cb)
    assert after <= before + 1e-9


@settings(max_examples=300, deadline=None)
@given(qa=queues, qb=queues, ca=caps, cb=caps)
def test_exchange_antisymmetry(qa, qb, ca, cb):
    forward = exchange_amount(qa, qb, ca, cb)
    backward = exchange_amount(qb, qa, cb, ca)
    assert forward == -backward
