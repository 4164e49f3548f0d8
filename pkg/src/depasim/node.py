"""The autonomic service: queue, processor, and its management loops.

A node is a single server whose exponential service rate equals its capacity,
fronted by a FIFO queue under admission control. The management side wires
the gossip view maintenance, the pairwise queue balancing, and the
probabilistic scaling loop; all of it runs inside the shared event loop and a
node's state is only ever mutated by its own events.
"""

from collections import deque

from . import balancer
from .autoscaler import (
    LoadWindow,
    analyze_addition,
    analyze_removal,
    compute_ratio,
    neighborhood_load,
)
from .overlay import NeighborView, exchange

IN_FLIGHT = "in-flight"
QUEUED = "queued"
PROCESSING = "processing"
PROCESSED = "processed"
REJECTED = "rejected"
LOST = "lost"


class Request:
    """A client job, tracked from issue to its single terminal state."""

    __slots__ = ("id", "issue_time", "enqueue_time", "hops", "visited", "state")

    def __init__(self, req_id, issue_time, first_node):
        self.id = req_id
        self.issue_time = issue_time
        self.enqueue_time = None
        self.hops = 0
        self.visited = {first_node}
        self.state = IN_FLIGHT


class Node:
    def __init__(self, node_id, capacity, engine, env, metrics,
                 admission, scaler, overlay_params):
        if capacity <= 0:
            raise ValueError("node capacity must be positive")
        self.id = node_id
        self.capacity = capacity
        self.engine = engine
        self.env = env
        self.metrics = metrics
        self.admission = admission
        self.scaler = scaler
        self.view = NeighborView(
            node_id,
            degree=overlay_params.degree,
            max_age=overlay_params.max_age,
            heal=overlay_params.heal,
        )
        self.rng = engine.rng(("node", node_id))
        self.queue = deque()
        self.in_service = None
        self.loadwin = LoadWindow(scaler.window)
        self.alive = True
        self.removing = False
        self.registered = False
        # A fresh node holds off scaling decisions until its monitoring
        # window has real history; acting earlier on inherited hints (or an
        # underfilled window) causes provisioning runaway or flapping.
        self.decision_ready_at = engine.now + scaler.window
        # After requesting replicas, wait for them to boot before requesting
        # more, otherwise every tick re-orders the same missing capacity.
        self.add_blocked_until = 0.0

    # -- request path ------------------------------------------------------

    def measured_load(self, now):
        return self.loadwin.load(now, self.capacity)

    def occupancy(self):
        """Requests held by this node, the one in service included; the
        queue limits of the admission policy apply to this number."""
        return len(self.queue) + (0 if self.in_service is None else 1)

    def on_request(self, req):
        now = self.engine.now
        if self.removing:
            # A draining node no longer accepts work; push it along if it can.
            self._forward(req, allow_accept=False)
            return
        decision = balancer.admit(self.occupancy(), req.hops, self.admission)
        if decision == balancer.ACCEPT:
            self._enqueue(req, now)
        elif decision == balancer.FORWARD:
            self._forward(req, allow_accept=True)
        else:
            self._reject(req)

    def _forward(self, req, allow_accept):
        target_id = self.view.random_neighbor(self.rng, exclude=req.visited)
        if target_id is None or req.hops >= self.admission.forward_limit:
            # Hop budget exhausted (or nowhere to go): accept/reject rule.
            if allow_accept and self.occupancy() < self.admission.hard_limit:
                self._enqueue(req, self.engine.now)
            else:
                self._reject(req)
            return
        req.hops += 1
        req.visited.add(target_id)
        target = self.env.lookup(target_id)
        self.engine.send(
            target,
            lambda: target.on_request(req),
            on_drop=lambda: self._forward_failed(req, allow_accept),
        )

    def _forward_failed(self, req, allow_accept):
        # The target died in transit; the sender times out and tries another
        # neighbor. The burned hop is not refunded, so this terminates.
        if self.alive and self.view is not None:
            self._forward(req, allow_accept)
        else:
            self._reject(req)

    def _enqueue(self, req, now):
        # The arrival counts toward the load of the node that admits the
        # request; counting every forwarding hop would inflate the measured
        # system load by the forwarding rate and skew the scaler's target.
        self.loadwin.record(now)
        req.enqueue_time = now
        req.state = QUEUED
        self.queue.append(req)
        if self.in_service is None:
            self._start_service()

    def _reject(self, req):
        req.state = REJECTED
        self.metrics.record_rejected(self.engine.now)

    def expire_pending(self, now):
        """Reject every queued request pending longer than the SLA maximum."""
        limit = self.admission.max_pending
        if not self.queue:
            return 0
        expired = 0
        kept = deque()
        for req in self.queue:
            if now - req.enqueue_time > limit:
                self._reject(req)
                expired += 1
            else:
                kept.append(req)
        if expired:
            self.queue = kept
        return expired

    def _start_service(self):
        now = self.engine.now
        self.expire_pending(now)
        if self.in_service is not None or not self.queue:
            return
        req = self.queue.popleft()
        req.state = PROCESSING
        self.metrics.record_pending(now, now - req.enqueue_time)
        self.in_service = req
        duration = self.rng.expovariate(self.capacity)
        self.engine.schedule(duration, lambda: self._complete(req))

    def _complete(self, req):
        if not self.alive or self.in_service is not req:
            return  # node failed mid-service; already accounted as lost
        self.in_service = None
        req.state = PROCESSED
        env = self.env
        self.engine.send(env.client, lambda: env.record_response(req))
        if self.removing:
            if not self.queue:
                env.deprovision(self)
            else:
                self._start_service()
        else:
            self._start_service()

    # -- management loops --------------------------------------------------

    def overlay_tick(self, now):
        """One protocol period: gossip exchange, queue expiry, balancing."""
        view = self.view
        view.age_all()
        while True:
            peer_id = view.oldest_peer(self.rng)
            if peer_id is None:
                break
            if view.age_of(peer_id) > view.max_age:
                # expired while unreachable; drop it and pick the next oldest
                view.discard(peer_id)
                continue
            peer = self.env.get_live(peer_id)
            if peer is not None and not peer.removing:
                exchange(
                    view, (self.capacity, self.measured_load(now)),
                    peer.view, (peer.capacity, peer.measured_load(now)),
                    self.rng, peer.rng,
                )
            # dead peer under the age cap: entry keeps aging, retried later
            break
        self.expire_pending(now)
        self.balance_step(now)

    def balance_step(self, now):
        """Dimension exchange with one uniformly random live neighbor."""
        partner_id = self.view.random_neighbor(self.rng)
        if partner_id is None:
            return
        partner = self.env.get_live(partner_id)
        if partner is None or partner.removing:
            return
        n = balancer.exchange_amount(
            len(self.queue), len(partner.queue), self.capacity, partner.capacity
        )
        if n > 0:
            self._transfer_to(partner, n)
        elif n < 0:
            partner._transfer_to(self, -n)
        # balancing contacts refresh load/capacity hints on both sides
        self.view.insert(partner.id, partner.capacity, partner.measured_load(now))
        partner.view.insert(self.id, self.capacity, self.measured_load(now))

    def _transfer_to(self, other, n):
        # Oldest-first; moved requests keep their enqueue timestamps so the
        # pending-time clock is not reset by the transfer.
        queue = self.queue
        n = min(n, len(queue))
        for _ in range(n):
            other.queue.append(queue.popleft())
        if n and other.in_service is None:
            other._start_service()

    def depas_tick(self, now):
        """One scaling period: estimate neighborhood load, act on the ratio."""
        if self.removing or now < self.decision_ready_at:
            return
        estimate = neighborhood_load(
            self.capacity, self.measured_load(now), self.view.hint_pairs()
        )
        params = self.scaler
        if estimate < params.load_min:
            ratio = compute_ratio(estimate, params.load_des)
            if analyze_removal(ratio, self.rng):
                self.self_remove()
        elif estimate > params.load_max and now >= self.add_blocked_until:
            count = analyze_addition(compute_ratio(estimate, params.load_des), self.rng)
            if count:
                self.replicate(count)
                # Wait until the replicas have booted and a full monitoring
                # window reflects them; re-adding on the same stale view
                # compounds into a large overshoot on steep ramps.
                self.add_blocked_until = (
                    now + self.env.config.boot_delay + params.window
                )

    def replicate(self, n):
        for _ in range(n):
            self.env.provision(creator=self)

    # -- lifecycle ---------------------------------------------------------

    def self_remove(self):
        """Graceful removal: deregister, drain the queue, then deprovision.

        Queued requests are pushed to one random live neighbor (up to its hard
        limit); anything that cannot be placed is rejected, never lost. The
        in-service request always completes first.
        """
        if not self.env.allow_removal():
            return
        self.env.dns.deregister(self.id)
        self.removing = True
        if self.queue:
            neighbor = None
            nb_id = self.view.random_neighbor(self.rng)
            if nb_id is not None:
                candidate = self.env.get_live(nb_id)
                if candidate is not None and not candidate.removing:
                    neighbor = candidate
            if neighbor is not None:
                room = self.admission.hard_limit - neighbor.occupancy()
                if room > 0:
                    self._transfer_to(neighbor, room)
            for req in self.queue:
                self._reject(req)
            self.queue.clear()
        if self.in_service is None:
            self.env.deprovision(self)

    def release(self):
        """Drop the heavyweight state of a dead node.

        Stale references only ever check ``alive`` and ``id``; the view, the
        monitoring window, and the random stream would otherwise accumulate
        for every node that ever existed during a long run.
        """
        self.view = None
        self.loadwin = None
        self.queue = deque()
        self.in_service = None
        self.rng = None
        self.engine.drop_rng(("node", self.id))

    def fail(self):
        """Abrupt failure: queue and in-service request are lost, no drain.

        The kill is observable to the registry, so the entry is withdrawn at
        once; otherwise a dead entry black-holes its round-robin share of all
        client traffic until the next registration sweep happens to purge it.
        """
        self.env.dns.deregister(self.id)
        lost = len(self.queue)
        for req in self.queue:
            req.state = LOST
        self.queue.clear()
        if self.in_service is not None:
            self.in_service.state = LOST
            self.in_service = None
            lost += 1
        if lost:
            self.metrics.record_lost(self.engine.now, lost)
        self.env.deprovision(self)
        return lost
