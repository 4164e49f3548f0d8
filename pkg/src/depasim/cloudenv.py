"""The federation environment around the nodes.

Owns provisioning (provider choice, capacity sampling, boot latency), the
round-robin DNS registry clients resolve against, the periodic management
tickers, and the two fault injectors: continuous churn and one-shot
disruptive kills. Also enforces the global node floor/ceiling.
"""

from .node import Node


class DnsRegistry:
    """Bounded list of registered node ids served round-robin.

    Removals and observed kills deregister immediately; as a backstop, a
    registration attempt that finds the registry full purges whatever dead
    entries remain. A client that still resolves a node dying in that instant
    loses the request to the delivery timeout.
    """

    def __init__(self, max_entries=30):
        self.max_entries = max_entries
        self.entries = []
        self.cursor = 0

    def __len__(self):
        return len(self.entries)

    def register(self, node_id, is_alive=None):
        if node_id in self.entries:
            return True
        if len(self.entries) >= self.max_entries and is_alive is not None:
            self.entries = [e for e in self.entries if is_alive(e)]
        if len(self.entries) >= self.max_entries:
            return False
        self.entries.append(node_id)
        return True

    def deregister(self, node_id):
        try:
            idx = self.entries.index(node_id)
        except ValueError:
            return
        del self.entries[idx]
        if idx < self.cursor:
            self.cursor -= 1

    def resolve(self):
        if not self.entries:
            return None
        if self.cursor >= len(self.entries):
            self.cursor = 0
        node_id = self.entries[self.cursor]
        self.cursor += 1
        return node_id


class CloudEnv:
    """Singleton per run: node directory, providers, DNS, fault injection."""

    def __init__(self, engine, config, metrics):
        self.engine = engine
        self.config = config
        self.metrics = metrics
        self.dns = DnsRegistry(config.dns_entries)
        self.nodes = {}        # live nodes only, id -> Node (insertion = id order)
        self.all_nodes = {}    # every node ever booted, for stale references
        self.client = None
        self.booting = 0
        self.refused_provisions = 0
        self._next_id = 0

    # -- directory ---------------------------------------------------------

    def live_count(self):
        return len(self.nodes)

    def live_nodes(self):
        return list(self.nodes.values())

    def get_live(self, node_id):
        return self.nodes.get(node_id)

    def lookup(self, node_id):
        return self.all_nodes[node_id]

    def is_alive(self, node_id):
        return node_id in self.nodes

    def record_response(self, req):
        now = self.engine.now
        self.metrics.record_processed(now, now - req.issue_time)

    # -- provisioning ------------------------------------------------------

    def _new_node(self, capacity):
        node_id = self._next_id
        self._next_id += 1
        cfg = self.config
        node = Node(node_id, capacity, self.engine, self, self.metrics,
                    cfg.admission, cfg.scaler, cfg.overlay)
        self.nodes[node_id] = node
        self.all_nodes[node_id] = node
        return node

    def bootstrap(self):
        """Deploy the initial nodes at t=0 with fully meshed views."""
        rng = self.engine.rng("capacity")
        cfg = self.config
        initial = [self._new_node(cfg.capacity.sample(rng))
                   for _ in range(cfg.initial_nodes)]
        for node in initial:
            for other in initial:
                if other is not node:
                    node.view.insert(other.id, other.capacity, 0.0)
            node.registered = self.dns.register(node.id, self.is_alive)

    def provision(self, creator=None):
        """Request one new node: random provider, sampled capacity, boot delay.

        Returns False when the configured ceiling refuses the request.
        """
        cfg = self.config
        if (cfg.node_ceiling is not None
                and self.live_count() + self.booting >= cfg.node_ceiling):
            self.refused_provisions += 1
            return False
        # provider choice is uniform; it only matters for placement statistics
        provider = self.engine.rng("provider").randrange(cfg.providers)
        capacity = cfg.capacity.sample(self.engine.rng("capacity"))
        if creator is not None:
            boot_view = creator.view.snapshot()
            boot_view.append(
                (creator.id, 0, creator.capacity,
                 creator.measured_load(self.engine.now))
            )
        else:
            boot_view = []
        self.booting += 1
        self.engine.schedule(
            cfg.boot_delay, lambda: self._boot(capacity, provider, boot_view)
        )
        return True

    def _boot(self, capacity, provider, boot_view):
        self.booting -= 1
        node = self._new_node(capacity)
        node.provider = provider
        for nid, age, cap, load in boot_view:
            if self.is_alive(nid):
                node.view.insert(nid, cap, load, age)
        node.registered = self.dns.register(node.id, self.is_alive)

    def allow_removal(self):
        return self.live_count() > self.config.node_floor

    def deprovision(self, node):
        node.alive = False
        node.removing = True
        self.nodes.pop(node.id, None)
        node.release()

    # -- management tickers ------------------------------------------------

    def start(self):
        """Schedule the recurring overlay/balancer and scaler tickers."""
        self.engine.schedule(self.config.overlay.period, self._overlay_ticker)
        self.engine.schedule(self.config.scaler.period, self._scaler_ticker)
        if self.config.churn is not None:
            churn = self.config.churn
            first = max(churn.start, 0.0) + churn.t_fail
            self.engine.schedule(first - self.engine.now, self._churn_tick)
        for event in self.config.disruptions:
            frac = event.fraction
            self.engine.schedule(event.at, lambda f=frac: self.disruptive_event(f))

    def _overlay_ticker(self):
        now = self.engine.now
        for node in self.live_nodes():
            if node.alive and not node.removing:
                node.overlay_tick(now)
        self.engine.schedule(self.config.overlay.period, self._overlay_ticker)

    def _scaler_ticker(self):
        now = self.engine.now
        for node in self.live_nodes():
            if node.alive and not node.removing:
                node.depas_tick(now)
        self.engine.schedule(self.config.scaler.period, self._scaler_ticker)

    # -- fault injection ---------------------------------------------------

    def _churn_tick(self):
        churn = self.config.churn
        now = self.engine.now
        if now > churn.end:
            return
        self.churn_tick(churn.p_fail)
        self.engine.schedule(churn.t_fail, self._churn_tick)

    def churn_tick(self, p_fail):
        """Fail each live node independently with probability p_fail."""
        rng = self.engine.rng("churn")
        failed = [node for node in self.live_nodes() if rng.random() < p_fail]
        for node in failed:
            if node.alive:
                node.fail()
        return failed

    def disruptive_event(self, fraction):
        """Instantly kill round(fraction * live) nodes, sampled w/o replacement."""
        count = round(fraction * self.live_count())
        if count <= 0:
            return []
        rng = self.engine.rng("disruption")
        victims = rng.sample(list(self.nodes), count)
        killed = []
        for node_id in victims:
            node = self.nodes.get(node_id)
            if node is not None and node.alive:
                node.fail()
                killed.append(node)
        return killed
