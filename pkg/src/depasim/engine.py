"""Deterministic discrete-event engine.

Single-threaded event loop over a binary heap, with a virtual clock in
continuous seconds, seeded per-entity random streams, and message delivery
with a constant configurable network latency. Events scheduled at the same
timestamp fire in insertion order, which makes a whole run reproducible from
(config, seed) alone.
"""

import hashlib
import heapq
import random


class SimError(Exception):
    pass


class ConfigError(SimError):
    """Invalid configuration value (e.g. negative delay)."""


class EventHandle:
    """Handle returned by schedule(); allows cancellation before firing."""

    __slots__ = ("fire_at", "seq", "fn", "cancelled")

    def __init__(self, fire_at, seq, fn):
        self.fire_at = fire_at
        self.seq = seq
        self.fn = fn
        self.cancelled = False

    def cancel(self):
        self.cancelled = True
        self.fn = None

    def __lt__(self, other):
        return (self.fire_at, self.seq) < (other.fire_at, other.seq)


class Engine:
    """Virtual clock + event heap + named random streams.

    Entities passed to send() must expose an ``alive`` attribute; delivery to
    a dead entity silently drops the message (optionally invoking ``on_drop``,
    which models the sender-side timeout).
    """

    def __init__(self, seed, latency=0.01):
        if latency < 0:
            raise ConfigError("network latency must be non-negative")
        self.seed = int(seed)
        self.latency = float(latency)
        self.now = 0.0
        self._heap = []
        self._seq = 0
        self._rngs = {}

    def rng(self, stream_id):
        """Return the random stream for an entity, creating it on first use.

        Streams are keyed by an arbitrary hashable id and seeded from a SHA-256
        digest of (seed, stream_id), so the same pair yields the same draw
        sequence on any platform and draws on one stream never perturb another.
        """
        r = self._rngs.get(stream_id)
        if r is None:
            digest = hashlib.sha256(
                ("%d/%r" % (self.seed, stream_id)).encode()
            ).digest()
            r = random.Random(int.from_bytes(digest[:8], "big"))
            self._rngs[stream_id] = r
        return r

    def drop_rng(self, stream_id):
        """Forget a stream once its entity is gone; long runs create and
        destroy entities by the thousand and the cache would only grow."""
        self._rngs.pop(stream_id, None)

    def schedule(self, delay, fn):
        """Enqueue ``fn`` to run at now + delay; returns a cancellable handle."""
        if delay < 0:
            raise ConfigError("cannot schedule an event in the past (delay=%r)" % delay)
        handle = EventHandle(self.now + delay, self._seq, fn)
        self._seq += 1
        heapq.heappush(self._heap, handle)
        return handle

    def send(self, dest, deliver, on_drop=None):
        """Deliver a message to ``dest`` after the network latency.

        ``deliver`` runs only if the destination is still alive at delivery
        time; otherwise the message is dropped and ``on_drop`` (if given) runs
        instead.
        """

        def _fire():
            if dest.alive:
                deliver()
            elif on_drop is not None:
                on_drop()

        return self.schedule(self.latency, _fire)

    def run_until(self, horizon):
        """Process every event with fire_at <= horizon; clock ends at horizon."""
        heap = self._heap
        while heap:
            ev = heap[0]
            if ev.fire_at > horizon:
                break
            heapq.heappop(heap)
            if ev.cancelled:
                continue
            self.now = ev.fire_at
            fn = ev.fn
            ev.fn = None
            fn()
        self.now = horizon
