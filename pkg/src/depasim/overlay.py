"""Age-capped gossip peer sampling.

Each node keeps a fixed-size unidirectional view of neighbor entries. Views
are merged pairwise every protocol period; entries carry an age (protocol
rounds since last refresh) and anything older than the maximum age is pruned,
so references to dead nodes disappear on their own. Entries also piggyback
the last known capacity and load of the neighbor, which feed the scaling
decision.
"""

from dataclasses import dataclass


@dataclass
class ViewEntry:
    node_id: int
    capacity: float
    load: float
    age: int


class NeighborView:
    """Bounded set of neighbor entries with lazy age accounting.

    Ages are stored as refresh-round stamps relative to the owner's round
    counter, so aging the whole view per round is O(1).
    """

    def __init__(self, owner_id, degree=60, max_age=30, heal=15):
        if degree <= 0:
            raise ValueError("view degree must be positive")
        self.owner_id = owner_id
        self.degree = degree
        self.max_age = max_age
        self.heal = heal
        self._round = 0
        # node_id -> [refresh_round, capacity, load]
        self._entries = {}

    def __len__(self):
        return len(self._entries)

    def __contains__(self, node_id):
        return node_id in self._entries

    def ids(self):
        return list(self._entries)

    def entries(self):
        rnd = self._round
        return [
            ViewEntry(nid, e[1], e[2], rnd - e[0])
            for nid, e in self._entries.items()
        ]

    def hint_pairs(self):
        """(capacity, load) of every neighbor, for the scaling estimator."""
        return [(e[1], e[2]) for e in self._entries.values()]

    def age_of(self, node_id):
        return self._round - self._entries[node_id][0]

    def age_all(self):
        self._round += 1

    def insert(self, node_id, capacity, load, age=0):
        """Add or refresh an entry; keeps the fresher copy on duplicates."""
        if node_id == self.owner_id or age > self.max_age:
            return
        stamp = self._round - age
        cur = self._entries.get(node_id)
        if cur is None:
            if len(self._entries) >= self.degree:
                return
            self._entries[node_id] = [stamp, capacity, load]
        elif stamp >= cur[0]:
            cur[0] = stamp
            cur[1] = capacity
            cur[2] = load

    def discard(self, node_id):
        self._entries.pop(node_id, None)

    def prune_stale(self):
        cutoff = self._round - self.max_age
        stale = [nid for nid, e in self._entries.items() if e[0] < cutoff]
        for nid in stale:
            del self._entries[nid]

    def snapshot(self):
        """Current entries as portable (node_id, age, capacity, load) tuples."""
        rnd = self._round
        cutoff = rnd - self.max_age
        return [
            (nid, rnd - e[0], e[1], e[2])
            for nid, e in self._entries.items()
            if e[0] >= cutoff
        ]

    def merge(self, received, rng):
        """Merge a received snapshot into this view.

        Over-age entries on both sides are dropped, duplicates keep the
        fresher copy, self-references are removed, and if the union exceeds
        the degree the oldest entries are evicted first (up to the healer
        parameter), then uniformly random ones.
        """
        self.prune_stale()
        rnd = self._round
        entries = self._entries
        own = self.owner_id
        max_age = self.max_age
        for nid, age, cap, load in received:
            if nid == own or age > max_age:
                continue
            stamp = rnd - age
            cur = entries.get(nid)
            if cur is None:
                entries[nid] = [stamp, cap, load]
            elif stamp > cur[0]:
                cur[0] = stamp
                cur[1] = cap
                cur[2] = load
        overflow = len(entries) - self.degree
        if overflow > 0:
            # Oldest first; within an age cohort the choice is random, never
            # by id, or the same entries get starved out of every view in
            # the network.
            cohorts = {}
            for nid, e in entries.items():
                cohorts.setdefault(e[0], []).append(nid)
            need = min(self.heal, overflow)
            overflow -= need
            for stamp in sorted(cohorts):
                cohort = cohorts[stamp]
                if need >= len(cohort):
                    evicted = cohort
                else:
                    evicted = rng.sample(cohort, need)
                for nid in evicted:
                    del entries[nid]
                need -= len(evicted)
                if need == 0:
                    break
            if overflow > 0:
                for nid in rng.sample(list(entries), overflow):
                    del entries[nid]

    def oldest_peer(self, rng=None):
        """Neighbor with the maximal age (healer-style peer selection).

        Equal ages are common; a random tiebreak (when ``rng`` is given)
        avoids every node deterministically contacting the same peer.
        """
        if not self._entries:
            return None
        oldest_stamp = min(e[0] for e in self._entries.values())
        cohort = [nid for nid, e in self._entries.items() if e[0] == oldest_stamp]
        if rng is None or len(cohort) == 1:
            return cohort[0]
        return cohort[rng.randrange(len(cohort))]

    def random_neighbor(self, rng, exclude=()):
        """Uniform draw over entries not in ``exclude``; None if no candidate."""
        if not exclude:
            if not self._entries:
                return None
            ids = list(self._entries)
            return ids[rng.randrange(len(ids))]
        candidates = [nid for nid in self._entries if nid not in exclude]
        if not candidates:
            return None
        return candidates[rng.randrange(len(candidates))]


def exchange(initiator, init_info, partner, partner_info, rng_init, rng_partner):
    """Full-view gossip exchange between two live nodes.

    Each side sends its snapshot plus a fresh descriptor of itself (age 0 with
    its current capacity and load), and both apply the merge. ``*_info`` are
    (capacity, load) pairs.
    """
    snap_i = initiator.snapshot()
    snap_i.append((initiator.owner_id, 0, init_info[0], init_info[1]))
    snap_p = partner.snapshot()
    snap_p.append((partner.owner_id, 0, partner_info[0], partner_info[1]))
    partner.merge(snap_i, rng_partner)
    initiator.merge(snap_p, rng_init)
