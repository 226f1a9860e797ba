"""Deterministic simulator of source-specific distance-vector routing.

Nodes exchange ``(dest, src, metric)`` updates over weighted links, select
the cheapest route per key, and push their selections through the
disambiguation engine into a FIB.  Delivery is round based: every round
drains each directed link's FIFO queue (links visited in sorted order, or in
a seeded shuffled order), then every node re-runs route selection and
advertises whatever changed.

This is plain Bellman-Ford with additive metrics saturating at INFINITY.
Babel's feasibility condition and sequence numbers are not modelled.

Interoperability with routers that do not understand source-specific updates
is controlled per node:

``SPECIFIC``
    understands both update kinds; a non-specific update means source ``/0``,
    and a route with source ``/0`` is always sent non-specific.
``LEGACY_IGNORE``
    drops source-specific updates (safe, may blackhole).
``LEGACY_STRIP``
    drops the source prefix and keeps the update (can loop forever).
"""

from __future__ import annotations

import enum
import random
from collections import deque
from dataclasses import dataclass

from .disambiguation import RibState, Route
from .fib import Backend, NextHop, lookup_source_first
from .prefix import Prefix, RouteKey

INFINITY = 65535
LOCAL = NextHop("local")


class Capability(enum.Enum):
    SPECIFIC = "capable"
    LEGACY_IGNORE = "legacy-ignore"
    LEGACY_STRIP = "legacy-strip"


class ConvergenceTimeout(RuntimeError):
    def __init__(self, rounds):
        super().__init__(f"no convergence after {rounds} rounds")
        self.rounds = rounds


@dataclass(frozen=True, slots=True)
class Update:
    dest: Prefix
    src: Prefix | None
    metric: int

    def __str__(self):
        if self.src is None:
            return f"update {self.dest} metric {self.metric}"
        return f"update {self.dest} from {self.src} metric {self.metric}"


@dataclass(frozen=True)
class Delivered:
    path: tuple

    def __str__(self):
        return "DELIVERED " + " ".join(self.path)


@dataclass(frozen=True)
class Dropped:
    path: tuple
    reason: str = "no route"

    @property
    def node(self):
        return self.path[-1]

    def __str__(self):
        return f"DROPPED {self.node} ({self.reason})"


@dataclass(frozen=True)
class Loop:
    path: tuple
    cycle: tuple

    def __str__(self):
        return "LOOP " + " ".join(self.cycle)


class Node:
    def __init__(self, name, capability=Capability.SPECIFIC, policy=Backend.DEST_FIRST,
                 width_dest=128, width_src=128):
        if name == LOCAL.interface:
            raise ValueError(f"{name!r} is reserved")
        self.name = name
        self.capability = Capability(capability)
        # Forwarding only: DEST_FIRST forwards through the disambiguated FIB,
        # SOURCE_FIRST models a router with a native source-first table and
        # no disambiguation.
        self.policy = Backend(policy)
        self.width_dest = width_dest
        self.width_src = width_src
        self.rib = RibState(Backend.SOURCE_FIRST)
        # (neighbor, wire dest, wire src) -> (interpreted key, metric incl. link cost)
        self.learned = {}
        self.originated = {}
        # key -> (metric, neighbor name or None for local)
        self.selected = {}

    def __repr__(self):
        return f"Node({self.name}, {self.capability.value}, {self.policy.value})"

    @property
    def default_src(self):
        return Prefix.default(self.width_src)

    def originate(self, key, metric=0):
        if (key.dest.width, key.src.width) != (self.width_dest, self.width_src):
            raise ValueError(f"{key} does not belong to the network universe")
        if key.is_specific and self.capability is not Capability.SPECIFIC:
            raise ValueError(f"{self.name} cannot originate source-specific {key}")
        self.originated[key] = min(metric, INFINITY)

    def interpret(self, u):
        """The key this node stores an update under, or None to discard it."""
        if u.src is None:
            return RouteKey(u.dest, self.default_src)
        if self.capability is Capability.SPECIFIC:
            return RouteKey(u.dest, u.src)
        if self.capability is Capability.LEGACY_IGNORE:
            return None
        return RouteKey(u.dest, self.default_src)

    def process_update(self, neighbor, u, cost):
        """Record an update received over a link of ``cost``; True if anything changed."""
        key = self.interpret(u)
        if key is None:
            return False
        slot = (neighbor, u.dest, u.src)
        metric = min(u.metric + cost, INFINITY)
        old = self.learned.get(slot)
        if metric >= INFINITY:
            return self.learned.pop(slot, None) is not None
        self.learned[slot] = (key, metric)
        return old != (key, metric)

    def selection(self):
        best = {}
        for key, metric in self.originated.items():
            if metric < INFINITY:
                best[key] = min(best.get(key, (INFINITY, 2, "")), (metric, 0, ""))
        for (neighbor, _, _), (key, metric) in self.learned.items():
            best[key] = min(best.get(key, (INFINITY, 2, "")), (metric, 1, neighbor))
        return {
            key: (metric, neighbor if origin else None)
            for key, (metric, origin, neighbor) in best.items()
        }

    def reselect(self):
        """Re-run route selection, sync the RIB, and return the keys whose selection changed."""
        new = self.selection()
        changed = sorted(
            (k for k in set(new) | set(self.selected) if new.get(k) != self.selected.get(k)),
            key=RouteKey.sort_key,
        )
        for key in changed:
            old_nh = self._nexthop(self.selected.get(key))
            new_nh = self._nexthop(new.get(key))
            if new_nh is None:
                self.rib.delete_route(key)
            elif old_nh is None:
                self.rib.add_route(Route(key, new_nh))
            elif old_nh != new_nh:
                self.rib.change_route(key, new_nh)
        self.selected = new
        return changed

    @staticmethod
    def _nexthop(choice):
        if choice is None:
            return None
        return LOCAL if choice[1] is None else NextHop(choice[1])

    def advertise(self, keys=None):
        """Updates announcing ``keys`` (default: every selected route); lost routes go out at INFINITY."""
        if keys is None:
            keys = sorted(self.selected, key=RouteKey.sort_key)
        updates = []
        for key in keys:
            metric = self.selected.get(key, (INFINITY, None))[0]
            if key.is_specific and self.capability is Capability.SPECIFIC:
                updates.append(Update(key.dest, key.src, metric))
            elif not key.is_specific:
                updates.append(Update(key.dest, None, metric))
        for u in updates:
            assert u.src is None or u.src.plen != 0, "specific update with a zero-length source"
        return updates

    def lookup(self, a_d, a_s):
        if self.policy is Backend.DEST_FIRST:
            return self.rib.lookup(a_d, a_s)
        return lookup_source_first(self.rib.routes.values(), a_d, a_s)

    def table(self):
        """Selected routes as text lines, sorted by key."""
        lines = []
        for key in sorted(self.selected, key=RouteKey.sort_key):
            metric, neighbor = self.selected[key]
            lines.append(f"{key} metric {metric} via {neighbor or 'local'}")
        return lines


class Network:
    def __init__(self, width_dest=128, width_src=128, shuffle_seed=None):
        self.width_dest = width_dest
        self.width_src = width_src
        self.nodes = {}
        self.adjacency = {}
        self.queues = {}
        self.rounds = 0
        self._rng = random.Random(shuffle_seed) if shuffle_seed is not None else None

    def add_node(self, name, capability=Capability.SPECIFIC, policy=Backend.DEST_FIRST):
        if name in self.nodes:
            raise ValueError(f"duplicate node {name!r}")
        node = Node(name, capability, policy, self.width_dest, self.width_src)
        self.nodes[name] = node
        self.adjacency[name] = {}
        return node

    def add_link(self, a, b, cost=1):
        if a == b or a not in self.nodes or b not in self.nodes:
            raise ValueError(f"bad link {a!r} - {b!r}")
        if cost < 1:
            raise ValueError("link cost must be a positive integer")
        self.adjacency[a][b] = cost
        self.adjacency[b][a] = cost
        self.queues.setdefault((a, b), deque())
        self.queues.setdefault((b, a), deque())
        # A new neighbor needs to hear the existing tables.
        self._send(a, self.nodes[a].advertise(), only=b)
        self._send(b, self.nodes[b].advertise(), only=a)

    def links(self):
        return sorted((a, b, c) for a, nbrs in self.adjacency.items() for b, c in nbrs.items() if a < b)

    def _send(self, name, updates, only=None):
        for neighbor in sorted(self.adjacency[name]):
            if only is None or neighbor == only:
                self.queues[(name, neighbor)].extend(updates)

    def originate(self, name, key, metric=0):
        node = self.nodes[name]
        node.originate(key, metric)
        self._send(name, node.advertise(node.reselect()))

    def withdraw(self, name, key):
        """Stop originating ``key`` at ``name``."""
        node = self.nodes[name]
        node.originated.pop(key, None)
        self._send(name, node.advertise(node.reselect()))

    def process_update(self, name, sender, u):
        return self.nodes[name].process_update(sender, u, self.adjacency[name][sender])

    def advertise(self, name):
        """``(neighbor, update)`` pairs for a full dump of ``name``'s table."""
        updates = self.nodes[name].advertise()
        return [(nbr, u) for nbr in sorted(self.adjacency[name]) for u in updates]

    def step(self):
        """Deliver everything queued, reselect, enqueue changes.  True if any state changed."""
        order = sorted(self.queues)
        if self._rng is not None:
            self._rng.shuffle(order)
        batches = []
        for link in order:
            batch = list(self.queues[link])
            self.queues[link].clear()
            if batch:
                batches.append((link, batch))
        changed = False
        for (sender, receiver), batch in batches:
            for u in batch:
                changed |= self.process_update(receiver, sender, u)
        for name in sorted(self.nodes):
            node = self.nodes[name]
            keys = node.reselect()
            if keys:
                changed = True
                self._send(name, node.advertise(keys))
        if changed:
            self.rounds += 1
        return changed

    def run_to_convergence(self, max_rounds=1000):
        """Step until nothing changes; returns the number of rounds that changed state."""
        used = 0
        while self.step():
            used += 1
            if used > max_rounds:
                raise ConvergenceTimeout(max_rounds)
        return used

    def trace_packet(self, start, a_d, a_s, ttl=64):
        if ttl < 1:
            raise ValueError("ttl must be at least 1")
        path = [start]
        while True:
            nh = self.nodes[path[-1]].lookup(a_d, a_s)
            if nh is None:
                return Dropped(tuple(path))
            if nh == LOCAL:
                return Delivered(tuple(path))
            nxt = nh.interface
            if nxt in path:
                return Loop(tuple(path + [nxt]), tuple(path[path.index(nxt):]))
            if len(path) >= ttl:
                return Dropped(tuple(path), "ttl exceeded")
            path.append(nxt)

    def check_backbone_condition(self):
        """Blackhole-avoidance condition for mixed networks.

        Capable nodes must form a connected subgraph that holds every
        originator of a source-specific route; when legacy nodes are present,
        some capable node must also originate the non-specific default route.
        """
        capable = {n for n, node in self.nodes.items() if node.capability is Capability.SPECIFIC}
        for name, node in self.nodes.items():
            if any(k.is_specific for k in node.originated) and name not in capable:
                return False
        if capable:
            start = min(capable)
            seen = {start}
            todo = [start]
            while todo:
                for nbr in self.adjacency[todo.pop()]:
                    if nbr in capable and nbr not in seen:
                        seen.add(nbr)
                        todo.append(nbr)
            if seen != capable:
                return False
        if len(capable) == len(self.nodes):
            return True
        default = RouteKey(Prefix.default(self.width_dest), Prefix.default(self.width_src))
        return any(default in self.nodes[n].originated for n in capable)
