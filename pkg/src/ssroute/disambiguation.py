"""Keep a source-first FIB behaving like a destination-first table.

``RibState`` holds the real routes (the RIB) and the installed FIB.  Every
public operation leaves the FIB strongly complete: for each pair of
conflicting real routes the FIB holds exactly one entry whose key is their
conflict zone, carrying the next hop of the destination-first winner.  A
complete table is unambiguous, so any backend that refines pair specificity
(in particular a source-first one) forwards exactly like the ideal
destination-first lookup over the real routes.

Entries are always installed most specific first and removed least specific
first, so the live table never becomes ambiguous between two primitives.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .fib import Backend, Fib, Origin
from .prefix import (
    RouteKey,
    conflict_zone,
    dest_first_cmp,
    dest_first_lt,
    order_min,
    pair_conflicts,
    pair_le,
    pair_meet,
)


@dataclass(frozen=True, slots=True)
class Route:
    key: RouteKey
    nh: object

    def __str__(self):
        return f"{self.key} via {self.nh}"


def _min_route(routes):
    return order_min(routes, dest_first_cmp, key=lambda r: r.key)


def _earlier(r, q):
    return r if dest_first_lt(r.key, q.key) else q


def min_conflict(zone, r, routes):
    """Destination-first minimum of the routes conflicting with ``r`` inside ``zone``."""
    return _min_route(
        r1 for r1 in routes if pair_conflicts(r.key, r1.key) and pair_meet(r.key, r1.key) == zone
    )


def conflict_solution(zone, routes):
    """The route whose next hop the entry for ``zone`` should carry, if any conflict has that zone."""
    return _min_route(
        r1
        for r1, r2 in itertools.permutations(routes, 2)
        if pair_conflicts(r1.key, r2.key)
        and pair_meet(r1.key, r2.key) == zone
        and dest_first_lt(r1.key, r2.key)
    )


def _zone_rank(zone):
    return (zone.dest.plen + zone.src.plen, zone.sort_key())


def relevant_conflicts(r, routes, most_specific_first=True):
    """One ``(zone, representative)`` per conflict zone of ``r`` not already a real key.

    The representative is the destination-first minimum of the routes that
    conflict with ``r`` for that zone.
    """
    routes = list(routes)
    real_keys = {q.key for q in routes}
    classes = {}
    for r1 in routes:
        if not pair_conflicts(r.key, r1.key):
            continue
        zone = conflict_zone(r.key, r1.key)
        if zone not in real_keys:
            classes.setdefault(zone, []).append(r1)
    out = [(zone, _min_route(members)) for zone, members in classes.items()]
    # Any order extending pair specificity works; the lexicographic tie-break
    # only pins the order between independent zones.
    if most_specific_first:
        out.sort(key=lambda item: (-_zone_rank(item[0])[0], _zone_rank(item[0])[1]))
    else:
        out.sort(key=lambda item: _zone_rank(item[0]))
    return out


class RibState:
    """Real routes plus the FIB derived from them by the disambiguation algorithm."""

    def __init__(self, backend=Backend.SOURCE_FIRST, record=False):
        self.routes = {}
        self.fib = Fib(backend, record=record)

    def __len__(self):
        return len(self.routes)

    def __contains__(self, key):
        return key in self.routes

    def __repr__(self):
        return f"RibState({len(self.routes)} routes, {len(self.fib)} FIB entries)"

    @property
    def log(self):
        return self.fib.log

    def lookup(self, a_d, a_s):
        return self.fib.lookup(a_d, a_s)

    def _route(self, item):
        key = item.key if isinstance(item, Route) else item
        try:
            route = self.routes[key]
        except KeyError:
            raise KeyError(f"no route for {key}") from None
        if isinstance(item, Route) and item.nh != route.nh:
            raise KeyError(f"route {key} is via {route.nh}, not {item.nh}")
        return route

    def add_route(self, r):
        if r.key in self.routes:
            raise ValueError(f"a route for {r.key} already exists; use change_route")
        table = list(self.routes.values())
        for zone, r1 in relevant_conflicts(r, table, most_specific_first=True):
            r2 = min_conflict(zone, r1, table)
            if r2 is None:
                self.fib.install(zone, _earlier(r, r1).nh, Origin.DISAMBIGUATION)
            elif dest_first_lt(r.key, r2.key) and dest_first_lt(r.key, r1.key):
                self.fib.switch(zone, r2.nh, r.nh)
        r1 = conflict_solution(r.key, table)
        if r1 is None:
            self.fib.install(r.key, r.nh, Origin.REAL)
        else:
            self.fib.switch(r.key, r1.nh, r.nh, origin=Origin.REAL)
        self.routes[r.key] = r

    def delete_route(self, item):
        """Remove a route, given as a Route or its RouteKey."""
        r = self._route(item)
        del self.routes[r.key]
        table = list(self.routes.values())
        r1 = conflict_solution(r.key, table)
        if r1 is None:
            self.fib.uninstall(r.key, r.nh)
        else:
            self.fib.switch(r.key, r.nh, r1.nh, origin=Origin.DISAMBIGUATION)
        for zone, r1 in relevant_conflicts(r, table, most_specific_first=False):
            r2 = min_conflict(zone, r1, table)
            if r2 is None:
                self.fib.uninstall(zone, _earlier(r, r1).nh)
            elif dest_first_lt(r.key, r2.key) and dest_first_lt(r.key, r1.key):
                self.fib.switch(zone, r.nh, r2.nh)

    def change_route(self, item, nh_new):
        """Point an existing route at ``nh_new``; the key stays the same."""
        r = self._route(item)
        if nh_new == r.nh:
            return
        table = list(self.routes.values())
        self.fib.switch(r.key, r.nh, nh_new)
        for zone, r1 in relevant_conflicts(r, table):
            if dest_first_lt(r.key, r1.key) and min_conflict(zone, r1, table) == r:
                self.fib.switch(zone, r.nh, nh_new)
        self.routes[r.key] = Route(r.key, nh_new)


def rebuild_from_scratch(routes, backend=Backend.SOURCE_FIRST):
    """Build the complete FIB for ``routes`` directly, without incremental steps.

    Each conflict zone that is not a real key gets the next hop of the
    destination-first minimum among the real routes covering the whole zone;
    those routes all contain the zone, so they form a chain.
    """
    routes = list(routes)
    fib = Fib(backend)
    keys = set()
    for r in routes:
        if r.key in keys:
            raise ValueError(f"duplicate route key {r.key}")
        keys.add(r.key)
        fib.install(r.key, r.nh, Origin.REAL)
    zones = {conflict_zone(r.key, q.key) for r, q in itertools.combinations(routes, 2)
             if pair_conflicts(r.key, q.key)}
    for zone in sorted(zones - keys, key=RouteKey.sort_key):
        winner = _min_route(r for r in routes if pair_le(zone, r.key))
        fib.install(zone, winner.nh, Origin.DISAMBIGUATION)
    return fib
