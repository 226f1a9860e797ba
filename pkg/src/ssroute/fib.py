"""Forwarding tables, lookup backends and table-level predicates.

Two lookup backends are modelled:

``DEST_FIRST``
    the ideal behaviour: the matching entry that is minimal under the
    destination-first ordering wins.
``SOURCE_FIRST``
    what policy routing offers (``ip rule from SRC lookup TABLE`` followed by
    a longest-destination match inside the selected table, falling through to
    the next rule on a miss).  That is the same as taking the matching entry
    that is minimal under the source-first ordering, so the backend keeps a
    single entry set instead of materialising one table per source prefix.

The predicates (``is_ambiguous``, ``is_weakly_complete``, ``is_complete``)
enumerate address pairs.  They are oracles, not fast paths; past
``MAX_ENUMERATION_BITS`` they enumerate one representative address per
interval between prefix boundaries instead of every address.
"""

from __future__ import annotations

import bisect
import enum
import itertools
from dataclasses import dataclass

import numpy as np

from .prefix import (
    Address,
    PairOrder,
    RouteKey,
    conflict_zone,
    dest_first_cmp,
    pair_conflicts,
    pair_le,
    source_first_cmp,
)

# Brute-force predicates refuse universes larger than this many address pairs.
MAX_ENUMERATION_BITS = 20


class FibContractError(RuntimeError):
    """A FIB primitive was called in a state that violates its precondition."""


class AmbiguousLookup(LookupError):
    """The matching entries have no unique minimum."""


class Origin(enum.Enum):
    REAL = "real"
    DISAMBIGUATION = "disambiguation"


class Backend(enum.Enum):
    DEST_FIRST = "dest-first"
    SOURCE_FIRST = "source-first"


@dataclass(frozen=True, slots=True)
class NextHop:
    interface: str
    via: str | None = None

    @classmethod
    def parse(cls, text):
        """``eth0`` or ``fe80::1%eth0`` (neighbor address, then interface)."""
        via, sep, interface = text.rpartition("%")
        if not interface:
            raise ValueError(f"bad next hop {text!r}")
        return cls(interface, via if sep else None)

    def __str__(self):
        if self.via is None:
            return self.interface
        return f"{self.via}%{self.interface}"


@dataclass(frozen=True, slots=True)
class FibEntry:
    key: RouteKey
    nh: NextHop
    origin: Origin = Origin.REAL

    def __str__(self):
        line = f"{self.key} via {self.nh}"
        if self.origin is Origin.DISAMBIGUATION:
            line += " [disambiguation]"
        return line


class Fib:
    """Installed forwarding entries, mutated only through install/uninstall/switch.

    When ``record`` is true every primitive call is appended to ``log`` as a
    text line, which is what the scenario golden files compare against.
    """

    def __init__(self, backend=Backend.SOURCE_FIRST, record=False):
        self.backend = Backend(backend)
        self._entries = {}
        self.log = [] if record else None

    def __len__(self):
        return len(self._entries)

    def __contains__(self, key):
        return key in self._entries

    def __iter__(self):
        return iter(self.entries())

    def __eq__(self, other):
        if not isinstance(other, Fib):
            return NotImplemented
        return self._entries == other._entries

    def __repr__(self):
        return f"Fib({self.backend.value}, {len(self)} entries)"

    def get(self, key):
        return self._entries.get(key)

    def keys(self):
        return set(self._entries)

    def entries(self):
        """Entries sorted by (dest bits, dest plen, src bits, src plen)."""
        return sorted(self._entries.values(), key=lambda e: e.key.sort_key())

    def _record(self, line):
        if self.log is not None:
            self.log.append(line)

    def install(self, key, nh, origin=Origin.REAL):
        if key in self._entries:
            raise FibContractError(f"install: {key} is already installed")
        self._entries[key] = FibEntry(key, nh, Origin(origin))
        self._record(f"install {key} via {nh}")

    def uninstall(self, key, nh):
        entry = self._entries.get(key)
        if entry is None:
            raise FibContractError(f"uninstall: {key} is not installed")
        if entry.nh != nh:
            raise FibContractError(f"uninstall: {key} is installed via {entry.nh}, not {nh}")
        del self._entries[key]
        self._record(f"uninstall {key} via {nh}")

    def switch(self, key, nh_old, nh_new, origin=None):
        entry = self._entries.get(key)
        if entry is None:
            raise FibContractError(f"switch: {key} is not installed")
        if entry.nh != nh_old:
            raise FibContractError(f"switch: {key} is installed via {entry.nh}, not {nh_old}")
        self._entries[key] = FibEntry(key, nh_new, entry.origin if origin is None else Origin(origin))
        self._record(f"switch {key} {nh_old} -> {nh_new}")

    def lookup(self, a_d, a_s):
        if self.backend is Backend.DEST_FIRST:
            return lookup_dest_first(self._entries.values(), a_d, a_s)
        return lookup_source_first(self._entries.values(), a_d, a_s)

    def dump(self):
        return "".join(f"{entry}\n" for entry in self.entries())

    def snapshot(self):
        return dict(self._entries)


def _unique_min(matching, le):
    winners = [m for m in matching if all(le(m, x) for x in matching)]
    if len(winners) != 1:
        raise AmbiguousLookup(
            "no unique minimum among " + ", ".join(str(m.key) for m in matching)
        )
    return winners[0]


def _ordered_le(cmp):
    return lambda m, x: cmp(m.key, x.key) in (PairOrder.LESS, PairOrder.EQUAL)


def _lookup(entries, a_d, a_s, le):
    matching = [e for e in entries if e.key.matches(a_d, a_s)]
    if not matching:
        return None
    return _unique_min(matching, le).nh


def lookup_dest_first(entries, a_d, a_s):
    """Next hop of the destination-first minimal matching entry, or None.

    ``entries`` is any iterable of objects with ``key`` and ``nh`` attributes.
    """
    return _lookup(entries, a_d, a_s, _ordered_le(dest_first_cmp))


def lookup_source_first(entries, a_d, a_s):
    """Next hop of the source-first minimal matching entry, or None."""
    return _lookup(entries, a_d, a_s, _ordered_le(source_first_cmp))


def lookup_specific(entries, a_d, a_s):
    """Next hop of the most specific matching entry under pair specificity.

    Raises AmbiguousLookup when the matching entries have several
    most-specific elements, which is exactly the ambiguity a raw
    source-specific table can exhibit.
    """
    return _lookup(entries, a_d, a_s, lambda m, x: pair_le(m.key, x.key))


def lookup(entries, a_d, a_s, backend):
    if Backend(backend) is Backend.DEST_FIRST:
        return lookup_dest_first(entries, a_d, a_s)
    return lookup_source_first(entries, a_d, a_s)


# -- enumeration helpers ----------------------------------------------------------


def _key_widths(keys):
    widths = {(k.dest.width, k.src.width) for k in keys}
    if len(widths) > 1:
        raise ValueError(f"keys from several universes: {sorted(widths)}")
    return widths.pop() if widths else None


def _guard_enumeration(width_dest, width_src):
    if width_dest + width_src > MAX_ENUMERATION_BITS:
        raise ValueError(
            f"refusing to enumerate 2**{width_dest + width_src} address pairs"
        )


def _ranges(key):
    return (key.dest.first, key.dest.last, key.src.first, key.src.last)


def conflicting_pairs(keys):
    keys = list(keys)
    for r, q in itertools.combinations(keys, 2):
        if pair_conflicts(r, q):
            yield r, q


def conflict_zones(keys):
    """Set of conflict zones over all conflicting pairs of ``keys``."""
    return {conflict_zone(r, q) for r, q in conflicting_pairs(keys)}


def _sample_points(keys):
    """Address coordinates to enumerate: every address for small universes,
    otherwise one representative per elementary interval (still exact)."""
    width_dest, width_src = _key_widths(keys)
    if width_dest + width_src <= MAX_ENUMERATION_BITS:
        return range(1 << width_dest), range(1 << width_src)
    return boundary_points(keys)


def is_weakly_complete(keys):
    """True iff every conflict zone is covered by entries at least as specific."""
    keys = set(keys)
    if not keys:
        return True
    zones = conflict_zones(keys)
    dests, srcs = _sample_points(keys | zones)
    for zone in zones:
        cover = [_ranges(k) for k in keys if pair_le(k, zone)]
        z = _ranges(zone)
        for a_d in dests:
            if not z[0] <= a_d <= z[1]:
                continue
            for a_s in srcs:
                if not z[2] <= a_s <= z[3]:
                    continue
                if not any(d0 <= a_d <= d1 and s0 <= a_s <= s1 for d0, d1, s0, s1 in cover):
                    return False
    return True


def is_ambiguous(keys):
    """True iff some address pair has matching keys but no most specific one."""
    keys = sorted(set(keys), key=RouteKey.sort_key)
    if not keys:
        return False
    dests, srcs = _sample_points(keys)
    n = len(keys)
    le = [[pair_le(keys[i], keys[j]) for j in range(n)] for i in range(n)]
    ranges = [_ranges(k) for k in keys]
    for a_d in dests:
        dest_hits = [i for i in range(n) if ranges[i][0] <= a_d <= ranges[i][1]]
        if len(dest_hits) < 2:
            continue
        for a_s in srcs:
            hits = [i for i in dest_hits if ranges[i][2] <= a_s <= ranges[i][3]]
            if len(hits) > 1 and not any(all(le[m][x] for x in hits) for m in hits):
                return True
    return False


def is_complete(keys):
    """True iff the zone of every conflicting pair is itself a key."""
    keys = set(keys)
    return all(conflict_zone(r, q) in keys for r, q in conflicting_pairs(keys))


def address_pairs(width_dest, width_src):
    """Every (dest, src) address pair of a small universe, as Address objects."""
    _guard_enumeration(width_dest, width_src)
    dests = [Address(width_dest, b) for b in range(1 << width_dest)]
    srcs = [Address(width_src, b) for b in range(1 << width_src)]
    return itertools.product(dests, srcs)


def boundary_points(keys):
    """Representative dest and src addresses, one per elementary interval.

    Two addresses between consecutive prefix boundaries match exactly the same
    keys, so checking one address per interval is as good as checking all of
    them, at any width.
    """
    dests, srcs = {0}, {0}
    for k in keys:
        dests.update((k.dest.first, k.dest.last + 1))
        srcs.update((k.src.first, k.src.last + 1))
    width_dest, width_src = _key_widths(keys) or (0, 0)
    return (sorted(d for d in dests if d < 1 << width_dest),
            sorted(s for s in srcs if s < 1 << width_src))


def nexthop_grid(entries, backend, codebook, dest_points, src_points):
    """Forwarding decision at every (dest point, src point), as an integer array.

    Cell ``[i, j]`` holds ``codebook[nh]`` of the winning entry for
    ``(dest_points[i], src_points[j])``, or -1 when nothing matches.  The
    points must be sorted and include every entry's boundaries (see
    ``boundary_points``) or be the full address range.  Entries are painted
    from least to most preferred; matching entries always form a chain under
    either refinement and same-rank entries are disjoint, so painting in rank
    order reproduces the minimum.  Share ``codebook`` between calls so grids
    compare directly.
    """
    grid = np.full((len(dest_points), len(src_points)), -1, dtype=np.int32)
    if Backend(backend) is Backend.DEST_FIRST:
        rank = lambda e: (e.key.dest.plen, e.key.src.plen)
    else:
        rank = lambda e: (e.key.src.plen, e.key.dest.plen)
    for e in sorted(entries, key=rank):
        code = codebook.setdefault(e.nh, len(codebook))
        d0, d1, s0, s1 = _ranges(e.key)
        rows = slice(bisect.bisect_left(dest_points, d0), bisect.bisect_right(dest_points, d1))
        cols = slice(bisect.bisect_left(src_points, s0), bisect.bisect_right(src_points, s1))
        grid[rows, cols] = code
    return grid
