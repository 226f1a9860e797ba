"""Source-specific (destination and source) routing.

The package covers prefix algebra, forwarding tables with destination-first
and source-first lookup backends, the disambiguation engine that keeps a
source-first FIB behaving destination-first, and a distance-vector
simulator used to study loops and blackholes.
"""

from .disambiguation import RibState, Route, conflict_solution, min_conflict, rebuild_from_scratch
from .dv import (
    INFINITY,
    LOCAL,
    Capability,
    ConvergenceTimeout,
    Delivered,
    Dropped,
    Loop,
    Network,
    Update,
)
from .fib import (
    AmbiguousLookup,
    Backend,
    Fib,
    FibContractError,
    FibEntry,
    NextHop,
    Origin,
    is_ambiguous,
    is_complete,
    is_weakly_complete,
    lookup_dest_first,
    lookup_source_first,
    lookup_specific,
)
from .prefix import (
    Address,
    InternalContractError,
    PairOrder,
    Prefix,
    RouteKey,
    WidthMismatch,
    conflict_zone,
    contains,
    dest_first_cmp,
    pair_conflicts,
    pair_le,
    prefix_disjoint,
    prefix_le,
    source_first_cmp,
)

__version__ = "0.1.0"
