"""Why a source-first table needs extra entries, and which ones.

Run: python3 demos/01_disambiguation.py
"""

# %% Two routes whose rectangles overlap
from ssroute import Address, Backend, NextHop, RouteKey, Route, RibState
from ssroute import is_ambiguous, is_weakly_complete, lookup_dest_first, lookup_source_first

W = 4
left = Route(RouteKey.parse("01/2 from /0", W, W), NextHop("A"))
right = Route(RouteKey.parse("/0 from 1/1", W, W), NextHop("B"))
a_d, a_s = Address.parse("0110", W), Address.parse("1010", W)

print("dest-first  :", lookup_dest_first([left, right], a_d, a_s))
print("source-first:", lookup_source_first([left, right], a_d, a_s))

# %% Neither key is more specific, so a pure specificity rule is stuck
keys = {left.key, right.key}
print("ambiguous:", is_ambiguous(keys), " weakly complete:", is_weakly_complete(keys))

# %% The engine installs the intersection with the dest-first winner's next hop
state = RibState(Backend.SOURCE_FIRST, record=True)
state.add_route(left)
state.add_route(right)
print("\n".join(state.log))
print(state.fib.dump())
print("source-first on FIB:", state.fib.lookup(a_d, a_s))

# %% Deleting the route undoes its zone entry
state.delete_route(right.key)
print("\n".join(state.log[-2:]))
