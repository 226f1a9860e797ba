"""Rendering a disambiguated FIB as ip rules and per-source tables.

A host with a default route, a local /20 and two /32 peers, plus a VPN that
wants every packet sourced from 192.168.4.0/24.  Run: python3 demos/03_ip_rules.py
"""

# %%
from ssroute import Backend, NextHop, RibState, Route, RouteKey
from ssroute.scenario import render_ip_view

routes = [
    ("0.0.0.0/0", "172.23.47.254%eth1"),
    ("172.23.32.0/20", "eth1"),
    ("192.168.4.20/32", "192.168.4.20%tun-ariane"),
    ("192.168.4.30/32", "192.168.4.30%wlan1"),
]
state = RibState(Backend.SOURCE_FIRST, record=True)
for dest, nh in routes:
    state.add_route(Route(RouteKey.parse(dest, 32), NextHop.parse(nh)))

# %% The VPN route is source specific
state.add_route(Route(RouteKey.parse("0.0.0.0/0 from 192.168.4.0/24", 32), NextHop.parse("192.168.4.20%tun-ariane")))
print("\n".join(state.log[len(routes):]))

# %% Table 11 repeats the more specific destinations so they still win
print(render_ip_view(state.fib))
