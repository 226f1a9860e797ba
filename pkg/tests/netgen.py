"""Topology builders shared by the simulator tests and the acceptance suite."""

import numpy as np
from scipy.sparse.csgraph import dijkstra

from ssroute import Capability, Network, Prefix, RouteKey
from ssroute.check import random_prefix


def legacy_neighbor(capability, width=4, default_route=False):
    net = Network(width, width)
    net.add_node("A")
    net.add_node("B", capability)
    net.add_link("A", "B", 1)
    dp, sp = Prefix.parse("01/2", width), Prefix.parse("1/1", width)
    net.originate("A", RouteKey(dp, sp))
    if default_route:
        net.originate("A", RouteKey(Prefix.default(width), Prefix.default(width)))
    return net, dp, sp


def mixed_policy_line(policy_a, policy_b, width=4):
    """L - A - B - R with (d1, s1) originated at L and (d2, s2) at R, d1 < d2, s1 > s2."""
    net = Network(width, width)
    net.add_node("L")
    net.add_node("A", policy=policy_a)
    net.add_node("B", policy=policy_b)
    net.add_node("R")
    net.add_link("L", "A")
    net.add_link("A", "B")
    net.add_link("B", "R")
    left = RouteKey(Prefix.parse("01/2", width), Prefix.parse("1/1", width))
    right = RouteKey(Prefix.parse("0/1", width), Prefix.parse("11/2", width))
    net.originate("L", left)
    net.originate("R", right)
    return net, left, right


def gateway_stub(width=4):
    """Internet - A - N; A originates a source-specific default, N a plain route to itself."""
    net = Network(width, width)
    for name in "IAN":
        net.add_node(name)
    net.add_link("I", "A")
    net.add_link("A", "N")
    n, sp = Prefix.parse("01/2", width), Prefix.parse("1/1", width)
    net.originate("A", RouteKey(Prefix.default(width), sp))
    net.originate("N", RouteKey(n, Prefix.default(width)))
    return net, n, sp


def random_topology(rng, n_nodes, width=4, legacy_fraction=0.0, max_cost=4, n_origins=3):
    """Connected random graph: a random tree plus a few extra edges.

    Returns the network (not yet converged) and the cost matrix.
    """
    net = Network(width, width)
    names = [f"n{i}" for i in range(n_nodes)]
    caps = {}
    for name in names:
        cap = Capability.LEGACY_IGNORE if rng.random() < legacy_fraction else Capability.SPECIFIC
        caps[name] = cap
        net.add_node(name, cap)
    cost = np.zeros((n_nodes, n_nodes))
    def link(i, j):
        c = rng.randint(1, max_cost)
        net.add_link(names[i], names[j], c)
        cost[i, j] = cost[j, i] = c
    for i in range(1, n_nodes):
        link(i, rng.randrange(i))
    for _ in range(rng.randint(0, n_nodes)):
        i, j = rng.sample(range(n_nodes), 2)
        if not cost[i, j]:
            link(i, j)
    for _ in range(n_origins):
        name = rng.choice(names)
        src = random_prefix(rng, width) if caps[name] is Capability.SPECIFIC else Prefix.default(width)
        key = RouteKey(random_prefix(rng, width), src)
        if key not in net.nodes[name].originated:
            net.originate(name, key, rng.randint(0, 3))
    return net, names, cost


def shortest_paths(cost):
    return dijkstra(cost, directed=False)


def hop_diameter(cost):
    hops = dijkstra(cost, directed=False, unweighted=True)
    return int(hops.max())


def expected_metrics(net, names, cost):
    """Per node, the cheapest (distance + origin metric) over originators of each key."""
    dist = shortest_paths(cost)
    want = {name: {} for name in names}
    for j, origin in enumerate(names):
        for key, metric in net.nodes[origin].originated.items():
            for i, name in enumerate(names):
                m = int(dist[i, j]) + metric
                if m < want[name].get(key, float("inf")):
                    want[name][key] = m
    return want
