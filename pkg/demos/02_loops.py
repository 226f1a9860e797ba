"""Forwarding loops from mixed lookup orderings and from legacy routers.

Run: python3 demos/02_loops.py
"""

# %%
import itertools

from ssroute import Address, Backend, Capability, Loop, Network, RouteKey

W = 4


def key(text):
    return RouteKey.parse(text, W, W)


def count(net, nodes):
    tally = {}
    for d, s in itertools.product(range(16), repeat=2):
        for n in nodes:
            kind = type(net.trace_packet(n, Address(W, d), Address(W, s))).__name__
            tally[kind] = tally.get(kind, 0) + 1
    return tally


# %% A line L - A - B - R.  A looks up source first, B destination first.
def line(policy_a):
    net = Network(W, W)
    net.add_node("L")
    net.add_node("A", policy=policy_a)
    net.add_node("B")
    net.add_node("R")
    for a, b in ("LA", "AB", "BR"):
        net.add_link(a, b)
    net.originate("L", key("01/2 from 1/1"))
    net.originate("R", key("0/1 from 11/2"))
    net.run_to_convergence()
    return net


mixed = line(Backend.SOURCE_FIRST)
print(mixed.trace_packet("A", Address.parse("0100", W), Address.parse("1100", W)))
print("mixed  :", count(mixed, "AB"))
print("uniform:", count(line(Backend.DEST_FIRST), "AB"))

# %% A capable router next to a legacy one
for cap in (Capability.LEGACY_STRIP, Capability.LEGACY_IGNORE):
    net = Network(W, W)
    net.add_node("A")
    net.add_node("B", cap)
    net.add_link("A", "B")
    net.originate("A", key("01/2 from 1/1"))
    net.run_to_convergence()
    print(cap.value, count(net, "AB"))

# %% Announcing a default route from the capable side removes the blackholes
net.originate("A", key("/0"))
net.run_to_convergence()
print("backbone condition:", net.check_backbone_condition(), count(net, "AB"))
assert not any(isinstance(net.trace_packet("B", Address(W, d), Address(W, 0)), Loop) for d in range(16))
