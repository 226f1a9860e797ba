"""Line-based scenario files for FIB runs and network simulations.

FIB scenario::

    widths 4 4
    add 00/2 from /0 via A
    change 00/2 from /0 via E
    delete 00/2 from /0
    lookup 0010 1000
    expect lookup 0010 1000 A        # or: none
    expect size 6
    check                            # run the oracle properties now
    dump                             # also: dump flat, dump ip

Topology scenario::

    widths 4 4
    node A capable dest-first
    node B legacy-strip
    link A B 1
    originate A 01/2 from 1/1 metric 0
    trace A 0100 0000
    expect A 0100 0000 loop          # delivered | dropped | loop

``#`` starts a comment.  A key without ``from`` has a zero-length source.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .check import verify_state
from .disambiguation import RibState, Route
from .dv import Capability, ConvergenceTimeout, Delivered, Dropped, Loop, Network
from .fib import Backend, NextHop, Origin
from .prefix import Address, RouteKey

RULE_PRIORITY_BASE = 100
TABLE_ID_BASE = 10


class ScenarioError(ValueError):
    def __init__(self, lineno, message):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


@dataclass
class Command:
    lineno: int
    name: str
    args: tuple = ()


@dataclass
class Scenario:
    width_dest: int
    width_src: int
    commands: list = field(default_factory=list)


def _lines(text):
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield lineno, line.split()


def _parse_widths(lineno, words):
    try:
        widths = [int(w) for w in words]
    except ValueError:
        raise ScenarioError(lineno, "widths takes one or two integers") from None
    if len(widths) == 1:
        widths *= 2
    if len(widths) != 2 or not all(1 <= w <= 128 for w in widths):
        raise ScenarioError(lineno, "widths takes one or two integers in 1..128")
    return widths


def _parse_key(lineno, words, sc):
    try:
        return RouteKey.parse(" ".join(words), sc.width_dest, sc.width_src)
    except ValueError as exc:
        raise ScenarioError(lineno, str(exc)) from None


def _parse_addresses(lineno, words, sc):
    if len(words) != 2:
        raise ScenarioError(lineno, "expected a destination and a source address")
    try:
        return Address.parse(words[0], sc.width_dest), Address.parse(words[1], sc.width_src)
    except ValueError as exc:
        raise ScenarioError(lineno, str(exc)) from None


def _split_via(lineno, words):
    if "via" not in words or words.index("via") != len(words) - 2:
        raise ScenarioError(lineno, "expected '<key> via <nexthop>'")
    return words[:-2], NextHop.parse(words[-1])


def _header(text, width_dest, width_src):
    sc = Scenario(width_dest, width_src)
    started = False
    for lineno, words in _lines(text):
        if words[0] == "widths":
            if started:
                raise ScenarioError(lineno, "widths must come before other commands")
            sc.width_dest, sc.width_src = _parse_widths(lineno, words[1:])
        else:
            started = True
            yield lineno, words, sc
    yield None, None, sc


def parse_fib_scenario(text, width_dest=128, width_src=128):
    sc = None
    for lineno, words, sc in _header(text, width_dest, width_src):
        if lineno is None:
            break
        cmd, rest = words[0], words[1:]
        if cmd in ("add", "change"):
            key_words, nh = _split_via(lineno, rest)
            sc.commands.append(Command(lineno, cmd, (_parse_key(lineno, key_words, sc), nh)))
        elif cmd == "delete":
            sc.commands.append(Command(lineno, cmd, (_parse_key(lineno, rest, sc),)))
        elif cmd == "lookup":
            sc.commands.append(Command(lineno, cmd, _parse_addresses(lineno, rest, sc)))
        elif cmd == "dump":
            if rest not in ([], ["flat"], ["ip"]):
                raise ScenarioError(lineno, "dump takes no argument, 'flat' or 'ip'")
            sc.commands.append(Command(lineno, cmd, tuple(rest)))
        elif cmd == "check":
            sc.commands.append(Command(lineno, cmd))
        elif cmd == "expect" and rest[:1] == ["size"] and len(rest) == 2 and rest[1].isdigit():
            sc.commands.append(Command(lineno, "expect-size", (int(rest[1]),)))
        elif cmd == "expect" and rest[:1] == ["lookup"] and len(rest) == 4:
            a_d, a_s = _parse_addresses(lineno, rest[1:3], sc)
            want = None if rest[3] == "none" else NextHop.parse(rest[3])
            sc.commands.append(Command(lineno, "expect-lookup", (a_d, a_s, want)))
        else:
            raise ScenarioError(lineno, f"unknown command {' '.join(words)!r}")
    return sc


def _nh_ip(nh):
    if nh.via is None:
        return f"dev {nh.interface}"
    return f"via {nh.via} dev {nh.interface}"


def _dest_ip(prefix):
    if prefix.plen == 0:
        return "default"
    if prefix.plen == prefix.width and prefix.width in (32, 128):
        return str(prefix).rsplit("/", 1)[0]
    return str(prefix)


def render_ip_view(fib):
    """Render the FIB the way ``ip rule`` / ``ip route`` would show it.

    Non-specific entries go to ``main``; every other source prefix gets its
    own table, reached through a rule ordered most specific source first.
    """
    main = []
    tables = {}
    for entry in fib.entries():
        if entry.key.src.plen == 0:
            main.append(entry)
        else:
            tables.setdefault(entry.key.src, []).append(entry)
    sources = sorted(tables, key=lambda p: (-p.plen, p.bits))
    out = ["# ip rule show", "0:\tfrom all lookup local"]
    for i, src in enumerate(sources, 1):
        out.append(f"{RULE_PRIORITY_BASE + i}:\tfrom {src} lookup {TABLE_ID_BASE + i}")
    out += ["32766:\tfrom all lookup main", "32767:\tfrom all lookup default", "# ip route show"]
    out += _table_lines(main)
    for i, src in enumerate(sources, 1):
        out.append(f"# ip route show table {TABLE_ID_BASE + i}")
        out += _table_lines(tables[src])
    return "\n".join(out) + "\n"


def _table_lines(entries):
    entries = sorted(entries, key=lambda e: (e.key.dest.plen, e.key.dest.bits))
    return [f"{_dest_ip(e.key.dest)} {_nh_ip(e.nh)} proto ssrt" for e in entries]


def run_fib_scenario(sc, backend=Backend.SOURCE_FIRST, engine=RibState):
    """Execute a parsed FIB scenario; returns ``(exit_code, output_text)``."""
    state = engine(Backend(backend), record=True)
    out = []

    def fail(cmd, message):
        out.append(f"FAIL line {cmd.lineno}: {message}")
        return 1, "\n".join(out) + "\n"

    for cmd in sc.commands:
        if cmd.name in ("add", "change", "delete"):
            key = cmd.args[0]
            out.append(f"{cmd.name} {key}" + (f" via {cmd.args[1]}" if len(cmd.args) > 1 else ""))
            start = len(state.log)
            try:
                if cmd.name == "add":
                    state.add_route(Route(key, cmd.args[1]))
                elif cmd.name == "change":
                    state.change_route(key, cmd.args[1])
                else:
                    state.delete_route(key)
            except (KeyError, ValueError) as exc:
                raise ScenarioError(cmd.lineno, str(exc).strip("'\"")) from None
            except RuntimeError as exc:
                return fail(cmd, f"{type(exc).__name__}: {exc}")
            out += [f"  {line}" for line in state.log[start:]]
        elif cmd.name == "dump":
            mode = cmd.args[0] if cmd.args else None
            ip_width = sc.width_dest == sc.width_src and sc.width_dest in (32, 128)
            if mode == "ip" or (mode is None and ip_width):
                out.append(render_ip_view(state.fib).rstrip("\n"))
            else:
                out += [str(e) for e in state.fib.entries()]
        elif cmd.name == "lookup":
            nh = state.lookup(*cmd.args)
            out.append(f"lookup {cmd.args[0]} {cmd.args[1]} -> {nh if nh else 'none'}")
        elif cmd.name == "expect-size":
            if len(state.fib) != cmd.args[0]:
                return fail(cmd, f"expected {cmd.args[0]} FIB entries, found {len(state.fib)}")
        elif cmd.name == "expect-lookup":
            a_d, a_s, want = cmd.args
            got = state.lookup(a_d, a_s)
            if got != want:
                return fail(cmd, f"lookup {a_d} {a_s}: expected {want or 'none'}, got {got or 'none'}")
        elif cmd.name == "check":
            message = verify_state(state)
            if message is not None:
                return fail(cmd, f"check failed: {message}")
    return 0, "\n".join(out) + ("\n" if out else "")


# -- topologies ---------------------------------------------------------------------

_CAPABILITIES = {c.value: c for c in Capability}
_POLICIES = {b.value: b for b in Backend}
_OUTCOMES = {"delivered": Delivered, "dropped": Dropped, "loop": Loop}


def parse_topology(text, width_dest=128, width_src=128):
    sc = None
    names = set()
    for lineno, words, sc in _header(text, width_dest, width_src):
        if lineno is None:
            break
        cmd, rest = words[0], words[1:]
        if cmd == "node":
            if not rest or len(rest) > 3:
                raise ScenarioError(lineno, "node <name> [capability] [policy]")
            capability, policy = Capability.SPECIFIC, Backend.DEST_FIRST
            for word in rest[1:]:
                if word in _CAPABILITIES:
                    capability = _CAPABILITIES[word]
                elif word in _POLICIES:
                    policy = _POLICIES[word]
                else:
                    raise ScenarioError(lineno, f"unknown node attribute {word!r}")
            if rest[0] in names:
                raise ScenarioError(lineno, f"duplicate node {rest[0]!r}")
            names.add(rest[0])
            sc.commands.append(Command(lineno, cmd, (rest[0], capability, policy)))
        elif cmd == "link":
            if len(rest) != 3 or not rest[2].isdigit() or int(rest[2]) < 1:
                raise ScenarioError(lineno, "link <a> <b> <positive cost>")
            _known(lineno, names, rest[:2])
            sc.commands.append(Command(lineno, cmd, (rest[0], rest[1], int(rest[2]))))
        elif cmd == "originate":
            if len(rest) < 4 or rest[-2] != "metric" or not rest[-1].isdigit():
                raise ScenarioError(lineno, "originate <node> <dest> [from <src>] metric <m>")
            _known(lineno, names, rest[:1])
            key = _parse_key(lineno, rest[1:-2], sc)
            sc.commands.append(Command(lineno, cmd, (rest[0], key, int(rest[-1]))))
        elif cmd == "trace":
            if len(rest) != 3:
                raise ScenarioError(lineno, "trace <node> <dst-addr> <src-addr>")
            _known(lineno, names, rest[:1])
            sc.commands.append(Command(lineno, cmd, (rest[0], *_parse_addresses(lineno, rest[1:], sc))))
        elif cmd == "expect":
            if len(rest) != 4 or rest[3] not in _OUTCOMES:
                raise ScenarioError(lineno, "expect <node> <dst-addr> <src-addr> delivered|dropped|loop")
            _known(lineno, names, rest[:1])
            a_d, a_s = _parse_addresses(lineno, rest[1:3], sc)
            sc.commands.append(Command(lineno, cmd, (rest[0], a_d, a_s, rest[3])))
        else:
            raise ScenarioError(lineno, f"unknown command {' '.join(words)!r}")
    return sc


def _known(lineno, names, given):
    for name in given:
        if name not in names:
            raise ScenarioError(lineno, f"unknown node {name!r}")


def build_network(sc, shuffle_seed=None):
    """Build the network and apply originations; traces and expectations are left out."""
    net = Network(sc.width_dest, sc.width_src, shuffle_seed=shuffle_seed)
    for cmd in sc.commands:
        try:
            if cmd.name == "node":
                net.add_node(*cmd.args)
            elif cmd.name == "link":
                net.add_link(*cmd.args)
            elif cmd.name == "originate":
                net.originate(*cmd.args)
        except ValueError as exc:
            raise ScenarioError(cmd.lineno, str(exc)) from None
    return net


def run_topology(sc, max_rounds=1000, shuffle_seed=None):
    """Converge the network, then run traces; returns ``(exit_code, output_text)``."""
    net = build_network(sc, shuffle_seed)
    code = 0
    out = []
    try:
        rounds = net.run_to_convergence(max_rounds)
        out.append(f"converged in {rounds} rounds")
    except ConvergenceTimeout as exc:
        out.append(f"TIMEOUT: {exc}")
        code = 1
    for name in sorted(net.nodes):
        node = net.nodes[name]
        out.append(f"node {name} {node.capability.value} {node.policy.value}")
        out += [f"  {line}" for line in node.table()]
        disamb = sum(e.origin is Origin.DISAMBIGUATION for e in node.rib.fib.entries())
        if disamb:
            out.append(f"  disambiguation entries: {disamb}")
    for cmd in sc.commands:
        if cmd.name == "trace":
            start, a_d, a_s = cmd.args
            result = net.trace_packet(start, a_d, a_s)
            out.append(f"trace {start} {a_d} {a_s}")
            out += [f"  {a} -> {b}" for a, b in zip(result.path, result.path[1:])]
            out.append(f"  {result}")
        elif cmd.name == "expect":
            start, a_d, a_s, outcome = cmd.args
            result = net.trace_packet(start, a_d, a_s)
            if not isinstance(result, _OUTCOMES[outcome]):
                out.append(f"FAIL line {cmd.lineno}: expected {outcome}, got {result}")
                code = 1
    return code, "\n".join(out) + "\n"
