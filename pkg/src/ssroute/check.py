"""Randomised oracle harness for the disambiguation engine.

Random add/delete/change sequences are replayed against an engine and, after
every operation, the state is checked against four properties:

* the FIB key set is strongly complete;
* source-first lookup on the FIB equals destination-first lookup over the
  real routes, for every address pair;
* the FIB equals ``rebuild_from_scratch`` of the real routes;
* the FIB keys have exactly the conflict zones of the real keys.

Failing sequences are shrunk by greedy removal and rendered as a scenario
file that ``ssroute fib`` replays to the same failure.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

import numpy as np

from .disambiguation import RibState, Route, rebuild_from_scratch
from .fib import (
    Backend,
    FibContractError,
    NextHop,
    boundary_points,
    conflict_zones,
    is_complete,
    nexthop_grid,
)
from .prefix import Address, InternalContractError, Prefix, RouteKey

NEXTHOPS = tuple(NextHop(name) for name in "ABCDEFGH")


@dataclass(frozen=True)
class Op:
    kind: str  # "add" | "delete" | "change"
    key: RouteKey
    nh: NextHop | None = None

    def __str__(self):
        if self.kind == "delete":
            return f"delete {self.key}"
        return f"{self.kind} {self.key} via {self.nh}"


def verify_state(state):
    """Return the first violated property as a message, or None."""
    routes = list(state.routes.values())
    fib_keys = state.fib.keys()
    if not is_complete(fib_keys):
        return "FIB is not complete"
    if fib_keys:
        dests, srcs = boundary_points(fib_keys)
        codebook = {}
        got = nexthop_grid(state.fib.entries(), Backend.SOURCE_FIRST, codebook, dests, srcs)
        want = nexthop_grid(routes, Backend.DEST_FIRST, codebook, dests, srcs)
        if not np.array_equal(got, want):
            i, j = (int(x) for x in np.argwhere(got != want)[0])
            key = next(iter(fib_keys))
            a_d, a_s = Address(key.dest.width, dests[i]), Address(key.src.width, srcs[j])
            return f"lookup mismatch at dest {a_d} src {a_s}"
    if state.fib != rebuild_from_scratch(routes):
        return "FIB differs from rebuild_from_scratch"
    if conflict_zones(fib_keys) != conflict_zones(r.key for r in routes):
        return "FIB keys introduce new conflict zones"
    return None


def apply_op(state, op):
    if op.kind == "add":
        state.add_route(Route(op.key, op.nh))
    elif op.kind == "delete":
        state.delete_route(op.key)
    elif op.kind == "change":
        state.change_route(op.key, op.nh)
    else:
        raise ValueError(f"unknown operation {op.kind!r}")


def replay(ops, engine=RibState):
    """Run ``ops`` and check after each; returns ``(index, message)`` or None."""
    state = engine(Backend.SOURCE_FIRST)
    for i, op in enumerate(ops):
        try:
            apply_op(state, op)
        except (FibContractError, InternalContractError) as exc:
            return i, f"{type(exc).__name__}: {exc}"
        message = verify_state(state)
        if message is not None:
            return i, message
    return None


def random_prefix(rng, width):
    plen = rng.randint(0, width)
    bits = rng.getrandbits(plen) << (width - plen) if plen else 0
    return Prefix(width, plen, bits)


def random_operations(rng, width_dest, width_src, max_routes, n_ops):
    """A valid random operation sequence (deletes and changes only touch live routes)."""
    live = {}
    ops = []
    for _ in range(n_ops):
        roll = rng.random()
        if live and (roll < 0.3 or len(live) >= max_routes):
            key = rng.choice(sorted(live, key=RouteKey.sort_key))
            if rng.random() < 0.5:
                ops.append(Op("delete", key))
                del live[key]
            else:
                nh = rng.choice(NEXTHOPS)
                ops.append(Op("change", key, nh))
                live[key] = nh
            continue
        key = RouteKey(random_prefix(rng, width_dest), random_prefix(rng, width_src))
        if key in live:
            continue
        nh = rng.choice(NEXTHOPS)
        ops.append(Op("add", key, nh))
        live[key] = nh
    return ops


def is_valid(ops):
    live = set()
    for op in ops:
        if op.kind == "add":
            if op.key in live:
                return False
            live.add(op.key)
        elif op.key not in live:
            return False
        elif op.kind == "delete":
            live.discard(op.key)
    return True


def shrink(ops, engine=RibState):
    """Greedily drop operations while the sequence stays valid and still fails."""
    failure = replay(ops, engine)
    if failure is None:
        return ops, None
    ops = list(ops[: failure[0] + 1])
    changed = True
    while changed:
        changed = False
        for i in range(len(ops) - 1, -1, -1):
            candidate = ops[:i] + ops[i + 1 :]
            if not candidate or not is_valid(candidate):
                continue
            result = replay(candidate, engine)
            if result is not None:
                ops = candidate[: result[0] + 1]
                failure = result
                changed = True
                break
    return ops, failure


def to_scenario(ops, width_dest, width_src):
    lines = [f"widths {width_dest} {width_src}"]
    for op in ops:
        lines.append(str(op))
        lines.append("check")
    return "\n".join(lines) + "\n"


@dataclass
class CheckReport:
    iterations: int = 0
    operations: int = 0
    failures: int = 0
    message: str | None = None
    counterexample: str | None = None

    @property
    def passed(self):
        return self.failures == 0

    def summary(self):
        status = "PASS" if self.passed else "FAIL"
        text = f"{status}: {self.iterations} sequences, {self.operations} operations checked"
        if self.message:
            text += f"\nfirst failure: {self.message}"
        return text


def run_check(width_dest=4, width_src=4, routes=8, ops=40, seed=0, iterations=200,
              engine=RibState):
    """Replay ``iterations`` random sequences; stop at the first failing one."""
    report = CheckReport()
    for i in range(iterations):
        rng = random.Random(f"{seed}:{i}")
        sequence = random_operations(rng, width_dest, width_src, routes, ops)
        report.iterations += 1
        failure = replay(sequence, engine)
        if failure is None:
            report.operations += len(sequence)
            continue
        report.operations += failure[0] + 1
        report.failures += 1
        shrunk, shrunk_failure = shrink(sequence, engine)
        report.message = f"sequence {i} (seed {seed}): op {shrunk_failure[0] + 1}: {shrunk_failure[1]}"
        report.counterexample = to_scenario(shrunk, width_dest, width_src)
        break
    return report
