"""Address and prefix algebra for source-specific routing tables.

Addresses and prefixes live in a universe of fixed bit width (1 to 128).
Widths 32 and 128 print as IPv4/IPv6 text; every other width uses a plain
bitstring form such as ``01/2`` (the first two bits are ``01``).

A route key is a ``(dest, src)`` pair of prefixes.  Keys are compared under
three orders:

* pair specificity (``pair_le``), a partial order by address-set inclusion;
* the destination-first refinement (``dest_first_cmp``);
* the source-first refinement (``source_first_cmp``).
"""

from __future__ import annotations

import enum
import ipaddress
from dataclasses import dataclass

MAX_WIDTH = 128


class WidthMismatch(ValueError):
    """Two values from universes of different width were combined."""


class InternalContractError(RuntimeError):
    """An invariant the algorithms rely on did not hold.

    Raised, for instance, when a minimum is taken over a set that should be
    a chain under an ordering but contains two incomparable elements.
    """


def _check_width(width):
    if not isinstance(width, int) or not 1 <= width <= MAX_WIDTH:
        raise ValueError(f"width must be an integer in 1..{MAX_WIDTH}, got {width!r}")


def _same_width(a, b):
    if a.width != b.width:
        raise WidthMismatch(f"width {a.width} vs {b.width}")


def _bits_text(value, nbits, width):
    if nbits == 0:
        return ""
    return format(value >> (width - nbits), f"0{nbits}b")


@dataclass(frozen=True, slots=True)
class Address:
    width: int
    bits: int

    def __post_init__(self):
        _check_width(self.width)
        if not 0 <= self.bits < (1 << self.width):
            raise ValueError(f"address {self.bits:#x} does not fit in {self.width} bits")

    @classmethod
    def parse(cls, text, width):
        text = text.strip()
        if width == 128:
            return cls(128, int(ipaddress.IPv6Address(text)))
        if width == 32:
            return cls(32, int(ipaddress.IPv4Address(text)))
        _check_width(width)
        if len(text) != width or set(text) - {"0", "1"}:
            raise ValueError(f"expected a {width}-bit string, got {text!r}")
        return cls(width, int(text, 2))

    def __str__(self):
        if self.width == 128:
            return str(ipaddress.IPv6Address(self.bits))
        if self.width == 32:
            return str(ipaddress.IPv4Address(self.bits))
        return format(self.bits, f"0{self.width}b")


@dataclass(frozen=True, slots=True)
class Prefix:
    """A canonical prefix: ``bits`` holds the full-width value, zero past ``plen``."""

    width: int
    plen: int
    bits: int = 0

    def __post_init__(self):
        _check_width(self.width)
        if not 0 <= self.plen <= self.width:
            raise ValueError(f"prefix length {self.plen} outside 0..{self.width}")
        if not 0 <= self.bits < (1 << self.width):
            raise ValueError(f"prefix bits {self.bits:#x} do not fit in {self.width} bits")
        if self.bits & ((1 << (self.width - self.plen)) - 1):
            raise ValueError(f"non-canonical prefix: bits set past length {self.plen}")

    @classmethod
    def from_address(cls, addr, plen):
        """Truncate ``addr`` to its first ``plen`` bits."""
        host = addr.width - plen
        return cls(addr.width, plen, (addr.bits >> host) << host)

    @classmethod
    def default(cls, width):
        return cls(width, 0, 0)

    @classmethod
    def parse(cls, text, width):
        text = text.strip()
        if width in (32, 128):
            try:
                net = ipaddress.ip_network(text, strict=True)
            except ValueError as exc:
                raise ValueError(f"bad prefix {text!r}: {exc}") from None
            if net.max_prefixlen != width:
                raise ValueError(f"prefix {text!r} is not a {width}-bit prefix")
            return cls(width, net.prefixlen, int(net.network_address))
        _check_width(width)
        digits, sep, plen_text = text.partition("/")
        if not sep or not plen_text.isdigit():
            raise ValueError(f"bad prefix {text!r}: expected BITS/plen")
        if len(digits) > width or set(digits) - {"0", "1"}:
            raise ValueError(f"bad prefix {text!r}: expected at most {width} binary digits")
        plen = int(plen_text)
        if plen > width:
            raise ValueError(f"bad prefix {text!r}: length exceeds width {width}")
        if "1" in digits[plen:]:
            raise ValueError(f"non-canonical prefix {text!r}: bits set past length {plen}")
        value = int(digits.ljust(width, "0"), 2) if digits else 0
        return cls(width, plen, value)

    @property
    def size(self):
        """Number of addresses covered."""
        return 1 << (self.width - self.plen)

    @property
    def first(self):
        return self.bits

    @property
    def last(self):
        return self.bits + self.size - 1

    def sort_key(self):
        return (self.bits, self.plen)

    def __contains__(self, addr):
        return contains(self, addr)

    def __str__(self):
        if self.width == 128:
            return f"{ipaddress.IPv6Address(self.bits)}/{self.plen}"
        if self.width == 32:
            return f"{ipaddress.IPv4Address(self.bits)}/{self.plen}"
        return f"{_bits_text(self.bits, self.plen, self.width)}/{self.plen}"


def contains(p, a):
    """True iff address ``a`` lies in prefix ``p``."""
    _same_width(p, a)
    host = p.width - p.plen
    return (a.bits >> host) == (p.bits >> host)


def prefix_le(p, q):
    """True iff ``p`` is more specific than or equal to ``q``."""
    _same_width(p, q)
    if p.plen < q.plen:
        return False
    host = q.width - q.plen
    return (p.bits >> host) == (q.bits >> host)


def prefix_lt(p, q):
    return p != q and prefix_le(p, q)


def prefix_disjoint(p, q):
    _same_width(p, q)
    return not prefix_le(p, q) and not prefix_le(q, p)


def prefix_meet(p, q):
    """The more specific of two nested prefixes, or None when disjoint."""
    if prefix_le(p, q):
        return p
    if prefix_le(q, p):
        return q
    return None


@dataclass(frozen=True, slots=True)
class RouteKey:
    """A ``(destination, source)`` prefix pair; destination comes first."""

    dest: Prefix
    src: Prefix

    @classmethod
    def parse(cls, text, width_dest, width_src=None):
        """Parse ``"<dest> from <src>"``; a bare ``"<dest>"`` gets a zero-length source."""
        if width_src is None:
            width_src = width_dest
        dest_text, sep, src_text = text.strip().partition(" from ")
        dest = Prefix.parse(dest_text, width_dest)
        src = Prefix.parse(src_text, width_src) if sep else Prefix.default(width_src)
        return cls(dest, src)

    def matches(self, a_d, a_s):
        return contains(self.dest, a_d) and contains(self.src, a_s)

    @property
    def is_specific(self):
        return self.src.plen != 0

    def sort_key(self):
        return (self.dest.bits, self.dest.plen, self.src.bits, self.src.plen)

    def __str__(self):
        return f"{self.dest} from {self.src}"


class PairOrder(enum.Enum):
    LESS = "less"
    EQUAL = "equal"
    GREATER = "greater"
    INCOMPARABLE = "incomparable"


def _check_pair(r, q):
    _same_width(r.dest, q.dest)
    _same_width(r.src, q.src)


def pair_le(r, q):
    _check_pair(r, q)
    return prefix_le(r.dest, q.dest) and prefix_le(r.src, q.src)


def pair_lt(r, q):
    return r != q and pair_le(r, q)


def pair_disjoint(r, q):
    _check_pair(r, q)
    return prefix_disjoint(r.dest, q.dest) or prefix_disjoint(r.src, q.src)


def pair_conflicts(r, q):
    """True iff ``r`` and ``q`` overlap but neither is more specific."""
    _check_pair(r, q)
    return (prefix_lt(r.dest, q.dest) and prefix_lt(q.src, r.src)) or (
        prefix_lt(q.dest, r.dest) and prefix_lt(r.src, q.src)
    )


def pair_meet(r, q):
    """Intersection of two keys as a key, or None when they are disjoint."""
    d = prefix_meet(r.dest, q.dest)
    s = prefix_meet(r.src, q.src)
    if d is None or s is None:
        return None
    return RouteKey(d, s)


def conflict_zone(r, q):
    """Key covering exactly the address pairs matched by both conflicting keys."""
    if not pair_conflicts(r, q):
        raise ValueError(f"{r} and {q} are not in conflict")
    return pair_meet(r, q)


def _lexicographic(first_r, first_q, second_r, second_q):
    if first_r == first_q:
        if second_r == second_q:
            return PairOrder.EQUAL
        if prefix_le(second_r, second_q):
            return PairOrder.LESS
        if prefix_le(second_q, second_r):
            return PairOrder.GREATER
        return PairOrder.INCOMPARABLE
    if prefix_le(first_r, first_q):
        return PairOrder.LESS
    if prefix_le(first_q, first_r):
        return PairOrder.GREATER
    return PairOrder.INCOMPARABLE


def dest_first_cmp(r, q):
    """Compare by destination specificity, breaking ties on the source."""
    _check_pair(r, q)
    return _lexicographic(r.dest, q.dest, r.src, q.src)


def source_first_cmp(r, q):
    """Compare by source specificity, breaking ties on the destination."""
    _check_pair(r, q)
    return _lexicographic(r.src, q.src, r.dest, q.dest)


def dest_first_lt(r, q):
    return dest_first_cmp(r, q) is PairOrder.LESS


def order_min(items, cmp, key=lambda x: x):
    """Minimum of ``items`` under ``cmp``; None for an empty iterable.

    ``items`` must form a chain; an incomparable pair raises
    InternalContractError.
    """
    best = None
    for item in items:
        if best is None:
            best = item
            continue
        order = cmp(key(item), key(best))
        if order is PairOrder.LESS:
            best = item
        elif order is PairOrder.INCOMPARABLE:
            raise InternalContractError(
                f"cannot take a minimum over incomparable keys {key(item)} and {key(best)}"
            )
    return best
