import pytest
from hypothesis import strategies as st

from ssroute import Address, NextHop, Prefix, RouteKey


def P(text, width=4):
    return Prefix.parse(text, width)


def K(text, width_dest=4, width_src=None):
    return RouteKey.parse(text, width_dest, width_src)


def A(text, width=4):
    return Address.parse(text, width)


def NH(name):
    return NextHop(name)


def addr_set(prefix):
    """Addresses of a small prefix by string comparison, independent of the bit arithmetic."""
    head = str(prefix).split("/")[0]
    return {a for a in range(1 << prefix.width) if format(a, f"0{prefix.width}b").startswith(head)}


def pair_set(key):
    return {(d, s) for d in addr_set(key.dest) for s in addr_set(key.src)}


@st.composite
def prefixes(draw, width=4):
    plen = draw(st.integers(0, width))
    bits = draw(st.integers(0, (1 << plen) - 1)) << (width - plen) if plen else 0
    return Prefix(width, plen, bits)


@st.composite
def keys(draw, width_dest=4, width_src=4):
    return RouteKey(draw(prefixes(width_dest)), draw(prefixes(width_src)))


def all_prefixes(width):
    return [Prefix(width, plen, b << (width - plen)) for plen in range(width + 1) for b in range(1 << plen)]


@pytest.fixture
def rectangle():
    """The four routes of the worked rectangle example, at width 4/4."""
    return [
        (K("00/2 from /0"), NH("A")),
        (K("000/3 from 10/2"), NH("B")),
        (K("/0 from 1/1"), NH("C")),
        (K("0/1 from 11/2"), NH("D")),
    ]
