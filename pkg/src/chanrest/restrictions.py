"""Deciders for half-duplex, existential B-boundedness and k-synchronisability.

Trace-level predicates follow the definitions over prefixes directly.
Chart-level deciders search over down-closed cuts of the happens-before
order; cuts are integer bitmasks and failed cuts are memoised.  The searches
are exponential in the worst case and guarded by a node ceiling.
"""

from __future__ import annotations

import itertools
from collections import defaultdict
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

from .errors import ResourceLimitError
from .events import Event, Kind, require_compliant
from .msc import PrefixMsc, _bits

MAX_NODES = 32


def _guard(m: PrefixMsc, max_nodes: Optional[int]) -> None:
    limit = MAX_NODES if max_nodes is None else max_nodes
    if len(m) > limit:
        raise ResourceLimitError(f"chart has {len(m)} nodes, above the ceiling of {limit}")


def _positive(name: str, value: int) -> None:
    if not isinstance(value, int) or value < 1:
        raise ValueError(f"{name} must be a positive integer, got {value!r}")


# --- half-duplex -------------------------------------------------------------

def is_half_duplex_trace(w: Sequence[Event]) -> bool:
    """At every prefix, each pair of processes has an empty direction."""
    require_compliant(w)
    count: Dict[Tuple[str, str], int] = defaultdict(int)
    for e in w:
        ch = e.channel
        count[ch] += 1 if e.kind is Kind.SEND else -1
        if count[ch] and count[(ch[1], ch[0])]:
            return False
    return True


def half_duplex_violation(m: PrefixMsc) -> Optional[Tuple[int, int]]:
    """A pair of opposite sends that can be in flight together, if any.

    Sends ``e1 = P>Q!_`` and ``e2 = Q>P!_`` are simultaneously in flight in
    some linearization iff neither's receive happens before the other send.
    """
    sends = m.send_nodes
    for e1 in sends:
        p, q = m.labels[e1].channel
        for e2 in sends:
            if m.labels[e2].channel != (q, p) or e2 < e1:
                continue
            r1 = m.match.get(e1)
            r2 = m.match.get(e2)
            if (r1 is None or not m.happens_before(r1, e2)) and \
                    (r2 is None or not m.happens_before(r2, e1)):
                return (e1, e2) if e1 < e2 else (e2, e1)
    return None


def is_half_duplex_msc(m: PrefixMsc) -> bool:
    """Whether every linearization of ``m`` is half-duplex."""
    return half_duplex_violation(m) is None


# --- boundedness -------------------------------------------------------------

def is_B_bounded_trace(w: Sequence[Event], bound: int) -> bool:
    """No prefix holds more than ``bound`` messages in any channel."""
    _positive("bound", bound)
    require_compliant(w)
    count: Dict[Tuple[str, str], int] = defaultdict(int)
    for e in w:
        ch = e.channel
        count[ch] += 1 if e.kind is Kind.SEND else -1
        if count[ch] > bound:
            return False
    return True


def bounded_linearization(m: PrefixMsc, bound: int,
                          max_nodes: Optional[int] = None) -> Optional[Tuple[int, ...]]:
    """A ``bound``-bounded linearization (as node order), or ``None``.

    Enabled receives are always taken first: pulling a receive earlier
    never raises any channel count, so no branching is needed for them.
    """
    _positive("bound", bound)
    _guard(m, max_nodes)
    n = len(m)
    full = (1 << n) - 1
    pred = [m.pred_mask(i) for i in range(n)]
    chan = [m.channel_index(i) for i in range(n)]
    is_send = [m.labels[i].kind is Kind.SEND for i in range(n)]
    counts = [0] * len(m.channels)
    failed = set()
    path: List[int] = []

    def rec(cut: int) -> bool:
        if cut == full:
            return True
        if cut in failed:
            return False
        enabled = [i for i in range(n) if not cut >> i & 1 and pred[i] & ~cut == 0]
        recv = next((i for i in enabled if not is_send[i]), None)
        choices = [recv] if recv is not None else enabled
        for i in choices:
            c = chan[i]
            delta = 1 if is_send[i] else -1
            if counts[c] + delta > bound:
                continue
            counts[c] += delta
            path.append(i)
            if rec(cut | 1 << i):
                return True
            path.pop()
            counts[c] -= delta
        failed.add(cut)
        return False

    return tuple(path) if rec(0) else None


def is_existentially_B_bounded(m: PrefixMsc, bound: int, max_nodes: Optional[int] = None) -> bool:
    return bounded_linearization(m, bound, max_nodes) is not None


def least_existential_bound(m: PrefixMsc, max_nodes: Optional[int] = None) -> int:
    """Smallest ``B`` such that ``m`` has a ``B``-bounded linearization."""
    n_sends = m.n_sends
    if n_sends == 0:
        raise ValueError("existential bound is undefined for a chart without sends")
    for bound in range(1, n_sends + 1):
        if is_existentially_B_bounded(m, bound, max_nodes):
            return bound
    raise AssertionError("unreachable: every chart is bounded by its number of sends")


# --- synchronisability ---------------------------------------------------------

@dataclass(frozen=True)
class Exchange:
    """One block of a k-exchange decomposition: sends, then their receives."""

    sends: Tuple[int, ...]
    recvs: Tuple[int, ...]


def _order_within(m: PrefixMsc, nodes: int) -> Tuple[int, ...]:
    """Topologically order the nodes of a bitmask, lowest id first."""
    out = []
    done = 0
    rest = nodes
    while rest:
        for i in _bits(rest):
            if m.pred_mask(i) & nodes & ~done == 0:
                out.append(i)
                done |= 1 << i
                rest &= ~(1 << i)
                break
    return tuple(out)


def _exchange_moves(m: PrefixMsc, cut: int, k: Optional[int]):
    """Every exchange appendable at ``cut`` with at most ``k`` sends.

    Yields ``(send_mask, recv_mask)``.  Sends must only need sends (or
    completed nodes) before them; the receives of all matched sends must be
    enabled after the sends.
    """
    cands = []
    for s in m.send_nodes:
        if cut >> s & 1:
            continue
        need = m.down_mask(s) & ~cut
        if need & ~m._send_mask == 0:
            cands.append(s)
    limit = len(cands) if k is None else min(k, len(cands))
    match = m.match
    for size in range(1, limit + 1):
        for combo in itertools.combinations(cands, size):
            smask = 0
            for s in combo:
                smask |= 1 << s
            if any(m.down_mask(s) & ~cut & ~smask for s in combo):
                continue
            rmask = 0
            for s in combo:
                r = match.get(s)
                if r is not None:
                    rmask |= 1 << r
            total = cut | smask | rmask
            if any(m.down_mask(r) & ~total for r in _bits(rmask)):
                continue
            yield smask, rmask


def k_exchange_decomposition(m: PrefixMsc, k: int,
                             max_nodes: Optional[int] = None) -> Optional[List[Exchange]]:
    """A decomposition of some linearization into k-exchanges, or ``None``."""
    _positive("k", k)
    _guard(m, max_nodes)
    full = (1 << len(m)) - 1
    failed = set()
    blocks: List[Tuple[int, int]] = []

    def rec(cut: int) -> bool:
        if cut == full:
            return True
        if cut in failed:
            return False
        for smask, rmask in _exchange_moves(m, cut, k):
            blocks.append((smask, rmask))
            if rec(cut | smask | rmask):
                return True
            blocks.pop()
        failed.add(cut)
        return False

    if not rec(0):
        return None
    return [Exchange(_order_within(m, s), _order_within(m, r)) for s, r in blocks]


def is_k_synchronous(m: PrefixMsc, k: int, max_nodes: Optional[int] = None) -> bool:
    return k_exchange_decomposition(m, k, max_nodes) is not None


def least_k(m: PrefixMsc, max_nodes: Optional[int] = None) -> Optional[int]:
    """Smallest ``k`` for which ``m`` is k-synchronous; ``None`` if there is none.

    No block can hold more sends than the chart has, so ``k = n_sends``
    decides whether any ``k`` works.  An empty chart is 1-synchronous.
    """
    top = max(m.n_sends, 1)
    if not is_k_synchronous(m, top, max_nodes):
        return None
    for k in range(1, top):
        if is_k_synchronous(m, k, max_nodes):
            return k
    return top


# --- bundle ------------------------------------------------------------------

@dataclass(frozen=True)
class Classification:
    """Half-duplex flag, least existential bound, least k.

    ``least_existential_bound`` is 0 for a chart without sends;
    ``least_k`` is ``None`` when the chart is not synchronisable.
    """

    half_duplex: bool
    least_existential_bound: int
    least_k: Optional[int]

    def as_dict(self) -> dict:
        return {
            "half_duplex": self.half_duplex,
            "least_existential_bound": self.least_existential_bound,
            "least_k": self.least_k,
        }


def classify(m: PrefixMsc, max_nodes: Optional[int] = None) -> Classification:
    bound = least_existential_bound(m, max_nodes) if m.n_sends else 0
    return Classification(is_half_duplex_msc(m), bound, least_k(m, max_nodes))
