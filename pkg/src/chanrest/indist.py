"""The indistinguishability relation on finite traces.

Two adjacent events may be swapped when no FIFO system could tell the two
orders apart.  There are four rules:

* ``SEND_SEND``: two sends by different processes.
* ``RECV_RECV``: two receives by different processes.
* ``SEND_RECV``: ``P>Q!m`` and ``S<R?m'`` with ``P != S`` and
  ``(P != R or Q != S)``, i.e. different processes, not the same channel.
* ``RECV_SEND``: ``P>Q!m`` and ``Q<P?m'`` on the same channel, allowed only
  when a message is already in flight on it before the pair (so the receive
  does not consume the send it is swapped with).

The rules are stated for a send followed by a receive; the relation is used
as an equivalence, so each rule is also applied right to left under the same
guard.
"""

from __future__ import annotations

import enum
from collections import deque
from typing import Iterable, List, Sequence, Set, Tuple

from .errors import ResourceLimitError
from .events import Event, Kind, Trace, project

DEFAULT_CAP = 1_000_000


class SwapRule(enum.Enum):
    SEND_SEND = 1
    RECV_RECV = 2
    SEND_RECV = 3
    RECV_SEND = 4


def _pending_before(w: Sequence[Event], i: int, channel: Tuple[str, str]) -> int:
    """Sends minus receives on ``channel`` within ``w[:i]``."""
    n = 0
    for e in w[:i]:
        if e.channel == channel:
            n += 1 if e.kind is Kind.SEND else -1
    return n


def swap_rule(w: Sequence[Event], i: int):
    """The rule that allows swapping ``w[i]`` and ``w[i+1]``, or ``None``."""
    a, b = w[i], w[i + 1]
    if a.kind is Kind.SEND and b.kind is Kind.SEND:
        return SwapRule.SEND_SEND if a.actor != b.actor else None
    if a.kind is Kind.RECV and b.kind is Kind.RECV:
        return SwapRule.RECV_RECV if a.actor != b.actor else None
    send, recv = (a, b) if a.kind is Kind.SEND else (b, a)
    p, q = send.actor, send.peer
    s, r = recv.actor, recv.peer
    if p == s:
        return None
    if p != r or q != s:
        return SwapRule.SEND_RECV
    if _pending_before(w, i, (p, q)) > 0:
        return SwapRule.RECV_SEND
    return None


def swap_neighbors(w: Sequence[Event]) -> List[Tuple[int, SwapRule, Trace]]:
    """Every trace one swap away from ``w``, with the position and rule used."""
    w = tuple(w)
    out = []
    for i in range(len(w) - 1):
        rule = swap_rule(w, i)
        if rule is not None:
            out.append((i, rule, w[:i] + (w[i + 1], w[i]) + w[i + 2:]))
    return out


def equivalence_class(w: Sequence[Event], cap: int = DEFAULT_CAP) -> Set[Trace]:
    """All traces reachable from ``w`` by swaps."""
    start = tuple(w)
    seen = {start}
    queue = deque([start])
    while queue:
        cur = queue.popleft()
        for _, _, nxt in swap_neighbors(cur):
            if nxt not in seen:
                seen.add(nxt)
                if len(seen) > cap:
                    raise ResourceLimitError(f"more than {cap} indistinguishable traces")
                queue.append(nxt)
    return seen


def are_indistinguishable(w: Sequence[Event], u: Sequence[Event], cap: int = DEFAULT_CAP) -> bool:
    """Breadth-first search from ``w`` towards ``u``."""
    w, u = tuple(w), tuple(u)
    if w == u:
        return True
    if len(w) != len(u) or sorted(w) != sorted(u):
        return False
    # swaps never reorder the events of one process
    for p in {e.actor for e in w}:
        if project(w, p) != project(u, p):
            return False
    seen = {w}
    queue = deque([w])
    while queue:
        cur = queue.popleft()
        for _, _, nxt in swap_neighbors(cur):
            if nxt == u:
                return True
            if nxt not in seen:
                seen.add(nxt)
                if len(seen) > cap:
                    raise ResourceLimitError(f"more than {cap} traces explored")
                queue.append(nxt)
    return False


def closure(language: Iterable[Sequence[Event]], cap: int = DEFAULT_CAP) -> Set[Trace]:
    """Union of the equivalence classes of the given finite traces."""
    out: Set[Trace] = set()
    for w in language:
        w = tuple(w)
        if w in out:
            continue
        out |= equivalence_class(w, cap)
    return out
