"""Events, traces and the FIFO bookkeeping every other module relies on.

An event is a single send ``P>Q!m`` (process P sends m to Q) or receive
``P<Q?m`` (process P receives m from Q).  The acting process always comes
first.  A trace is a plain tuple of events; channel compliance is a
predicate over traces, not a construction invariant.
"""

from __future__ import annotations

import enum
import re
from collections import defaultdict, deque
from dataclasses import dataclass
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Tuple

from .errors import NotCompliantError, ParseError

_IDENT = r"[A-Za-z_][A-Za-z0-9_]*"
_IDENT_RE = re.compile(rf"^{_IDENT}$")
_EVENT_RE = re.compile(rf"^({_IDENT})([<>])({_IDENT})([!?])({_IDENT})$")
_SYNC_RE = re.compile(rf"^({_IDENT})->({_IDENT}):({_IDENT})$")


def _check_ident(value: str, what: str) -> None:
    if not isinstance(value, str) or not _IDENT_RE.match(value):
        raise ValueError(f"invalid {what} name: {value!r}")


class Kind(enum.IntEnum):
    SEND = 0
    RECV = 1


@dataclass(frozen=True, order=True, slots=True)
class Event:
    kind: Kind
    actor: str
    peer: str
    msg: str

    def __post_init__(self):
        _check_ident(self.actor, "process")
        _check_ident(self.peer, "process")
        _check_ident(self.msg, "message")
        if self.actor == self.peer:
            raise ValueError(f"process {self.actor} cannot communicate with itself")

    @classmethod
    def send(cls, sender: str, receiver: str, msg: str) -> "Event":
        return cls(Kind.SEND, sender, receiver, msg)

    @classmethod
    def recv(cls, receiver: str, sender: str, msg: str) -> "Event":
        return cls(Kind.RECV, receiver, sender, msg)

    @property
    def is_send(self) -> bool:
        return self.kind is Kind.SEND

    @property
    def is_recv(self) -> bool:
        return self.kind is Kind.RECV

    @property
    def channel(self) -> Tuple[str, str]:
        """The ordered (sender, receiver) pair this event operates on."""
        if self.kind is Kind.SEND:
            return (self.actor, self.peer)
        return (self.peer, self.actor)

    def dual(self) -> "Event":
        """The matching partner: receive for a send and vice versa."""
        other = Kind.RECV if self.kind is Kind.SEND else Kind.SEND
        return Event(other, self.peer, self.actor, self.msg)

    def __str__(self) -> str:
        if self.kind is Kind.SEND:
            return f"{self.actor}>{self.peer}!{self.msg}"
        return f"{self.actor}<{self.peer}?{self.msg}"

    def __repr__(self) -> str:
        return f"Event({str(self)!r})"


@dataclass(frozen=True, order=True, slots=True)
class SyncEvent:
    """A synchronous message exchange ``P->Q:m``."""

    sender: str
    receiver: str
    msg: str

    def __post_init__(self):
        _check_ident(self.sender, "process")
        _check_ident(self.receiver, "process")
        _check_ident(self.msg, "message")
        if self.sender == self.receiver:
            raise ValueError(f"process {self.sender} cannot send to itself")

    def send_event(self) -> Event:
        return Event.send(self.sender, self.receiver, self.msg)

    def recv_event(self) -> Event:
        return Event.recv(self.receiver, self.sender, self.msg)

    def __str__(self) -> str:
        return f"{self.sender}->{self.receiver}:{self.msg}"

    def __repr__(self) -> str:
        return f"SyncEvent({str(self)!r})"


Trace = Tuple[Event, ...]


def parse_event(token: str) -> Event:
    m = _EVENT_RE.match(token)
    if not m:
        raise ParseError(f"not an event: {token!r}")
    actor, arrow, peer, mark, msg = m.groups()
    if (arrow, mark) == (">", "!"):
        return Event.send(actor, peer, msg)
    if (arrow, mark) == ("<", "?"):
        return Event.recv(actor, peer, msg)
    raise ParseError(f"mismatched direction and action in {token!r}")


def parse_sync_event(token: str) -> SyncEvent:
    m = _SYNC_RE.match(token)
    if not m:
        raise ParseError(f"not a message exchange: {token!r}")
    return SyncEvent(*m.groups())


def parse_trace(text: str, source: Optional[str] = None) -> Trace:
    """Parse whitespace-separated event tokens; ``#`` starts a line comment."""
    events = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0]
        col = 0
        for token in line.split():
            col = line.index(token, col)
            try:
                events.append(parse_event(token))
            except (ParseError, ValueError) as exc:
                raise ParseError(str(exc), lineno, col + 1, source) from None
            col += len(token)
    return tuple(events)


def format_trace(w: Iterable[Event]) -> str:
    return " ".join(str(e) for e in w)


def trace(text: str) -> Trace:
    """Shorthand used throughout tests and demos: ``trace("P>Q!m Q<P?m")``."""
    return parse_trace(text)


# --- projections -----------------------------------------------------------

def channel_send_values(w: Sequence[Event], sender: str, receiver: str) -> List[str]:
    """Messages sent on channel sender->receiver, in trace order."""
    return [e.msg for e in w if e.kind is Kind.SEND and e.actor == sender and e.peer == receiver]


def channel_recv_values(w: Sequence[Event], sender: str, receiver: str) -> List[str]:
    """Messages received by ``receiver`` from ``sender``, in trace order."""
    return [e.msg for e in w if e.kind is Kind.RECV and e.actor == receiver and e.peer == sender]


def project(w: Sequence[Event], process: str) -> Trace:
    """The subsequence of events performed by ``process``."""
    return tuple(e for e in w if e.actor == process)


def processes(w: Iterable[Event]) -> List[str]:
    """Every process mentioned in ``w`` (as actor or peer), sorted."""
    seen = set()
    for e in w:
        seen.add(e.actor)
        seen.add(e.peer)
    return sorted(seen)


def prefixes(w: Sequence[Event]) -> Iterator[Trace]:
    """All ``len(w) + 1`` prefixes of ``w`` by increasing length."""
    w = tuple(w)
    for i in range(len(w) + 1):
        yield w[:i]


# --- compliance ------------------------------------------------------------

def compliance_violation(w: Sequence[Event]) -> Optional[int]:
    """Index of the first receive that breaks FIFO compliance, or ``None``."""
    queues: Dict[Tuple[str, str], deque] = defaultdict(deque)
    for i, e in enumerate(w):
        q = queues[e.channel]
        if e.kind is Kind.SEND:
            q.append(e.msg)
        elif not q or q[0] != e.msg:
            return i
        else:
            q.popleft()
    return None


def is_channel_compliant(w: Sequence[Event]) -> bool:
    """Every receive consumes the oldest pending message of its channel."""
    return compliance_violation(w) is None


def require_compliant(w: Sequence[Event]) -> None:
    i = compliance_violation(w)
    if i is not None:
        raise NotCompliantError(f"trace is not channel-compliant at position {i} ({w[i]})")


def in_flight(w: Sequence[Event]) -> Dict[Tuple[str, str], int]:
    """Per-channel count of sends minus receives (only non-zero channels)."""
    counts: Dict[Tuple[str, str], int] = defaultdict(int)
    for e in w:
        counts[e.channel] += 1 if e.kind is Kind.SEND else -1
    return {ch: n for ch, n in counts.items() if n}


def is_complete(w: Sequence[Event]) -> bool:
    """Every send of a compliant trace has been received."""
    require_compliant(w)
    return not in_flight(w)


def matching(w: Sequence[Event]) -> Dict[int, int]:
    """Map send positions to the positions of the receives that match them.

    On each channel the n-th send is matched by the n-th receive.
    Unmatched sends are absent from the result.
    """
    require_compliant(w)
    pending: Dict[Tuple[str, str], deque] = defaultdict(deque)
    result = {}
    for i, e in enumerate(w):
        if e.kind is Kind.SEND:
            pending[e.channel].append(i)
        else:
            result[pending[e.channel].popleft()] = i
    return result
