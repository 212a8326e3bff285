"""Prefix message sequence charts.

A prefix MSC is stored as one label per node plus, for every process, the
sequence of its nodes.  Node ids are dense integers.  The matching between
sends and receives is never supplied by the caller: for FIFO-respecting
charts it is determined by the process orders (n-th send on a channel is
matched by the n-th receive), so it is derived and validated on construction.

Happens-before is the reflexive-transitive closure of the process orders and
the send->receive edges.  All charts here are finite, so ordinary closure is
used; down-sets are kept as integer bitmasks.
"""

from __future__ import annotations

from collections import defaultdict
from typing import Dict, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple, Union

from .errors import InvalidMscError
from .events import Event, Kind, Trace, matching, parse_event, require_compliant


def _bits(mask: int) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


class PrefixMsc:
    """A finite prefix MSC that respects FIFO order.

    Parameters
    ----------
    labels:
        ``labels[i]`` is the event of node ``i``.
    order:
        For every process, its nodes in process order.  Every node must occur
        exactly once, under its own actor.
    """

    __slots__ = (
        "labels", "order", "match", "_pred", "_down", "_send_mask", "_recv_mask",
        "_chan_of", "_channels", "_topo",
    )

    def __init__(self, labels: Sequence[Event], order: Mapping[str, Sequence[int]]):
        self.labels: Tuple[Event, ...] = tuple(labels)
        self.order: Dict[str, Tuple[int, ...]] = {
            p: tuple(nodes) for p, nodes in sorted(order.items()) if nodes
        }
        n = len(self.labels)
        seen = [False] * n
        for p, nodes in self.order.items():
            for i in nodes:
                if not 0 <= i < n:
                    raise InvalidMscError(f"node {i} out of range")
                if seen[i]:
                    raise InvalidMscError(f"node {i} occurs twice in process orders")
                seen[i] = True
                if self.labels[i].actor != p:
                    raise InvalidMscError(f"node {i} ({self.labels[i]}) listed under process {p}")
        if not all(seen):
            raise InvalidMscError(f"node {seen.index(False)} is in no process order")
        self._derive_match()
        self._close()

    # -- construction helpers ------------------------------------------------

    def _derive_match(self) -> None:
        sends: Dict[Tuple[str, str], List[int]] = defaultdict(list)
        recvs: Dict[Tuple[str, str], List[int]] = defaultdict(list)
        for nodes in self.order.values():
            for i in nodes:
                e = self.labels[i]
                (sends if e.kind is Kind.SEND else recvs)[e.channel].append(i)
        match = {}
        for ch, rs in recvs.items():
            ss = sends.get(ch, [])
            if len(rs) > len(ss):
                raise InvalidMscError(
                    f"channel {ch[0]}->{ch[1]} has {len(rs)} receives but only {len(ss)} sends")
            for s, r in zip(ss, rs):
                if self.labels[s].msg != self.labels[r].msg:
                    raise InvalidMscError(
                        f"label mismatch on channel {ch[0]}->{ch[1]}: "
                        f"{self.labels[s]} is received as {self.labels[r]}")
                match[s] = r
        self.match: Dict[int, int] = dict(sorted(match.items()))
        self._channels = sorted(set(sends) | set(recvs))
        index = {ch: k for k, ch in enumerate(self._channels)}
        self._chan_of = tuple(index[e.channel] for e in self.labels)

    def _close(self) -> None:
        n = len(self.labels)
        pred = [0] * n
        for nodes in self.order.values():
            for a, b in zip(nodes, nodes[1:]):
                pred[b] |= 1 << a
        for s, r in self.match.items():
            pred[r] |= 1 << s
        down = [0] * n
        done = 0
        topo = []
        remaining = set(range(n))
        while remaining:
            ready = [i for i in sorted(remaining) if pred[i] & ~done == 0]
            if not ready:
                raise InvalidMscError("happens-before relation is cyclic")
            for i in ready:
                d = 1 << i
                for j in _bits(pred[i]):
                    d |= down[j]
                down[i] = d
                done |= 1 << i
                topo.append(i)
                remaining.discard(i)
        self._pred = tuple(pred)
        self._down = tuple(down)
        self._topo = tuple(topo)
        self._send_mask = sum(1 << i for i, e in enumerate(self.labels) if e.kind is Kind.SEND)
        self._recv_mask = sum(1 << i for i, e in enumerate(self.labels) if e.kind is Kind.RECV)

    @classmethod
    def from_processes(cls, lines: Mapping[str, Sequence[Union[Event, str]]]) -> "PrefixMsc":
        """Build from per-process event lists.

        Events may be given as :class:`Event` values or as short tokens
        ``Q!m`` / ``Q?m`` relative to the owning process.
        """
        labels: List[Event] = []
        order: Dict[str, List[int]] = {}
        for p, events in lines.items():
            order[p] = []
            for ev in events:
                if isinstance(ev, str):
                    ev = short_event(p, ev)
                order[p].append(len(labels))
                labels.append(ev)
        return cls(labels, order)

    @classmethod
    def empty(cls) -> "PrefixMsc":
        return cls((), {})

    # -- basic accessors -------------------------------------------------------

    def __len__(self) -> int:
        return len(self.labels)

    @property
    def nodes(self) -> range:
        return range(len(self.labels))

    @property
    def processes(self) -> List[str]:
        return list(self.order)

    @property
    def channels(self) -> List[Tuple[str, str]]:
        return list(self._channels)

    def proc(self, node: int) -> str:
        return self.labels[node].actor

    @property
    def send_nodes(self) -> List[int]:
        return list(_bits(self._send_mask))

    @property
    def recv_nodes(self) -> List[int]:
        return list(_bits(self._recv_mask))

    @property
    def n_sends(self) -> int:
        return bin(self._send_mask).count("1")

    @property
    def is_complete(self) -> bool:
        """Every send is matched (a basic MSC)."""
        return len(self.match) == self.n_sends

    def unmatched_sends(self) -> List[int]:
        return [s for s in _bits(self._send_mask) if s not in self.match]

    def down_mask(self, node: int) -> int:
        """Bitmask of all nodes that happen before ``node`` (inclusive)."""
        return self._down[node]

    def pred_mask(self, node: int) -> int:
        """Bitmask of the immediate predecessors of ``node``."""
        return self._pred[node]

    def channel_index(self, node: int) -> int:
        return self._chan_of[node]

    def process_sequence(self, p: str) -> Trace:
        return tuple(self.labels[i] for i in self.order.get(p, ()))

    def happens_before(self, e: int, e2: int) -> bool:
        n = len(self.labels)
        if not (0 <= e < n and 0 <= e2 < n):
            raise ValueError(f"unknown node id in ({e}, {e2})")
        return bool(self._down[e2] >> e & 1)

    # -- identity --------------------------------------------------------------

    def canonical(self) -> Tuple[Tuple[str, Trace], ...]:
        """Per-process label sequences; equal iff the charts are isomorphic."""
        return tuple((p, self.process_sequence(p)) for p in self.order)

    def isomorphic(self, other: "PrefixMsc") -> bool:
        return self.canonical() == other.canonical()

    def __eq__(self, other) -> bool:
        if not isinstance(other, PrefixMsc):
            return NotImplemented
        return self.canonical() == other.canonical()

    def __hash__(self) -> int:
        return hash(self.canonical())

    def __repr__(self) -> str:
        body = " | ".join(
            f"{p}: " + " ".join(_short(e) for e in self.process_sequence(p)) for p in self.order)
        return f"PrefixMsc({body})"

    # -- linearizations --------------------------------------------------------

    def linearization_orders(self) -> Iterator[Tuple[int, ...]]:
        """Every topological order of the nodes, lowest node id first."""
        n = len(self.labels)
        full = (1 << n) - 1
        pred = self._pred
        stack: List[int] = []

        def rec(cut: int):
            if cut == full:
                yield tuple(stack)
                return
            for i in range(n):
                if not cut >> i & 1 and pred[i] & ~cut == 0:
                    stack.append(i)
                    yield from rec(cut | 1 << i)
                    stack.pop()

        yield from rec(0)

    def linearizations(self) -> Iterator[Trace]:
        """Label sequences of all linearizations (lazily)."""
        labels = self.labels
        for order in self.linearization_orders():
            yield tuple(labels[i] for i in order)

    def a_linearization(self) -> Tuple[int, ...]:
        return self._topo

    def count_linearizations(self) -> int:
        """Number of topological orders, by dynamic programming over cuts."""
        n = len(self.labels)
        full = (1 << n) - 1
        pred = self._pred
        memo: Dict[int, int] = {full: 1}

        def count(cut: int) -> int:
            if cut in memo:
                return memo[cut]
            total = 0
            for i in range(n):
                if not cut >> i & 1 and pred[i] & ~cut == 0:
                    total += count(cut | 1 << i)
            memo[cut] = total
            return total

        return count(0)

    def is_linearization(self, w: Sequence[Event]) -> bool:
        """Whether ``w`` is (the label sequence of) a linearization."""
        from .events import is_channel_compliant, project

        if len(w) != len(self.labels) or not is_channel_compliant(w):
            return False
        return all(project(w, p) == self.process_sequence(p) for p in self.order) and \
            all(e.actor in self.order for e in w)


def short_event(process: str, token: str) -> Event:
    """Parse ``Q!m`` / ``Q?m`` as an event of ``process``."""
    token = token.strip()
    for mark, arrow in (("!", ">"), ("?", "<")):
        if mark in token:
            return parse_event(f"{process}{arrow}{token}")
    return parse_event(f"{process}>{token}")  # raises a ParseError


def _short(e: Event) -> str:
    return f"{e.peer}{'!' if e.kind is Kind.SEND else '?'}{e.msg}"


def msc_of(w: Sequence[Event]) -> PrefixMsc:
    """The unique prefix MSC of which the compliant trace ``w`` is a linearization.

    Node ``i`` is the ``i``-th event of ``w``.
    """
    require_compliant(w)
    order: Dict[str, List[int]] = defaultdict(list)
    for i, e in enumerate(w):
        order[e.actor].append(i)
    return PrefixMsc(w, order)


def message(sender: str, receiver: str, msg: str) -> PrefixMsc:
    """The two-node BMSC of a single matched message exchange."""
    return PrefixMsc.from_processes({sender: [f"{receiver}!{msg}"], receiver: [f"{sender}?{msg}"]})


def concat(first: PrefixMsc, second: PrefixMsc) -> PrefixMsc:
    """Concatenate a basic MSC with a prefix MSC.

    Per process, every node of ``first`` precedes every node of ``second``.
    Nodes of ``second`` are renumbered after those of ``first``.
    """
    if not first.is_complete:
        raise InvalidMscError("the left operand of a concatenation must be a basic MSC")
    shift = len(first)
    labels = first.labels + second.labels
    order: Dict[str, List[int]] = defaultdict(list)
    for p, nodes in first.order.items():
        order[p].extend(nodes)
    for p, nodes in second.order.items():
        order[p].extend(i + shift for i in nodes)
    return PrefixMsc(labels, order)


def concat_all(parts: Iterable[PrefixMsc]) -> PrefixMsc:
    result = PrefixMsc.empty()
    for part in parts:
        result = concat(result, part)
    return result


def satisfies_causal_delivery(m: PrefixMsc) -> bool:
    """Look for a linearization witnessing causal delivery.

    For a candidate linearization ``w``, sends and receives are re-matched
    from ``w`` itself.  Any two sends on the same channel with ``e_i <= e_j``
    must either leave ``e_j`` unmatched or have ordered receives.
    """
    channel_sends: Dict[Tuple[str, str], List[int]] = defaultdict(list)
    for s in m.send_nodes:
        channel_sends[m.labels[s].channel].append(s)
    pairs = [
        (a, b)
        for ss in channel_sends.values()
        for a in ss for b in ss
        if a != b and m.happens_before(a, b)
    ]
    for order in m.linearization_orders():
        w = [m.labels[i] for i in order]
        by_pos = matching(w)
        matched = {order[i]: order[j] for i, j in by_pos.items()}
        ok = True
        for a, b in pairs:
            if b not in matched:
                continue
            if a not in matched or not m.happens_before(matched[a], matched[b]):
                ok = False
                break
        if ok:
            return True
    return False


def project_to_csm(m: PrefixMsc, processes: Optional[Iterable[str]] = None):
    """Let each process follow its own line of the chart.

    Returns a :class:`chanrest.csm.Csm` whose machine for ``P`` is a chain of
    ``len(P's events) + 1`` states ending in a final state.  Processes passed
    in ``processes`` that have no events get a single final state.
    """
    from .csm import Csm
    from .fsm import Fsm

    procs = list(m.order)
    for p in processes or ():
        if p not in procs:
            procs.append(p)
    for nodes in m.order.values():
        for i in nodes:
            if m.labels[i].peer not in procs:
                procs.append(m.labels[i].peer)
    machines = {}
    for p in sorted(procs):
        seq = m.process_sequence(p)
        states = list(range(len(seq) + 1))
        transitions = [(k, e, k + 1) for k, e in enumerate(seq)]
        machines[p] = Fsm(states, transitions, 0, [len(seq)])
    return Csm(machines)
