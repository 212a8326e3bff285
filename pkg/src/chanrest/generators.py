"""Seeded random generators for traces, charts, HMSCs and global types.

Every generator takes a :class:`random.Random` so property suites are
reproducible from a single seed.
"""

from __future__ import annotations

import random
from collections import deque
from typing import Dict, List, Optional, Sequence, Tuple

from .errors import InvalidMscError
from .events import Event, Trace
from .hmsc import Hmsc
from .msc import PrefixMsc, msc_of
from .mst import Branch, Choice, End, GlobalType, Rec, Var, validate_global_type

PROCESS_NAMES = ("P", "Q", "R", "S")
MESSAGE_NAMES = ("a", "b", "c")


def random_trace(rng: random.Random, max_events: int = 12, n_procs: int = 3,
                 messages: Sequence[str] = MESSAGE_NAMES, complete: bool = False,
                 length: Optional[int] = None) -> Trace:
    """A channel-compliant trace; with ``complete`` every send is received at the end."""
    procs = PROCESS_NAMES[:n_procs]
    queues: Dict[Tuple[str, str], deque] = {}
    out: List[Event] = []
    target = rng.randint(0, max_events) if length is None else length
    budget = target
    while len(out) < budget:
        pending = [ch for ch, q in queues.items() if q]
        # when completing, leave room for the outstanding receives
        outstanding = sum(len(q) for q in queues.values())
        can_send = not complete or len(out) + outstanding + 2 <= budget
        if pending and (not can_send or rng.random() < 0.5):
            ch = rng.choice(sorted(pending))
            out.append(Event.recv(ch[1], ch[0], queues[ch].popleft()))
        elif can_send:
            p, q = rng.sample(procs, 2)
            m = rng.choice(messages)
            queues.setdefault((p, q), deque()).append(m)
            out.append(Event.send(p, q, m))
        else:
            break
    if complete:
        while any(queues.values()):
            ch = rng.choice(sorted(ch for ch, q in queues.items() if q))
            out.append(Event.recv(ch[1], ch[0], queues[ch].popleft()))
    return tuple(out)


def random_prefix_msc(rng: random.Random, max_nodes: int = 8, n_procs: int = 3) -> PrefixMsc:
    """The chart of a random compliant trace (sends may stay unmatched)."""
    return msc_of(random_trace(rng, max_nodes, n_procs))


def random_lines_msc(rng: random.Random, max_nodes: int = 10, n_procs: int = 3,
                     messages: Sequence[str] = ("a", "b"), attempts: int = 1000) -> PrefixMsc:
    """A prefix MSC assembled line by line through its constructor.

    Events are appended to randomly chosen process lines; a receive only
    consumes the oldest message drawn but not yet received on its channel.
    Unlike :func:`random_prefix_msc` the chart is built from process lines
    rather than from a trace, so it exercises the matching and closure code
    of the constructor.  Rejected candidates are redrawn.
    """
    procs = PROCESS_NAMES[:n_procs]
    for _ in range(attempts):
        n = rng.randint(0, max_nodes)
        lines: Dict[str, List[Event]] = {p: [] for p in procs}
        sent: Dict[Tuple[str, str], List[str]] = {}
        received: Dict[Tuple[str, str], int] = {}
        for _ in range(n):
            p, q = rng.sample(procs, 2)
            ch = (q, p)
            k = received.get(ch, 0)
            # a receive must consume the oldest message not yet received on its channel
            if k < len(sent.get(ch, ())) and rng.random() < 0.5:
                lines[p].append(Event.recv(p, q, sent[ch][k]))
                received[ch] = k + 1
            else:
                m = rng.choice(messages)
                sent.setdefault((p, q), []).append(m)
                lines[p].append(Event.send(p, q, m))
        try:
            return PrefixMsc.from_processes(lines)
        except InvalidMscError:
            continue
    raise RuntimeError("no valid prefix MSC drawn; raise attempts or lower max_nodes")


def random_bmsc(rng: random.Random, max_nodes: int = 6, n_procs: int = 3) -> PrefixMsc:
    """A random complete chart with at most ``max_nodes`` nodes."""
    return msc_of(random_trace(rng, max_nodes, n_procs, complete=True))


def random_hmsc(rng: random.Random, max_vertices: int = 4, max_nodes: int = 4,
                n_procs: int = 3) -> Hmsc:
    """A random HMSC whose vertices are all reachable and completable."""
    n = rng.randint(1, max_vertices)
    names = [f"v{i}" for i in range(n)]
    edges = set()
    for i in range(1, n):
        edges.add((names[rng.randrange(i)], names[i]))
    for _ in range(rng.randint(0, n)):
        edges.add((rng.choice(names), rng.choice(names)))
    has_succ = {a for a, _ in edges}
    terminal = {v for v in names if v not in has_succ}
    terminal |= {v for v in names if rng.random() < 0.3}
    if not terminal:
        terminal.add(names[-1])
    charts = {v: random_bmsc(rng, max_nodes, n_procs) for v in names}
    return Hmsc(names, sorted(edges), names[0], terminal, charts)


def random_global_type(rng: random.Random, max_depth: int = 6, max_branches: int = 3,
                       n_procs: int = 4, messages: Sequence[str] = MESSAGE_NAMES) -> GlobalType:
    """A random valid global type: guarded recursion, distinct variables."""
    procs = PROCESS_NAMES[:n_procs]
    counter = [0]

    def gen(depth: int, scope: Tuple[str, ...], guarded: bool) -> GlobalType:
        options = ["end"]
        if scope and guarded:
            options += ["var"] * 2
        if depth < max_depth:
            options += ["choice"] * 3
            if depth < max_depth - 1:
                options.append("rec")
        kind = rng.choice(options)
        if kind == "end":
            return End()
        if kind == "var":
            return Var(rng.choice(scope))
        if kind == "rec":
            name = f"t{counter[0]}"
            counter[0] += 1
            return Rec(name, gen(depth + 1, scope + (name,), False))
        sender = rng.choice(procs)
        others = [p for p in procs if p != sender]
        labels = [(q, m) for q in others for m in messages]
        k = rng.randint(1, min(max_branches, len(labels)))
        picked = rng.sample(labels, k)
        branches = tuple(Branch(q, m, gen(depth + 1, scope, True)) for q, m in picked)
        return Choice(sender, branches)

    g = gen(0, (), False)
    validate_global_type(g)
    return g
