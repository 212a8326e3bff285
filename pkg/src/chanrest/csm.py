"""Communicating state machines over unbounded FIFO channels.

Exploration is breadth-first and bounded twice: by the number of steps
(``depth``) and by the length of every channel (``channel_cap``).  A send
that would overflow a channel is simply not taken; the report says so.

Monitors report one of three verdicts.  Only ``violation`` and
``divergence`` are definitive; ``clean`` means "nothing found within these
bounds" and always carries the bounds.
"""

from __future__ import annotations

import os
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Hashable, Iterable, List, Mapping, Optional, Sequence, Set, Tuple

from . import restrictions
from .errors import DisabledActionError, ResourceLimitError, ValidationError
from .events import Event, Kind, Trace, format_trace, project
from .fsm import Fsm, bounded_language
from .indist import closure
from .msc import PrefixMsc, msc_of

DEFAULT_MAX_STATES = 200_000

Channel = Tuple[str, str]
Step = Tuple[str, Optional[Event]]  # (process, event or None for epsilon)


def default_max_states() -> int:
    value = os.environ.get("CHANREST_MAX_STATES")
    return int(value) if value else DEFAULT_MAX_STATES


@dataclass(frozen=True, order=True)
class Configuration:
    """Local states (aligned with :attr:`Csm.processes`) and the non-empty channels."""

    states: Tuple[Hashable, ...]
    channels: Tuple[Tuple[Channel, Tuple[str, ...]], ...] = ()

    def channel(self, sender: str, receiver: str) -> Tuple[str, ...]:
        for ch, content in self.channels:
            if ch == (sender, receiver):
                return content
        return ()

    def channel_map(self) -> Dict[Channel, Tuple[str, ...]]:
        return dict(self.channels)

    @property
    def channels_empty(self) -> bool:
        return not self.channels

    def with_channel(self, ch: Channel, content: Tuple[str, ...]) -> Tuple[Tuple[Channel, Tuple[str, ...]], ...]:
        d = dict(self.channels)
        if content:
            d[ch] = content
        else:
            d.pop(ch, None)
        return tuple(sorted(d.items()))


class Csm:
    """A family of machines, one per process, communicating through FIFO channels."""

    def __init__(self, machines: Mapping[str, Fsm]):
        if not machines:
            raise ValidationError("a CSM needs at least one machine")
        self.processes: Tuple[str, ...] = tuple(sorted(machines))
        self.machines: Dict[str, Fsm] = {p: machines[p] for p in self.processes}
        for p, a in self.machines.items():
            for src, label, dst in a.transitions:
                if label is None:
                    continue
                if not isinstance(label, Event):
                    raise ValidationError(f"machine {p}: label {label!r} is not an event")
                if label.actor != p:
                    raise ValidationError(f"machine {p} performs {label}, which belongs to {label.actor}")
                if label.peer not in self.machines:
                    raise ValidationError(f"machine {p} talks to unknown process {label.peer}")
        self._index = {p: i for i, p in enumerate(self.processes)}

    def __repr__(self) -> str:
        return f"Csm({', '.join(self.processes)})"

    def initial(self) -> Configuration:
        return Configuration(tuple(self.machines[p].initial for p in self.processes))

    def is_final(self, conf: Configuration) -> bool:
        return conf.channels_empty and all(
            s in self.machines[p].finals for p, s in zip(self.processes, conf.states))

    def successors(self, conf: Configuration) -> List[Tuple[Step, Configuration]]:
        """Every enabled step, in process order then transition order."""
        out = []
        for i, p in enumerate(self.processes):
            for label, dst in self.machines[p].out(conf.states[i]):
                nxt = self._apply(conf, i, label, dst)
                if nxt is not None:
                    out.append(((p, label), nxt))
        return out

    def _apply(self, conf: Configuration, i: int, label: Optional[Event], dst) -> Optional[Configuration]:
        states = conf.states[:i] + (dst,) + conf.states[i + 1:]
        if label is None:
            return Configuration(states, conf.channels)
        ch = label.channel
        content = conf.channel(*ch)
        if label.kind is Kind.SEND:
            return Configuration(states, conf.with_channel(ch, content + (label.msg,)))
        if not content or content[0] != label.msg:
            return None
        return Configuration(states, conf.with_channel(ch, content[1:]))

    def step(self, conf: Configuration, action: Optional[Event], process: Optional[str] = None) -> Configuration:
        """Take ``action`` (or an epsilon move of ``process``).

        With several matching transitions the first declared one is used.
        """
        if action is not None:
            process = action.actor
        if process not in self._index:
            raise DisabledActionError(f"unknown process {process!r}")
        i = self._index[process]
        for label, dst in self.machines[process].out(conf.states[i]):
            if label == action:
                nxt = self._apply(conf, i, label, dst)
                if nxt is not None:
                    return nxt
        what = "epsilon move" if action is None else str(action)
        raise DisabledActionError(f"{what} is not enabled in {describe(self, conf)}")

    def eps_closure(self, confs: Iterable[Configuration]) -> Set[Configuration]:
        seen = set(confs)
        todo = list(seen)
        while todo:
            c = todo.pop()
            for (_, label), nxt in self.successors(c):
                if label is None and nxt not in seen:
                    seen.add(nxt)
                    todo.append(nxt)
        return seen

    def replay(self, w: Sequence[Event]) -> Set[Configuration]:
        """Configurations reachable by ``w`` with epsilon moves interleaved.

        Raises :class:`DisabledActionError` carrying the index of the first
        event that no run can perform.
        """
        current = self.eps_closure([self.initial()])
        for idx, e in enumerate(w):
            nxt = set()
            for conf in current:
                for (_, label), c2 in self.successors(conf):
                    if label == e:
                        nxt.add(c2)
            if not nxt:
                raise DisabledActionError(f"step {idx}: {e} is not enabled", index=idx)
            current = self.eps_closure(nxt)
        return current

    def accepts(self, w: Sequence[Event]) -> bool:
        """Whether ``w`` is a maximal finite trace (ends in a final configuration)."""
        try:
            return any(self.is_final(c) for c in self.replay(w))
        except DisabledActionError:
            return False


def describe(c: Csm, conf: Configuration) -> str:
    states = ", ".join(f"{p}={s}" for p, s in zip(c.processes, conf.states))
    chans = "; ".join(f"{a}->{b}: [{' '.join(m)}]" for (a, b), m in conf.channels)
    return f"({states} | {chans or 'all channels empty'})"


def step(c: Csm, conf: Configuration, action: Optional[Event], process: Optional[str] = None) -> Configuration:
    return c.step(conf, action, process)


def replay(c: Csm, w: Sequence[Event]) -> Set[Configuration]:
    return c.replay(w)


# --- bounded exploration -------------------------------------------------------------

def _step_key(s: Step) -> str:
    p, label = s
    return f"{p}:eps" if label is None else str(label)


def _trace_of(steps: Sequence[Step]) -> Trace:
    return tuple(label for _, label in steps if label is not None)


@dataclass
class ExplorationReport:
    depth: int
    channel_cap: int
    witness: Dict[Configuration, Tuple[Step, ...]]
    finals: List[Configuration]
    deadlocks: List[Configuration]
    frontier: List[Configuration]
    capped: int = 0

    @property
    def configurations(self) -> List[Configuration]:
        return list(self.witness)

    @property
    def truncated(self) -> bool:
        return bool(self.frontier) or self.capped > 0

    def trace_to(self, conf: Configuration) -> Trace:
        return _trace_of(self.witness[conf])

    def final_traces(self) -> List[Trace]:
        return [self.trace_to(c) for c in self.finals]


def _bfs(depth: int, channel_cap: int, max_states: Optional[int], start, succ):
    """Layered BFS; each node keeps its shortest, then lexicographically least, witness."""
    if depth < 0 or channel_cap < 1:
        raise ValueError("depth must be non-negative and channel_cap positive")
    limit = default_max_states() if max_states is None else max_states
    witness = {start: ()}
    layer = [start]
    capped = 0
    frontier = []
    for d in range(depth + 1):
        nxt: Dict = {}
        for node in sorted(layer, key=lambda n: [_step_key(s) for s in witness[n]]):
            moves, n_capped = succ(node)
            capped += n_capped
            if d == depth:
                if moves:
                    frontier.append(node)
                continue
            for s, target in moves:
                if target in witness:
                    continue
                cand = witness[node] + (s,)
                old = nxt.get(target)
                if old is None or [_step_key(x) for x in cand] < [_step_key(x) for x in old]:
                    nxt[target] = cand
        for target, w in nxt.items():
            witness[target] = w
        if len(witness) > limit:
            raise ResourceLimitError(f"more than {limit} states explored")
        layer = list(nxt)
        if not layer:
            break
    return witness, frontier, capped


def _config_succ(c: Csm, channel_cap: int):
    def succ(conf):
        moves = []
        n_capped = 0
        for s, nxt in c.successors(conf):
            if any(len(m) > channel_cap for _, m in nxt.channels):
                n_capped += 1
                continue
            moves.append((s, nxt))
        return moves, n_capped
    return succ


def explore(c: Csm, depth: int, channel_cap: int, max_states: Optional[int] = None) -> ExplorationReport:
    """All configurations within ``depth`` steps and ``channel_cap`` messages per channel."""
    succ = _config_succ(c, channel_cap)
    witness, frontier, capped = _bfs(depth, channel_cap, max_states, c.initial(), succ)
    finals = [x for x in witness if c.is_final(x)]
    deadlocks = [x for x in witness if not c.is_final(x) and not c.successors(x)]
    return ExplorationReport(depth, channel_cap, witness, finals, deadlocks, frontier, capped)


# --- exploration up to trace equivalence ---------------------------------------------

@dataclass(frozen=True)
class _ClassNode:
    """Local states plus per-process projections: identifies the chart of the trace."""

    states: Tuple[Hashable, ...]
    lines: Tuple[Trace, ...]
    conf: Configuration = field(compare=False, hash=False)


def _class_explore(c: Csm, depth: int, channel_cap: int, max_states: Optional[int]):
    base = _config_succ(c, channel_cap)
    index = {p: i for i, p in enumerate(c.processes)}

    def succ(node: _ClassNode):
        moves, n_capped = base(node.conf)
        out = []
        for s, conf in moves:
            p, label = s
            lines = node.lines
            if label is not None:
                i = index[p]
                lines = lines[:i] + (lines[i] + (label,),) + lines[i + 1:]
            out.append((s, _ClassNode(conf.states, lines, conf)))
        return out, n_capped

    init = c.initial()
    start = _ClassNode(init.states, tuple(() for _ in c.processes), init)
    witness, frontier, capped = _bfs(depth, channel_cap, max_states, start, succ)
    return witness, frontier, capped


# --- verdicts ------------------------------------------------------------------------

VIOLATION = "violation"
CLEAN = "clean"
DIVERGENCE = "divergence"


@dataclass(frozen=True)
class Lasso:
    """A reachable cycle on local states that can be repeated forever.

    Every channel the loop receives from has the same content before and
    after the loop, so the loop is enabled again.  ``growing`` channels are
    sent to by the loop, and their receiver can no longer reach any receive
    from them: every message sent there after the stem stays in flight in
    every continuation, not just along the loop.
    """

    stem: Tuple[Step, ...]
    loop: Tuple[Step, ...]
    growing: Tuple[Channel, ...]

    def unroll(self, n: int) -> Trace:
        return _trace_of(self.stem + self.loop * n)

    def as_dict(self) -> dict:
        return {
            "stem": format_trace(_trace_of(self.stem)),
            "loop": format_trace(_trace_of(self.loop)),
            "growing": [f"{a}->{b}" for a, b in self.growing],
        }


@dataclass
class Verdict:
    kind: str
    depth: int
    channel_cap: int
    witness: Optional[Trace] = None
    lasso: Optional[Lasso] = None
    value: Optional[int] = None
    heuristic: List[Tuple[Trace, str]] = field(default_factory=list)
    note: str = ""

    @property
    def status(self) -> str:
        return "bound-qualified" if self.kind == CLEAN else "definitive"

    def as_dict(self) -> dict:
        out = {
            "kind": self.kind,
            "status": self.status,
            "bounds": {"depth": self.depth, "cap": self.channel_cap},
            "value": self.value,
        }
        if self.witness is not None:
            out["witness"] = format_trace(self.witness)
        if self.lasso is not None:
            out["lasso"] = self.lasso.as_dict()
        if self.heuristic:
            out["heuristic"] = [{"prefix": format_trace(w), "finding": f} for w, f in self.heuristic]
        if self.note:
            out["note"] = self.note
        return out


def monitor_half_duplex(c: Csm, depth: int, channel_cap: int, max_states: Optional[int] = None) -> Verdict:
    """Look for a reachable configuration with both directions of a pair non-empty."""
    rep = explore(c, depth, channel_cap, max_states)
    bad = []
    for conf, w in rep.witness.items():
        chans = {ch for ch, _ in conf.channels}
        if any((b, a) in chans for a, b in chans):
            bad.append((len(w), [_step_key(s) for s in w], conf))
    if bad:
        _, _, conf = min(bad, key=lambda x: (x[0], x[1]))
        return Verdict(VIOLATION, depth, channel_cap, witness=rep.trace_to(conf))
    return Verdict(CLEAN, depth, channel_cap)


def find_lasso(c: Csm, depth: int, channel_cap: int, max_states: Optional[int] = None,
               loop_len: Optional[int] = None) -> Optional[Lasso]:
    """Search for a repeatable loop that strictly grows a dead channel.

    From each explored configuration, loops of at most ``loop_len`` steps
    (default ``depth``) are searched; only loops whose concrete replay
    returns to the same local states with unchanged content on every channel
    they receive from, and which send on some channel they never receive
    from, are accepted.
    """
    rep = explore(c, depth, channel_cap, max_states)
    loop_len = depth if loop_len is None else loop_len
    on_cycle = _states_on_cycles(c)
    order = sorted(rep.witness, key=lambda x: (len(rep.witness[x]), [_step_key(s) for s in rep.witness[x]]))
    for start in order:
        # processes that move during the loop must come back, so one of them sits on a cycle
        if not any(s in on_cycle[p] for p, s in zip(c.processes, start.states)):
            continue
        dead = _dead_channels(c, start)
        if not dead:
            continue
        loop = _loop_from(c, start, loop_len, dead)
        if loop is not None:
            steps, growing = loop
            return Lasso(rep.witness[start], steps, growing)
    return None


def _states_on_cycles(c: Csm) -> Dict[str, Set[Hashable]]:
    out = {}
    for p, a in c.machines.items():
        cyc = set()
        for s in a.states:
            seen = set()
            todo = [t for _, t in a.out(s)]
            while todo:
                t = todo.pop()
                if t == s:
                    cyc.add(s)
                    break
                if t not in seen:
                    seen.add(t)
                    todo.extend(u for _, u in a.out(t))
        out[p] = cyc
    return out


def _dead_channels(c: Csm, conf: Configuration) -> FrozenSet[Channel]:
    """Channels whose receiver cannot reach a receive from them any more."""
    dead = set()
    for r, state in zip(c.processes, conf.states):
        a = c.machines[r]
        seen = {state}
        todo = [state]
        live = set()
        while todo:
            q = todo.pop()
            for label, t in a.out(q):
                if label is not None and label.kind is Kind.RECV:
                    live.add(label.peer)
                if t not in seen:
                    seen.add(t)
                    todo.append(t)
        dead.update((s, r) for s in c.processes if s != r and s not in live)
    return frozenset(dead)


def _loop_from(c: Csm, start: Configuration, loop_len: int, dead: FrozenSet[Channel]):
    """Breadth-first search for an accepted loop from ``start`` (channels unbounded)."""
    Key = Tuple[Configuration, FrozenSet[Channel], FrozenSet[Channel]]
    first: Key = (start, frozenset(), frozenset())
    seen = {first}
    layer: List[Tuple[Key, Tuple[Step, ...]]] = [(first, ())]
    start_map = start.channel_map()
    for _ in range(loop_len):
        nxt = []
        for (conf, recv, sent), steps in layer:
            for s, c2 in c.successors(conf):
                _, label = s
                r2, s2 = recv, sent
                if label is not None and label.kind is Kind.RECV:
                    r2 = recv | {label.channel}
                elif label is not None:
                    s2 = sent | {label.channel}
                path = steps + (s,)
                if c2.states == start.states:
                    growing = tuple(sorted((s2 - r2) & dead))
                    m2 = c2.channel_map()
                    if growing and all(m2.get(ch, ()) == start_map.get(ch, ()) for ch in r2):
                        return path, growing
                key = (c2, r2, s2)
                if key not in seen:
                    seen.add(key)
                    nxt.append((key, path))
        layer = nxt
        if not layer:
            break
    return None


def _maximal_classes(c: Csm, depth: int, channel_cap: int, max_states: Optional[int]):
    witness, frontier, capped = _class_explore(c, depth, channel_cap, max_states)
    maximal = [n for n in witness if c.is_final(n.conf)]
    maximal.sort(key=lambda n: (len(witness[n]), [_step_key(s) for s in witness[n]]))
    frontier.sort(key=lambda n: (len(witness[n]), [_step_key(s) for s in witness[n]]))
    return witness, maximal, frontier


def monitor_bound(c: Csm, bound: int, depth: int, channel_cap: int,
                  max_states: Optional[int] = None) -> Verdict:
    """Existential boundedness: divergence certificate, else the worst maximal trace.

    ``value`` is the largest least bound over the explored maximal finite
    traces (0 if none has a send).
    """
    if channel_cap <= bound:
        raise ValueError("channel_cap must exceed the bound")
    lasso = find_lasso(c, depth, channel_cap, max_states)
    if lasso is not None:
        return Verdict(DIVERGENCE, depth, channel_cap, lasso=lasso,
                       note="a channel grows without bound along a repeatable loop")
    witness, maximal, _ = _maximal_classes(c, depth, channel_cap, max_states)
    worst, worst_trace = 0, None
    for n in maximal:
        w = _trace_of(witness[n])
        m = msc_of(w)
        b = restrictions.least_existential_bound(m) if m.n_sends else 0
        if b > worst:
            worst, worst_trace = b, w
    if worst > bound:
        return Verdict(VIOLATION, depth, channel_cap, witness=worst_trace, value=worst)
    return Verdict(CLEAN, depth, channel_cap, value=worst)


def monitor_k_sync(c: Csm, k: int, depth: int, channel_cap: int,
                   max_states: Optional[int] = None) -> Verdict:
    """k-synchronisability of explored maximal traces (exact for those words).

    Frontier prefixes whose chart is not k-synchronous are listed as
    heuristic findings and never turn the verdict into a violation.
    """
    witness, maximal, frontier = _maximal_classes(c, depth, channel_cap, max_states)
    for n in maximal:
        w = _trace_of(witness[n])
        if not restrictions.is_k_synchronous(msc_of(w), k):
            return Verdict(VIOLATION, depth, channel_cap, witness=w)
    heur = []
    for n in frontier:
        w = _trace_of(witness[n])
        if not restrictions.is_k_synchronous(msc_of(w), k):
            heur.append((w, f"prefix is not {k}-synchronous"))
    return Verdict(CLEAN, depth, channel_cap, heuristic=heur)


def least_k_observed(c: Csm, depth: int, channel_cap: int,
                     max_states: Optional[int] = None) -> Verdict:
    """Largest least k over explored maximal traces; violation if one is not synchronisable."""
    witness, maximal, frontier = _maximal_classes(c, depth, channel_cap, max_states)
    worst = 1
    for n in maximal:
        w = _trace_of(witness[n])
        k = restrictions.least_k(msc_of(w))
        if k is None:
            return Verdict(VIOLATION, depth, channel_cap, witness=w,
                           note="maximal trace is not synchronisable for any k")
        worst = max(worst, k)
    heur = []
    for n in frontier:
        w = _trace_of(witness[n])
        if not restrictions.is_k_synchronous(msc_of(w), worst):
            heur.append((w, f"prefix is not {worst}-synchronous"))
    return Verdict(CLEAN, depth, channel_cap, value=worst, heuristic=heur)


@dataclass
class CsmClassification:
    half_duplex: Verdict
    bound: Verdict
    sync: Verdict

    def as_dict(self) -> dict:
        return {
            "half_duplex": self.half_duplex.as_dict(),
            "existential_bound": self.bound.as_dict(),
            "synchronisability": self.sync.as_dict(),
        }


def classify_csm(c: Csm, depth: int, channel_cap: int, max_states: Optional[int] = None) -> CsmClassification:
    """All three monitors; the bound verdict is checked against B = 1."""
    hd = monitor_half_duplex(c, depth, channel_cap, max_states)
    bd = monitor_bound(c, 1, depth, max(channel_cap, 2), max_states)
    sy = least_k_observed(c, depth, channel_cap, max_states)
    return CsmClassification(hd, bd, sy)


# --- traces and languages ------------------------------------------------------------

def traces_up_to(c: Csm, max_len: int, max_states: Optional[int] = None):
    """Every trace of at most ``max_len`` events, with the configurations it can reach.

    Returns a dict trace -> set of configurations (epsilon-closed).
    """
    limit = default_max_states() if max_states is None else max_states
    out: Dict[Trace, Set[Configuration]] = {(): c.eps_closure([c.initial()])}
    layer = dict(out)
    for _ in range(max_len):
        nxt: Dict[Trace, Set[Configuration]] = defaultdict(set)
        for w, confs in layer.items():
            for conf in confs:
                for (_, label), c2 in c.successors(conf):
                    if label is not None:
                        nxt[w + (label,)].add(c2)
        layer = {w: c.eps_closure(cs) for w, cs in nxt.items()}
        out.update(layer)
        if len(out) > limit:
            raise ResourceLimitError(f"more than {limit} traces enumerated")
        if not layer:
            break
    return out


def maximal_traces(c: Csm, max_len: int, max_states: Optional[int] = None) -> Set[Trace]:
    """Traces of at most ``max_len`` events that end in a final configuration."""
    return {w for w, confs in traces_up_to(c, max_len, max_states).items()
            if any(c.is_final(x) for x in confs)}


@dataclass(frozen=True)
class EquivResult:
    agree: bool
    counterexample: Optional[Trace] = None
    side: Optional[str] = None  # which side has the counterexample

    def __bool__(self) -> bool:
        return self.agree

    def as_dict(self) -> dict:
        out = {"agree": self.agree}
        if not self.agree:
            out["counterexample"] = format_trace(self.counterexample)
            out["only_in"] = self.side
        return out


def bounded_equiv(c: Csm, a: Fsm, max_len: int, max_states: Optional[int] = None) -> EquivResult:
    """Compare maximal traces of ``c`` with the swap-closure of ``a``'s words, up to ``max_len``."""
    ours = maximal_traces(c, max_len, max_states)
    theirs = closure(bounded_language(a, max_len))
    diff = [(w, "csm") for w in ours - theirs] + [(w, "automaton") for w in theirs - ours]
    if not diff:
        return EquivResult(True)
    w, side = min(diff, key=lambda x: (len(x[0]), format_trace(x[0])))
    return EquivResult(False, w, side)
