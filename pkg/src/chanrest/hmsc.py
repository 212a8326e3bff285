"""High-level message sequence charts.

An HMSC is a directed graph whose vertices carry basic MSCs.  The language
is the union, over maximal initial paths, of the linearizations of the
concatenated charts.  Infinite paths are only ever seen through truncation:
anything that depends on what lies beyond a truncated path is reported as
unknown rather than negative.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Dict, Hashable, Iterable, Iterator, List, Mapping, Optional, Set, Tuple

from . import restrictions
from .errors import ValidationError
from .events import Event, Trace, in_flight, project, require_compliant
from .msc import PrefixMsc, concat, _bits
from .restrictions import Classification

Vertex = Hashable


class Hmsc:
    def __init__(self, vertices: Iterable[Vertex], edges: Iterable[Tuple[Vertex, Vertex]],
                 initial: Vertex, terminal: Iterable[Vertex], bmsc_of: Mapping[Vertex, PrefixMsc]):
        self.vertices: Tuple[Vertex, ...] = tuple(dict.fromkeys(vertices))
        known = set(self.vertices)
        self.edges: Tuple[Tuple[Vertex, Vertex], ...] = tuple(dict.fromkeys(edges))
        for a, b in self.edges:
            if a not in known or b not in known:
                raise ValidationError(f"edge ({a}, {b}) mentions an unknown vertex")
        if initial not in known:
            raise ValidationError(f"initial vertex {initial} is not a vertex")
        self.initial = initial
        self.terminal = frozenset(terminal)
        if not self.terminal <= known:
            raise ValidationError("terminal vertices must be vertices")
        missing = [v for v in self.vertices if v not in bmsc_of]
        if missing:
            raise ValidationError(f"vertices without a chart: {missing}")
        self.bmsc_of: Dict[Vertex, PrefixMsc] = {v: bmsc_of[v] for v in self.vertices}
        self._succ: Dict[Vertex, List[Vertex]] = {v: [] for v in self.vertices}
        for a, b in self.edges:
            self._succ[a].append(b)

    def __repr__(self) -> str:
        return f"Hmsc({len(self.vertices)} vertices, {len(self.edges)} edges, initial={self.initial!r})"

    def successors(self, v: Vertex) -> List[Vertex]:
        return self._succ[v]

    @classmethod
    def single(cls, m: PrefixMsc, name: Vertex = "v") -> "Hmsc":
        """The one-vertex HMSC (initial and terminal) carrying ``m``."""
        return cls([name], [], name, [name], {name: m})

    # -- validation --------------------------------------------------------------

    def reachable(self) -> Set[Vertex]:
        seen = {self.initial}
        todo = [self.initial]
        while todo:
            v = todo.pop()
            for u in self._succ[v]:
                if u not in seen:
                    seen.add(u)
                    todo.append(u)
        return seen

    def _completable(self) -> Set[Vertex]:
        """Vertices from which a maximal path exists (to a terminal or a cycle)."""
        on_cycle = set()
        for v in self.vertices:
            seen = set()
            todo = list(self._succ[v])
            while todo:
                u = todo.pop()
                if u == v:
                    on_cycle.add(v)
                    break
                if u not in seen:
                    seen.add(u)
                    todo.extend(self._succ[u])
        good = set(self.terminal) | on_cycle
        changed = True
        while changed:
            changed = False
            for v in self.vertices:
                if v not in good and any(u in good for u in self._succ[v]):
                    good.add(v)
                    changed = True
        return good

    def validate(self) -> List[str]:
        """Diagnostics for violated assumptions; empty when the HMSC is usable."""
        out = []
        reach = self.reachable()
        for v in self.vertices:
            if v not in reach:
                out.append(f"vertex {v} is unreachable from the initial vertex")
        good = self._completable()
        for v in self.vertices:
            if v not in good:
                out.append(f"vertex {v} cannot be extended to a maximal path")
        for v in self.vertices:
            if not self.bmsc_of[v].is_complete:
                out.append(f"chart of vertex {v} has unmatched sends")
        return out

    # -- paths ---------------------------------------------------------------------

    def maximal_paths(self, max_len: int) -> Iterator["HmscPath"]:
        """Initial paths of at most ``max_len`` vertices.

        Paths ending in a terminal vertex are yielded as complete; paths of
        exactly ``max_len`` vertices that can still be extended are also
        yielded with ``truncated=True``.
        """
        if max_len < 1:
            raise ValueError("max_len must be positive")
        stack = [(self.initial,)]
        while stack:
            path = stack.pop()
            v = path[-1]
            if v in self.terminal:
                yield HmscPath(path, False)
            if len(path) == max_len:
                if self._succ[v]:
                    yield HmscPath(path, True)
                continue
            for u in reversed(self._succ[v]):
                stack.append(path + (u,))

    def path_msc(self, path: Iterable[Vertex]) -> PrefixMsc:
        result = PrefixMsc.empty()
        for v in path:
            result = concat(result, self.bmsc_of[v])
        return result

    # -- membership ----------------------------------------------------------------

    def member(self, w: Trace, max_len: int) -> "Membership":
        """Decide whether the finite word ``w`` is in the language.

        A word is a linearization of a chart iff it is compliant and its
        per-process projections equal the chart's process lines, so the search
        walks paths while consuming each process's projection of ``w``.  The
        state space (vertex, per-process offsets) is finite, which makes a
        negative answer exact.  A word only reachable through paths longer
        than ``max_len`` is reported as unknown.
        """
        require_compliant(w)
        w = tuple(w)
        procs = sorted({e.actor for e in w} | {p for m in self.bmsc_of.values() for p in m.order})
        lines = {p: project(w, p) for p in procs}
        pos = {p: i for i, p in enumerate(procs)}
        goal = tuple(len(lines[p]) for p in procs)
        if in_flight(w):
            return Membership("no", None)

        def advance(offsets, v):
            m = self.bmsc_of[v]
            new = list(offsets)
            for p, nodes in m.order.items():
                k = pos[p]
                seq = m.process_sequence(p)
                if lines[p][new[k]:new[k] + len(seq)] != seq:
                    return None
                new[k] += len(seq)
            return tuple(new)

        start = advance(tuple(0 for _ in procs), self.initial)
        if start is None:
            return Membership("no", None)
        parent = {(self.initial, start): None}
        queue = deque([((self.initial, start), 1)])
        while queue:
            state, length = queue.popleft()
            v, offsets = state
            if v in self.terminal and offsets == goal:
                path = []
                s = state
                while s is not None:
                    path.append(s[0])
                    s = parent[s]
                path.reverse()
                verdict = "yes" if length <= max_len else "unknown"
                return Membership(verdict, tuple(path))
            for u in self._succ[v]:
                nxt = advance(offsets, u)
                if nxt is None or (u, nxt) in parent:
                    continue
                parent[(u, nxt)] = state
                queue.append(((u, nxt), length + 1))
        return Membership("no", None)

    # -- restrictions ----------------------------------------------------------------

    def least_k(self) -> Optional[int]:
        """Max over vertices of the chart's least k; ``None`` if one is not synchronisable."""
        best = 1
        for v in self.vertices:
            k = restrictions.least_k(self.bmsc_of[v])
            if k is None:
                return None
            best = max(best, k)
        return best

    def existential_bound(self) -> int:
        """Max over vertices of the chart's least existential bound.

        Every word of the language has a linearization within this bound
        (schedule each chart completely before the next); it is an upper
        bound on the least bound of the language, not necessarily tight.
        """
        bounds = [restrictions.least_existential_bound(m)
                  for m in self.bmsc_of.values() if m.n_sends]
        if not bounds:
            raise ValueError("existential bound is undefined for an HMSC without sends")
        return max(bounds)

    def is_half_duplex(self) -> bool:
        """Half-duplex iff every vertex chart is.

        The charts are complete, so a message cannot stay in flight across a
        chart boundary (the receiver's line of the earlier chart comes first),
        and opposite in-flight messages must stem from the same chart.
        """
        return all(restrictions.is_half_duplex_msc(m) for m in self.bmsc_of.values())

    def classify(self) -> Classification:
        has_sends = any(m.n_sends for m in self.bmsc_of.values())
        bound = self.existential_bound() if has_sends else 0
        return Classification(self.is_half_duplex(), bound, self.least_k())

    # -- sampling ----------------------------------------------------------------------

    def language_sample(self, max_path_len: int, max_trace_len: int,
                        prefixes: bool = True) -> "LanguageSample":
        """Finite words of the language, plus prefixes of longer behaviour.

        ``complete`` holds every linearization of a terminal path of at most
        ``max_path_len`` vertices whose chart has at most ``max_trace_len``
        nodes.  ``prefixes`` holds every prefix of at most ``max_trace_len``
        events of a linearization of a truncated path (left empty when
        ``prefixes`` is false).
        """
        complete: Set[Trace] = set()
        pref: Set[Trace] = set()
        for path in self.maximal_paths(max_path_len):
            m = self.path_msc(path.vertices)
            if path.truncated:
                if prefixes:
                    pref.update(linearization_prefixes(m, max_trace_len))
            elif len(m) <= max_trace_len:
                complete.update(m.linearizations())
        return LanguageSample(complete, pref)

    def words_up_to(self, max_trace_len: int, max_path_len: Optional[int] = None) -> Set[Trace]:
        """All complete words with at most ``max_trace_len`` events.

        Paths are pruned once their chart exceeds the length budget; charts
        without events can still loop, so ``max_path_len`` (default: enough
        for every path with budgeted events and no repeated empty stretch)
        caps path length.
        """
        if max_path_len is None:
            max_path_len = (max_trace_len + 1) * (len(self.vertices) + 1)
        out: Set[Trace] = set()
        stack = [((self.initial,), self.bmsc_of[self.initial])]
        while stack:
            path, m = stack.pop()
            if len(m) > max_trace_len:
                continue
            if path[-1] in self.terminal:
                out.update(m.linearizations())
            if len(path) == max_path_len:
                continue
            for u in self._succ[path[-1]]:
                stack.append((path + (u,), concat(m, self.bmsc_of[u])))
        return out


@dataclass(frozen=True)
class HmscPath:
    vertices: Tuple[Vertex, ...]
    truncated: bool


@dataclass(frozen=True)
class Membership:
    """``verdict`` is ``"yes"``, ``"no"`` or ``"unknown"``."""

    verdict: str
    path: Optional[Tuple[Vertex, ...]]

    def __bool__(self) -> bool:
        return self.verdict == "yes"


@dataclass
class LanguageSample:
    complete: Set[Trace] = field(default_factory=set)
    prefixes: Set[Trace] = field(default_factory=set)


def linearization_prefixes(m: PrefixMsc, max_len: int) -> Set[Trace]:
    """Every prefix, of length at most ``max_len``, of a linearization of ``m``."""
    n = len(m)
    out: Set[Trace] = set()
    labels = m.labels
    pred = [m.pred_mask(i) for i in range(n)]

    def rec(cut: int, word: Tuple[Event, ...]):
        out.add(word)
        if len(word) == max_len:
            return
        for i in range(n):
            if not cut >> i & 1 and pred[i] & ~cut == 0:
                rec(cut | 1 << i, word + (labels[i],))

    rec(0, ())
    return out


# module-level aliases mirroring the method names

def validate(h: Hmsc) -> List[str]:
    return h.validate()


def maximal_paths(h: Hmsc, max_len: int) -> Iterator[HmscPath]:
    return h.maximal_paths(max_len)


def path_msc(h: Hmsc, path: Iterable[Vertex]) -> PrefixMsc:
    return h.path_msc(path)


def hmsc_member(h: Hmsc, w: Trace, max_len: int) -> Membership:
    return h.member(w, max_len)


def hmsc_least_k(h: Hmsc) -> Optional[int]:
    return h.least_k()


def hmsc_existential_bound(h: Hmsc) -> int:
    return h.existential_bound()


def hmsc_is_half_duplex(h: Hmsc) -> bool:
    return h.is_half_duplex()


def language_sample(h: Hmsc, max_path_len: int, max_trace_len: int,
                    prefixes: bool = True) -> LanguageSample:
    return h.language_sample(max_path_len, max_trace_len, prefixes)
