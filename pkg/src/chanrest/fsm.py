"""Finite state machines with epsilon moves.

The same shape serves for process machines of a CSM (letters are
:class:`~chanrest.events.Event`), for global-type automata (letters are
:class:`~chanrest.events.SyncEvent`) and for their expansions.  ``None`` is
the epsilon label.
"""

from __future__ import annotations

from collections import defaultdict, deque
from dataclasses import dataclass
from typing import Dict, FrozenSet, Hashable, Iterable, List, Optional, Set, Tuple

State = Hashable
Transition = Tuple[State, Optional[Hashable], State]


class Fsm:
    """``(states, transitions, initial, finals)``; ``None`` labels are epsilon."""

    def __init__(self, states: Iterable[State], transitions: Iterable[Transition],
                 initial: State, finals: Iterable[State]):
        self.states: Tuple[State, ...] = tuple(dict.fromkeys(states))
        known = set(self.states)
        if initial not in known:
            raise ValueError(f"initial state {initial!r} is not a state")
        self.initial = initial
        self.finals: FrozenSet[State] = frozenset(finals)
        if not self.finals <= known:
            raise ValueError(f"unknown final states: {sorted(map(repr, self.finals - known))}")
        self.transitions: Tuple[Transition, ...] = tuple(dict.fromkeys(transitions))
        self._out: Dict[State, List[Tuple[Optional[Hashable], State]]] = defaultdict(list)
        for src, label, dst in self.transitions:
            if src not in known or dst not in known:
                raise ValueError(f"transition ({src!r}, {label!r}, {dst!r}) uses an unknown state")
            self._out[src].append((label, dst))
        self._closure: Dict[State, FrozenSet[State]] = {}

    def __repr__(self) -> str:
        return (f"Fsm({len(self.states)} states, {len(self.transitions)} transitions, "
                f"initial={self.initial!r})")

    def out(self, state: State) -> List[Tuple[Optional[Hashable], State]]:
        return self._out.get(state, [])

    @property
    def alphabet(self) -> Set[Hashable]:
        return {label for _, label, _ in self.transitions if label is not None}

    def eps_closure(self, state: State) -> FrozenSet[State]:
        cached = self._closure.get(state)
        if cached is not None:
            return cached
        seen = {state}
        todo = [state]
        while todo:
            s = todo.pop()
            for label, t in self.out(s):
                if label is None and t not in seen:
                    seen.add(t)
                    todo.append(t)
        result = frozenset(seen)
        self._closure[state] = result
        return result

    def close(self, states: Iterable[State]) -> FrozenSet[State]:
        out: Set[State] = set()
        for s in states:
            out |= self.eps_closure(s)
        return frozenset(out)

    def step(self, states: Iterable[State], letter: Hashable) -> FrozenSet[State]:
        """Epsilon-closed successors of ``states`` under ``letter``."""
        nxt = {t for s in states for label, t in self.out(s) if label == letter}
        return self.close(nxt)

    def weak_successors(self, state: State, letter: Optional[Hashable]) -> FrozenSet[State]:
        """States reachable by ``eps* letter eps*`` (or ``eps*`` for ``None``)."""
        start = self.eps_closure(state)
        if letter is None:
            return start
        return self.step(start, letter)

    def reachable(self) -> FrozenSet[State]:
        seen = {self.initial}
        todo = [self.initial]
        while todo:
            s = todo.pop()
            for _, t in self.out(s):
                if t not in seen:
                    seen.add(t)
                    todo.append(t)
        return frozenset(seen)

    def accepts(self, word: Iterable[Hashable]) -> bool:
        current = self.eps_closure(self.initial)
        for letter in word:
            current = self.step(current, letter)
            if not current:
                return False
        return bool(current & self.finals)


def bounded_language(a: Fsm, max_len: int) -> Set[tuple]:
    """All accepted words with at most ``max_len`` letters (epsilon is free)."""
    result: Set[tuple] = set()
    layer: Dict[tuple, FrozenSet[State]] = {(): a.eps_closure(a.initial)}
    for length in range(max_len + 1):
        nxt: Dict[tuple, Set[State]] = defaultdict(set)
        for word, states in layer.items():
            if states & a.finals:
                result.add(word)
            if length == max_len:
                continue
            for s in states:
                for label, t in a.out(s):
                    if label is not None:
                        nxt[word + (label,)] |= a.eps_closure(t)
        layer = {w: frozenset(s) for w, s in nxt.items()}
    return result


def expand(a: Fsm) -> Fsm:
    """Split every ``P->Q:m`` transition into ``P>Q!m`` then ``Q<P?m``.

    The intermediate state of transition ``(s, x, t)`` is the triple itself.
    """
    states = list(a.states)
    transitions: List[Transition] = []
    for src, label, dst in a.transitions:
        if label is None:
            transitions.append((src, None, dst))
            continue
        mid = (src, label, dst)
        states.append(mid)
        transitions.append((src, label.send_event(), mid))
        transitions.append((mid, label.recv_event(), dst))
    return Fsm(states, transitions, a.initial, a.finals)


# --- weak simulation / bisimulation -------------------------------------------

@dataclass(frozen=True)
class WeakBisimWitness:
    """A pair of weak simulations, ``r1`` of A by B and ``r2`` of B by A."""

    r1: FrozenSet[Tuple[State, State]]
    r2: FrozenSet[Tuple[State, State]]


def greatest_weak_simulation(a: Fsm, b: Fsm) -> FrozenSet[Tuple[State, State]]:
    """Largest relation R with: every move of the A-side is weakly matched by
    the B-side into an R-related pair, and a final A-state is related only to
    B-states that can reach a final state by epsilon moves.
    """
    a_states = a.reachable()
    b_states = b.reachable()
    relation = {
        (p, q) for p in a_states for q in b_states
        if p not in a.finals or b.eps_closure(q) & b.finals
    }
    weak: Dict[Tuple[State, Optional[Hashable]], FrozenSet[State]] = {}

    def b_weak(q, label):
        key = (q, label)
        if key not in weak:
            weak[key] = b.weak_successors(q, label)
        return weak[key]

    # the greatest fixpoint is unique, so iteration order does not matter
    changed = True
    while changed:
        changed = False
        for p, q in list(relation):
            if (p, q) not in relation:
                continue
            for label, p2 in a.out(p):
                if not any((p2, q2) in relation for q2 in b_weak(q, label)):
                    relation.discard((p, q))
                    changed = True
                    break
    return frozenset(relation)


def find_weak_bisimulation(a: Fsm, b: Fsm) -> Optional[WeakBisimWitness]:
    """Weak simulations in both directions relating the initial states.

    Besides relating the initial states, every reachable final state of
    either machine must be related to some final state of the other.
    Returns ``None`` if no such pair of relations exists.
    """
    r1 = greatest_weak_simulation(a, b)
    r2 = greatest_weak_simulation(b, a)
    if (a.initial, b.initial) not in r1 or (b.initial, a.initial) not in r2:
        return None
    for fa in a.finals & a.reachable():
        if not any((fa, fb) in r1 for fb in b.finals):
            return None
    for fb in b.finals & b.reachable():
        if not any((fb, fa) in r2 for fa in a.finals):
            return None
    return WeakBisimWitness(r1, r2)


def check_weak_simulation(a: Fsm, b: Fsm, relation: Iterable[Tuple[State, State]]) -> bool:
    """Independently verify that ``relation`` is a weak simulation of A by B."""
    rel = set(relation)
    for p, q in rel:
        if p in a.finals and not (b.eps_closure(q) & b.finals):
            return False
        for label, p2 in a.out(p):
            if not any((p2, q2) in rel for q2 in b.weak_successors(q, label)):
                return False
    return True
