"""Global types of multiparty session types.

Terms follow the grammar ``0 | P->Q:m.G | (b + b + ...) | mu t. G | t``.  A
term is read into a small AST, validated, and then given three concrete
readings: the synchronous automaton whose expansion is the type language,
the embedding into an HMSC with one message per vertex, and the automaton
obtained back from such an HMSC.  The last two are compared with the first
through weak bisimulation.

Every syntactic occurrence of a subterm gets its own state (and vertex),
except for ``0`` whose occurrences all collapse into a single final state.
States and vertices share names, so relations between the two readings can
be inspected by eye.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple, Union

from .errors import ParseError, ValidationError
from .events import SyncEvent, _IDENT
from .fsm import Fsm, bounded_language, expand, find_weak_bisimulation  # noqa: F401 (re-exported)
from .hmsc import Hmsc
from .msc import PrefixMsc, message

END_STATE = "end"


# --- AST -----------------------------------------------------------------------

@dataclass(frozen=True)
class End:
    def __str__(self) -> str:
        return "0"


@dataclass(frozen=True)
class Branch:
    receiver: str
    msg: str
    cont: "GlobalType"


@dataclass(frozen=True)
class Choice:
    sender: str
    branches: Tuple[Branch, ...]

    def __str__(self) -> str:
        parts = [f"{self.sender}->{b.receiver}:{b.msg}.{b.cont}" for b in self.branches]
        if len(parts) == 1:
            return parts[0]
        return "(" + " + ".join(parts) + ")"


@dataclass(frozen=True)
class Rec:
    var: str
    body: "GlobalType"

    def __str__(self) -> str:
        return f"mu {self.var}. {self.body}"


@dataclass(frozen=True)
class Var:
    name: str

    def __str__(self) -> str:
        return self.name


GlobalType = Union[End, Choice, Rec, Var]


def msg(sender: str, receiver: str, label: str, cont: GlobalType = End()) -> Choice:
    """Single-branch choice ``sender->receiver:label.cont``."""
    return Choice(sender, (Branch(receiver, label, cont),))


# --- parser -------------------------------------------------------------------

_TOKEN_RE = re.compile(rf"\s*(?:(?P<arrow>->)|(?P<punct>[().:+])|(?P<ident>{_IDENT})|(?P<zero>0)|(?P<bad>\S))")


def _tokenize(text: str, source: Optional[str]):
    tokens = []
    pos = 0
    line_starts = [0]
    for i, ch in enumerate(text):
        if ch == "\n":
            line_starts.append(i + 1)

    def where(offset):
        line = max(i for i, s in enumerate(line_starts) if s <= offset)
        return line + 1, offset - line_starts[line] + 1

    # strip comments while keeping offsets intact
    clean = re.sub(r"#[^\n]*", lambda m: " " * len(m.group()), text)
    while pos < len(clean):
        m = _TOKEN_RE.match(clean, pos)
        if not m or m.end() == pos:
            break
        if m.group("bad"):
            line, col = where(m.start("bad"))
            raise ParseError(f"unexpected character {m.group('bad')!r}", line, col, source)
        kind = m.lastgroup
        value = m.group(kind)
        tokens.append((kind, value, where(m.start(kind))))
        pos = m.end()
    tokens.append(("eof", "", where(len(clean))))
    return tokens


class _Parser:
    def __init__(self, text: str, source: Optional[str]):
        self.tokens = _tokenize(text, source)
        self.i = 0
        self.source = source

    def peek(self, ahead: int = 0):
        return self.tokens[min(self.i + ahead, len(self.tokens) - 1)]

    def fail(self, message_: str, tok=None):
        tok = tok or self.peek()
        line, col = tok[2]
        raise ParseError(message_, line, col, self.source)

    def expect(self, value: str):
        tok = self.peek()
        if tok[1] != value:
            self.fail(f"expected {value!r}, found {tok[1] or 'end of input'!r}")
        self.i += 1
        return tok

    def ident(self, what: str) -> str:
        tok = self.peek()
        if tok[0] != "ident":
            self.fail(f"expected {what}, found {tok[1] or 'end of input'!r}")
        self.i += 1
        return tok[1]

    def parse(self) -> GlobalType:
        g = self.term()
        if self.peek()[0] != "eof":
            self.fail(f"unexpected {self.peek()[1]!r} after global type")
        return g

    def term(self) -> GlobalType:
        kind, value, _ = self.peek()
        if kind == "zero":
            self.i += 1
            return End()
        if kind == "ident" and value == "mu":
            self.i += 1
            var = self.ident("recursion variable")
            self.expect(".")
            return Rec(var, self.term())
        if kind == "ident" and self.peek(1)[0] == "arrow":
            return self.message()
        if kind == "ident":
            self.i += 1
            return Var(value)
        if value == "(":
            return self.group()
        self.fail(f"expected a global type, found {value or 'end of input'!r}")

    def message(self) -> Choice:
        start = self.peek()
        sender = self.ident("sender")
        self.expect("->")
        receiver = self.ident("receiver")
        self.expect(":")
        label = self.ident("message")
        cont: GlobalType = End()
        if self.peek()[1] == ".":
            self.i += 1
            cont = self.term()
        if sender == receiver:
            self.fail(f"process {sender} sends to itself", start)
        return msg(sender, receiver, label, cont)

    def group(self) -> GlobalType:
        open_tok = self.expect("(")
        items = [self.term()]
        while self.peek()[1] == "+":
            self.i += 1
            items.append(self.term())
        self.expect(")")
        if len(items) == 1:
            return items[0]
        branches: List[Branch] = []
        sender = None
        for item in items:
            if not isinstance(item, Choice):
                self.fail("every alternative of a choice must start with a message", open_tok)
            if sender is not None and item.sender != sender:
                self.fail(f"a choice has one sender, found {sender} and {item.sender}", open_tok)
            sender = item.sender
            branches.extend(item.branches)
        return Choice(sender, tuple(branches))


def parse_global_type(text: str, source: Optional[str] = None) -> GlobalType:
    """Parse and validate a global type."""
    g = _Parser(text, source).parse()
    validate_global_type(g)
    return g


def validate_global_type(g: GlobalType) -> None:
    """Raise :class:`ValidationError` on unguarded or free variables, rebinding,
    indistinguishable branches or self-sends."""
    bound_names: set = set()

    def walk(t, scope, unguarded):
        if isinstance(t, End):
            return
        if isinstance(t, Var):
            if t.name not in scope:
                raise ValidationError(f"free recursion variable {t.name}")
            if t.name in unguarded:
                raise ValidationError(f"unguarded recursion on {t.name}")
            return
        if isinstance(t, Rec):
            if t.var in bound_names:
                raise ValidationError(f"recursion variable {t.var} is bound twice")
            bound_names.add(t.var)
            walk(t.body, scope | {t.var}, unguarded | {t.var})
            return
        if isinstance(t, Choice):
            if not t.branches:
                raise ValidationError("a choice needs at least one branch")
            seen = set()
            for b in t.branches:
                if b.receiver == t.sender:
                    raise ValidationError(f"process {t.sender} sends to itself in {t}")
                key = (b.receiver, b.msg)
                if key in seen:
                    raise ValidationError(f"branches of {t} are not distinguishable: {b.receiver}, {b.msg}")
                seen.add(key)
                walk(b.cont, scope, frozenset())
            return
        raise TypeError(f"not a global type: {t!r}")

    walk(g, frozenset(), frozenset())


# --- occurrences ------------------------------------------------------------------

@dataclass(frozen=True)
class Occurrence:
    name: str
    term: GlobalType


class _Occurrences:
    """Names every occurrence of a subterm in pre-order; ``0`` is shared."""

    def __init__(self, g: GlobalType):
        self.order: List[Occurrence] = []
        self.children: Dict[str, List[str]] = {}
        self.binder: Dict[str, str] = {}  # var occurrence -> its mu occurrence
        self.has_end = False
        counter = [0]

        def visit(t, scope) -> str:
            if isinstance(t, End):
                if not self.has_end:
                    self.has_end = True
                    self.order.append(Occurrence(END_STATE, t))
                return END_STATE
            name = f"n{counter[0]}"
            counter[0] += 1
            self.order.append(Occurrence(name, t))
            if isinstance(t, Var):
                self.binder[name] = scope[t.name]
                self.children[name] = []
            elif isinstance(t, Rec):
                self.children[name] = [visit(t.body, {**scope, t.var: name})]
            else:
                self.children[name] = [visit(b.cont, scope) for b in t.branches]
            return name

        self.root = visit(g, {})
        self.term = {o.name: o.term for o in self.order}


def build_sync_automaton(g: GlobalType) -> Fsm:
    """The automaton over message exchanges whose expansion gives the type language.

    The single ``0`` state is always present and is the only final state.
    """
    occ = _Occurrences(g)
    states = [o.name for o in occ.order]
    if not occ.has_end:
        states.append(END_STATE)
    transitions = []
    for o in occ.order:
        t = o.term
        if isinstance(t, Choice):
            for b, child in zip(t.branches, occ.children[o.name]):
                transitions.append((o.name, SyncEvent(t.sender, b.receiver, b.msg), child))
        elif isinstance(t, Rec):
            transitions.append((o.name, None, occ.children[o.name][0]))
        elif isinstance(t, Var):
            transitions.append((o.name, None, occ.binder[o.name]))
    return Fsm(states, transitions, occ.root, [END_STATE])


def type_automaton(g: GlobalType) -> Fsm:
    """Expansion of :func:`build_sync_automaton`: accepts the type language."""
    return expand(build_sync_automaton(g))


def type_language(g: GlobalType, max_len: int):
    return bounded_language(type_automaton(g), max_len)


# --- HMSC embedding -----------------------------------------------------------------

def branch_vertex(name: str, j: int) -> str:
    return f"{name}_b{j}"


def embed_hmsc(g: GlobalType) -> Hmsc:
    """HMSC with a vertex per subterm occurrence and per choice branch.

    Branch vertices carry the single message of their branch; all other
    vertices carry the empty chart.  The terminal vertex is ``0`` when it
    occurs in the term.
    """
    occ = _Occurrences(g)
    vertices: List[str] = []
    edges: List[Tuple[str, str]] = []
    bmsc_of: Dict[str, PrefixMsc] = {}
    empty = PrefixMsc.empty()
    for o in occ.order:
        vertices.append(o.name)
        bmsc_of[o.name] = empty
        t = o.term
        if isinstance(t, Rec):
            edges.append((o.name, occ.children[o.name][0]))
        elif isinstance(t, Var):
            edges.append((o.name, occ.binder[o.name]))
        elif isinstance(t, Choice):
            for j, (b, child) in enumerate(zip(t.branches, occ.children[o.name]), start=1):
                bv = branch_vertex(o.name, j)
                vertices.append(bv)
                bmsc_of[bv] = message(t.sender, b.receiver, b.msg)
                edges.append((o.name, bv))
                edges.append((bv, child))
    terminal = [END_STATE] if occ.has_end else []
    return Hmsc(vertices, edges, occ.root, terminal, bmsc_of)


def describe_vertices(g: GlobalType) -> Dict[str, str]:
    """Vertex name to the subterm (or branch) it stands for, for reports."""
    occ = _Occurrences(g)
    out = {}
    for o in occ.order:
        out[o.name] = str(o.term)
        if isinstance(o.term, Choice):
            for j, b in enumerate(o.term.branches, start=1):
                out[branch_vertex(o.name, j)] = f"{o.term.sender}->{b.receiver}:{b.msg}"
    return out


def is_one_hmsc(h: Hmsc) -> bool:
    """Every chart has at most one send and at most one receive."""
    return all(m.n_sends <= 1 and len(m.recv_nodes) <= 1 for m in h.bmsc_of.values())


def _single_exchange(m: PrefixMsc) -> Optional[SyncEvent]:
    """``None`` for the empty chart, the exchange for a single matched pair."""
    if len(m) == 0:
        return None
    if len(m) == 2 and m.n_sends == 1 and m.is_complete:
        s = m.send_nodes[0]
        e = m.labels[s]
        return SyncEvent(e.actor, e.peer, e.msg)
    raise ValidationError(f"chart {m!r} is neither empty nor a single message")


def qopt(h: Hmsc) -> Fsm:
    """Automaton over exchanges read off an HMSC of single-message charts.

    Each vertex ``v`` becomes states ``(v, 1)`` and ``(v, 2)`` joined by the
    vertex's exchange (or an epsilon move for the empty chart); every edge
    ``(v, u)`` becomes an epsilon move from ``(v, 2)`` to ``(u, 1)``.
    """
    if not is_one_hmsc(h):
        raise ValidationError("expected an HMSC whose charts hold at most one message")
    states = []
    transitions = []
    for v in h.vertices:
        states += [(v, 1), (v, 2)]
        transitions.append(((v, 1), _single_exchange(h.bmsc_of[v]), (v, 2)))
    for v, u in h.edges:
        transitions.append(((v, 2), None, (u, 1)))
    return Fsm(states, transitions, (h.initial, 1), [(v, 2) for v in h.terminal])
