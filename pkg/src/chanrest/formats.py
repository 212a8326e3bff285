"""Text formats for charts, HMSCs, CSMs, global types and traces.

All formats are line based and treat ``#`` as the start of a comment.

``.msc``::

    process P: Q!a Q?b
    process Q: P!b P?a

``.hmsc`` (charts live in ``<name>.msc`` next to the file; ``empty`` is the
empty chart)::

    vertex v0 = empty
    vertex v1 = cons
    edge v0 v1
    initial v0
    terminal v1

``.csm``::

    machine P
    state p0 initial
    state p1 final
    trans p0 P>Q!m p1
    trans p1 eps p0

``.gt`` holds a single global type; ``.trace`` holds whitespace-separated
events.
"""

from __future__ import annotations

import os
import re
from pathlib import Path
from typing import Callable, Dict, List, Optional, Tuple, Union

from .csm import Csm
from .errors import ParseError, ValidationError
from .events import Event, parse_event, parse_trace, format_trace, Trace
from .fsm import Fsm
from .hmsc import Hmsc
from .mst import GlobalType, parse_global_type
from .msc import PrefixMsc, short_event

PathLike = Union[str, os.PathLike]


def _lines(text: str):
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield lineno, line, raw


def _cols(raw: str) -> List[int]:
    """1-based start columns of the whitespace-separated words of ``raw``."""
    return [m.start() + 1 for m in re.finditer(r"\S+", raw.split("#", 1)[0])]


# --- .msc ----------------------------------------------------------------------------

def parse_msc(text: str, source: Optional[str] = None) -> PrefixMsc:
    lines_by_process: Dict[str, List[Event]] = {}
    for lineno, line, raw in _lines(text):
        head, sep, rest = line.partition(":")
        words = head.split()
        if not sep or len(words) != 2 or words[0] != "process":
            raise ParseError("expected 'process <name>: <events>'", lineno, 1, source)
        p = words[1]
        if p in lines_by_process:
            raise ParseError(f"process {p} declared twice", lineno, _cols(raw)[1], source)
        events = []
        offset = raw.index(":") + 1
        for match in re.finditer(r"\S+", raw.split("#", 1)[0][offset:]):
            try:
                events.append(short_event(p, match.group()))
            except (ParseError, ValueError) as exc:
                raise ParseError(str(exc), lineno, offset + match.start() + 1, source) from None
        lines_by_process[p] = events
    try:
        return PrefixMsc.from_processes(lines_by_process)
    except ValueError as exc:
        raise ValidationError(f"{source or '<msc>'}: {exc}") from None


def format_msc(m: PrefixMsc) -> str:
    out = []
    for p in m.processes:
        tokens = [f"{e.peer}{'!' if e.is_send else '?'}{e.msg}" for e in m.process_sequence(p)]
        out.append(f"process {p}: {' '.join(tokens)}".rstrip())
    return "\n".join(out) + "\n"


# --- .hmsc -------------------------------------------------------------------------

Resolver = Callable[[str], PrefixMsc]


def parse_hmsc(text: str, resolve: Resolver, source: Optional[str] = None) -> Hmsc:
    """Parse an HMSC; ``resolve`` maps chart names to charts."""
    vertices: List[str] = []
    charts: Dict[str, PrefixMsc] = {}
    edges: List[Tuple[str, str]] = []
    initial = None
    terminal: List[str] = []
    for lineno, line, raw in _lines(text):
        words = line.split()
        key = words[0]
        if key == "vertex":
            if len(words) != 4 or words[2] != "=":
                raise ParseError("expected 'vertex <name> = <chart>'", lineno, 1, source)
            name, chart = words[1], words[3]
            if name in charts:
                raise ParseError(f"vertex {name} declared twice", lineno, _cols(raw)[1], source)
            vertices.append(name)
            charts[name] = PrefixMsc.empty() if chart == "empty" else resolve(chart)
        elif key == "edge":
            if len(words) != 3:
                raise ParseError("expected 'edge <from> <to>'", lineno, 1, source)
            edges.append((words[1], words[2]))
        elif key == "initial":
            if len(words) != 2 or initial is not None:
                raise ParseError("expected exactly one 'initial <vertex>'", lineno, 1, source)
            initial = words[1]
        elif key == "terminal":
            terminal.extend(words[1:])
        else:
            raise ParseError(f"unknown directive {key!r}", lineno, _cols(raw)[0], source)
    if initial is None:
        raise ValidationError(f"{source or '<hmsc>'}: no initial vertex")
    return Hmsc(vertices, edges, initial, terminal, charts)


def format_hmsc(h: Hmsc, chart_names: Dict[str, str]) -> str:
    """``chart_names`` maps each vertex to its chart file stem (or ``empty``)."""
    out = [f"vertex {v} = {chart_names[v]}" for v in h.vertices]
    out += [f"edge {a} {b}" for a, b in h.edges]
    out.append(f"initial {h.initial}")
    if h.terminal:
        out.append("terminal " + " ".join(v for v in h.vertices if v in h.terminal))
    return "\n".join(out) + "\n"


def write_hmsc(h: Hmsc, directory: PathLike, name: str) -> Path:
    """Write ``name.hmsc`` plus one ``.msc`` file per non-empty chart."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    names = {}
    for v in h.vertices:
        m = h.bmsc_of[v]
        if len(m) == 0:
            names[v] = "empty"
        else:
            names[v] = f"{name}_{v}"
            (directory / f"{names[v]}.msc").write_text(format_msc(m))
    path = directory / f"{name}.hmsc"
    path.write_text(format_hmsc(h, names))
    return path


# --- .csm --------------------------------------------------------------------------

def parse_csm(text: str, source: Optional[str] = None) -> Csm:
    machines: Dict[str, dict] = {}
    current = None
    for lineno, line, raw in _lines(text):
        words = line.split()
        key = words[0]
        if key == "machine":
            if len(words) != 2:
                raise ParseError("expected 'machine <process>'", lineno, 1, source)
            current = words[1]
            if current in machines:
                raise ParseError(f"machine {current} declared twice", lineno, _cols(raw)[1], source)
            machines[current] = {"states": [], "initial": None, "finals": [], "trans": []}
            continue
        if current is None:
            raise ParseError("declarations must follow a 'machine' line", lineno, 1, source)
        mach = machines[current]
        if key == "state":
            if len(words) < 2:
                raise ParseError("expected 'state <name> [initial] [final]'", lineno, 1, source)
            name = words[1]
            cols = _cols(raw)
            for flag, col in zip(words[2:], cols[2:]):
                if flag == "initial":
                    if mach["initial"] is not None:
                        raise ParseError(f"machine {current} has two initial states", lineno, col, source)
                    mach["initial"] = name
                elif flag == "final":
                    mach["finals"].append(name)
                else:
                    raise ParseError(f"unknown state flag {flag!r}", lineno, col, source)
            mach["states"].append(name)
        elif key == "trans":
            if len(words) != 4:
                raise ParseError("expected 'trans <from> <event|eps> <to>'", lineno, 1, source)
            label = None
            if words[2] != "eps":
                try:
                    label = parse_event(words[2])
                except (ParseError, ValueError) as exc:
                    raise ParseError(str(exc), lineno, _cols(raw)[2], source) from None
            cols = _cols(raw)
            for s, col in ((words[1], cols[1]), (words[3], cols[3])):
                if s not in mach["states"]:
                    raise ParseError(f"unknown state {s!r}", lineno, col, source)
            mach["trans"].append((words[1], label, words[3]))
        else:
            raise ParseError(f"unknown directive {key!r}", lineno, _cols(raw)[0], source)
    fsms = {}
    for p, mach in machines.items():
        if mach["initial"] is None:
            raise ValidationError(f"{source or '<csm>'}: machine {p} has no initial state")
        fsms[p] = Fsm(mach["states"], mach["trans"], mach["initial"], mach["finals"])
    return Csm(fsms)


def format_csm(c: Csm) -> str:
    out = []
    for p in c.processes:
        a = c.machines[p]
        out.append(f"machine {p}")
        for s in a.states:
            flags = (" initial" if s == a.initial else "") + (" final" if s in a.finals else "")
            out.append(f"state {s}{flags}")
        for src, label, dst in a.transitions:
            out.append(f"trans {src} {'eps' if label is None else label} {dst}")
    return "\n".join(out) + "\n"


# --- files -------------------------------------------------------------------------

def load_msc(path: PathLike) -> PrefixMsc:
    path = Path(path)
    return parse_msc(path.read_text(), str(path))


def load_hmsc(path: PathLike) -> Hmsc:
    path = Path(path)

    def resolve(name: str) -> PrefixMsc:
        target = path.parent / f"{name}.msc"
        if not target.exists():
            raise ValidationError(f"{path}: chart file {target.name} not found")
        return load_msc(target)

    return parse_hmsc(path.read_text(), resolve, str(path))


def load_csm(path: PathLike) -> Csm:
    path = Path(path)
    return parse_csm(path.read_text(), str(path))


def load_global_type(path: PathLike) -> GlobalType:
    path = Path(path)
    return parse_global_type(path.read_text(), str(path))


def load_trace(path: PathLike) -> Trace:
    path = Path(path)
    return parse_trace(path.read_text(), str(path))


LOADERS = {
    ".msc": load_msc,
    ".hmsc": load_hmsc,
    ".csm": load_csm,
    ".gt": load_global_type,
    ".trace": load_trace,
}


def load(path: PathLike):
    """Load any supported file, dispatching on its suffix."""
    suffix = Path(path).suffix
    if suffix not in LOADERS:
        raise ValidationError(f"{path}: unsupported file type {suffix!r}")
    return LOADERS[suffix](path)


__all__ = [
    "parse_msc", "format_msc", "parse_hmsc", "format_hmsc", "write_hmsc",
    "parse_csm", "format_csm", "load_msc", "load_hmsc", "load_csm",
    "load_global_type", "load_trace", "load", "format_trace",
]
