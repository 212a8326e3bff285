"""Command-line frontend.

Exit codes: 0 when checks pass (or a classification was produced), 1 when a
violation was found, 2 on input errors, 3 when a resource ceiling was hit.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional

from . import formats, generators, restrictions
from .csm import (Csm, bounded_equiv, classify_csm, explore, maximal_traces, monitor_bound,
                  monitor_half_duplex, monitor_k_sync, describe, default_max_states)
from .errors import ChanrestError, DisabledActionError, ResourceLimitError
from .events import format_trace, parse_trace
from .fsm import bounded_language, find_weak_bisimulation
from .hmsc import Hmsc
from .indist import are_indistinguishable, swap_neighbors
from .msc import PrefixMsc
from .mst import (build_sync_automaton, describe_vertices, embed_hmsc, is_one_hmsc, qopt,
                  type_automaton)

EXIT_OK, EXIT_VIOLATION, EXIT_INPUT, EXIT_RESOURCE = 0, 1, 2, 3


class Outcome:
    def __init__(self, report: Dict[str, Any], code: int = EXIT_OK):
        self.report = report
        self.code = code


# --- helpers ---------------------------------------------------------------------------

def _bounds(args, *names) -> Dict[str, Any]:
    return {n: getattr(args, n) for n in names}


def _msc_classification(m: PrefixMsc) -> Dict[str, Any]:
    c = restrictions.classify(m)
    out: Dict[str, Any] = dict(c.as_dict())
    out["status"] = "definitive"
    if not m.n_sends:
        out["warning"] = "no send events: existential bound undefined, reported as 0"
    witnesses: Dict[str, Any] = {}
    pair = restrictions.half_duplex_violation(m)
    if pair is not None:
        witnesses["half_duplex_violation"] = [str(m.labels[i]) for i in pair]
    if c.least_existential_bound:
        order = restrictions.bounded_linearization(m, c.least_existential_bound)
        witnesses["bounded_linearization"] = format_trace(m.labels[i] for i in order)
    if c.least_k is not None:
        blocks = restrictions.k_exchange_decomposition(m, c.least_k)
        witnesses["exchanges"] = [format_trace(m.labels[i] for i in b.sends + b.recvs) for b in blocks]
    out["witnesses"] = witnesses
    return out


def _hmsc_classification(h: Hmsc) -> Dict[str, Any]:
    diagnostics = h.validate()
    c = h.classify()
    out: Dict[str, Any] = dict(c.as_dict())
    out["status"] = "definitive"
    out["diagnostics"] = diagnostics
    if not c.least_existential_bound:
        out["warning"] = "no send events: existential bound undefined, reported as 0"
    out["note"] = "least_existential_bound is the largest per-vertex bound, an upper bound for the language"
    return out


def _load_trace_arg(value: str):
    path = Path(value)
    if path.suffix == ".trace" or path.exists():
        return formats.load_trace(path)
    return parse_trace(value, "<argument>")


# --- commands -------------------------------------------------------------------------

def cmd_classify(args) -> Outcome:
    obj = formats.load(args.path)
    report: Dict[str, Any] = {"command": "classify", "subject": str(args.path)}
    if isinstance(obj, PrefixMsc):
        report["kind"] = "msc"
        report["classification"] = _msc_classification(obj)
    elif isinstance(obj, Hmsc):
        report["kind"] = "hmsc"
        report["classification"] = _hmsc_classification(obj)
    elif isinstance(obj, Csm):
        report["kind"] = "csm"
        c = classify_csm(obj, args.depth, args.cap, args.max_states)
        report["classification"] = c.as_dict()
        report["bounds_used"] = _bounds(args, "depth", "cap")
    elif isinstance(obj, tuple):
        from . import msc_of
        report["kind"] = "trace"
        report["classification"] = _msc_classification(msc_of(obj))
        report["classification"]["half_duplex_trace"] = restrictions.is_half_duplex_trace(obj)
    else:
        report["kind"] = "global-type"
        report["global_type"] = str(obj)
        report["classification"] = _hmsc_classification(embed_hmsc(obj))
        report["classification"]["via"] = "embedding into an HMSC with one message per vertex"
    return Outcome(report)


def cmd_check(args) -> Outcome:
    obj = formats.load(args.path)
    if not (args.bound or args.sync or args.half_duplex):
        raise _UsageError("check needs at least one of --bound, --sync, --half-duplex")
    results: List[Dict[str, Any]] = []
    if isinstance(obj, tuple):
        from . import msc_of
        obj = msc_of(obj)
    if not isinstance(obj, (PrefixMsc, Hmsc, Csm)):
        obj = embed_hmsc(obj)

    if isinstance(obj, Csm):
        if args.half_duplex:
            v = monitor_half_duplex(obj, args.depth, args.cap, args.max_states)
            results.append({"check": "half-duplex", "holds": v.kind == "clean", **v.as_dict()})
        if args.bound:
            v = monitor_bound(obj, args.bound, args.depth, max(args.cap, args.bound + 1), args.max_states)
            results.append({"check": f"exists-{args.bound}-bounded", "holds": v.kind == "clean", **v.as_dict()})
        if args.sync:
            v = monitor_k_sync(obj, args.sync, args.depth, args.cap, args.max_states)
            results.append({"check": f"{args.sync}-synchronous", "holds": v.kind == "clean", **v.as_dict()})
    else:
        charts = [obj] if isinstance(obj, PrefixMsc) else list(obj.bmsc_of.values())
        if args.half_duplex:
            results.append({"check": "half-duplex", "status": "definitive",
                            "holds": all(restrictions.is_half_duplex_msc(m) for m in charts)})
        if args.bound:
            holds = all(restrictions.is_existentially_B_bounded(m, args.bound) for m in charts)
            results.append({"check": f"exists-{args.bound}-bounded", "status": "definitive", "holds": holds})
        if args.sync:
            holds = all(restrictions.is_k_synchronous(m, args.sync) for m in charts)
            results.append({"check": f"{args.sync}-synchronous", "status": "definitive", "holds": holds})
    report = {"command": "check", "subject": str(args.path), "results": results}
    ok = all(r["holds"] for r in results)
    report["all_hold"] = ok
    return Outcome(report, EXIT_OK if ok else EXIT_VIOLATION)


def cmd_embed(args) -> Outcome:
    g = formats.load_global_type(args.path)
    h = embed_hmsc(g)
    out_dir = Path(args.out) if args.out else Path.cwd()
    name = Path(args.path).stem + "_embedded"
    written = formats.write_hmsc(h, out_dir, name)
    witness = find_weak_bisimulation(build_sync_automaton(g), qopt(h))
    type_words = bounded_language(type_automaton(g), args.len)
    hmsc_words = h.words_up_to(args.len)
    report = {
        "command": "embed",
        "subject": str(args.path),
        "global_type": str(g),
        "written": str(written),
        "vertices": len(h.vertices),
        "vertex_terms": describe_vertices(g),
        "is_one_hmsc": is_one_hmsc(h),
        "weak_bisimulation": "found" if witness is not None else "absent",
        "bounds_used": {"len": args.len},
        "type_words": len(type_words),
        "hmsc_words": len(hmsc_words),
        "inclusion": ("strict" if type_words < hmsc_words else
                      "equal" if type_words == hmsc_words else "violated"),
        "classification": _hmsc_classification(h),
    }
    code = EXIT_OK if witness is not None and type_words <= hmsc_words else EXIT_VIOLATION
    return Outcome(report, code)


def cmd_simulate(args) -> Outcome:
    c = formats.load_csm(args.path)
    report: Dict[str, Any] = {"command": "simulate", "subject": str(args.path)}
    if args.script:
        w = _load_trace_arg(args.script)
        conf = c.initial()
        steps = [{"step": 0, "event": None, "configuration": describe(c, conf)}]
        for i, e in enumerate(w):
            try:
                conf = _step_with_eps(c, conf, e)
            except DisabledActionError as exc:
                report["steps"] = steps
                report["disabled"] = {"index": i, "event": str(e), "message": str(exc)}
                return Outcome(report, EXIT_VIOLATION)
            steps.append({"step": i + 1, "event": str(e), "configuration": describe(c, conf)})
        report["steps"] = steps
        report["final"] = c.is_final(conf)
        return Outcome(report)
    rep = explore(c, args.depth, args.cap, args.max_states)
    report.update({
        "bounds_used": _bounds(args, "depth", "cap"),
        "configurations": len(rep.witness),
        "final_configurations": [{"configuration": describe(c, x), "trace": format_trace(rep.trace_to(x))}
                                 for x in rep.finals],
        "deadlocks": [{"configuration": describe(c, x), "trace": format_trace(rep.trace_to(x))}
                      for x in rep.deadlocks],
        "frontier": len(rep.frontier),
        "capped_sends": rep.capped,
        "status": "bound-qualified" if rep.truncated else "definitive",
    })
    return Outcome(report)


def _step_with_eps(c: Csm, conf, e):
    """Take ``e``, allowing epsilon moves before it (first successful run)."""
    frontier = [conf]
    seen = {conf}
    while frontier:
        cur = frontier.pop(0)
        try:
            return c.step(cur, e)
        except DisabledActionError:
            pass
        for (_, label), nxt in c.successors(cur):
            if label is None and nxt not in seen:
                seen.add(nxt)
                frontier.append(nxt)
    return c.step(conf, e)


def cmd_equiv(args) -> Outcome:
    a = formats.load(args.left)
    b = formats.load(args.right)
    report: Dict[str, Any] = {"command": "equiv", "left": str(args.left), "right": str(args.right),
                              "bounds_used": {"len": args.len}}
    if isinstance(a, Csm) and not isinstance(b, Csm) and not isinstance(b, (PrefixMsc, Hmsc, tuple)):
        r = bounded_equiv(a, type_automaton(b), args.len, args.max_states)
        report.update({"mode": "csm-vs-global-type", "status": "bound-qualified", **r.as_dict()})
        return Outcome(report, EXIT_OK if r.agree else EXIT_VIOLATION)
    if isinstance(a, Csm) and isinstance(b, Csm):
        la, lb = maximal_traces(a, args.len, args.max_states), maximal_traces(b, args.len, args.max_states)
        diff = sorted((la ^ lb), key=lambda w: (len(w), format_trace(w)))
        report.update({"mode": "csm-vs-csm", "status": "bound-qualified", "agree": not diff})
        if diff:
            report["counterexample"] = format_trace(diff[0])
            report["only_in"] = "left" if diff[0] in la else "right"
        return Outcome(report, EXIT_OK if not diff else EXIT_VIOLATION)
    if not isinstance(a, (PrefixMsc, Hmsc, Csm, tuple)) and not isinstance(b, (PrefixMsc, Hmsc, Csm, tuple)):
        witness = find_weak_bisimulation(build_sync_automaton(a), build_sync_automaton(b))
        report.update({"mode": "global-type-vs-global-type", "status": "definitive",
                       "weak_bisimulation": "found" if witness else "absent",
                       "agree": witness is not None})
        return Outcome(report, EXIT_OK if witness else EXIT_VIOLATION)
    raise _UsageError("equiv compares a .csm with a .gt or .csm, or two .gt files")


def cmd_swap(args) -> Outcome:
    w = _load_trace_arg(args.trace)
    neighbors = [{"position": i, "rule": rule.name, "trace": format_trace(u)}
                 for i, rule, u in swap_neighbors(w)]
    return Outcome({"command": "swap", "trace": format_trace(w), "neighbors": neighbors})


def cmd_equiv_trace(args) -> Outcome:
    w = _load_trace_arg(args.left)
    u = _load_trace_arg(args.right)
    result = are_indistinguishable(w, u)
    report = {"command": "equiv-trace", "left": format_trace(w), "right": format_trace(u),
              "indistinguishable": result, "status": "definitive"}
    return Outcome(report, EXIT_OK if result else EXIT_VIOLATION)


def cmd_sample(args) -> Outcome:
    rng = random.Random(args.seed)
    if args.what == "trace":
        text = format_trace(generators.random_trace(rng, args.size)) + "\n"
    elif args.what == "msc":
        text = formats.format_msc(generators.random_bmsc(rng, args.size))
    else:
        text = str(generators.random_global_type(rng)) + "\n"
    return Outcome({"command": "sample", "what": args.what, "seed": args.seed, "text": text})


class _UsageError(ChanrestError):
    pass


# --- output ----------------------------------------------------------------------------

def _render(value: Any, indent: int = 0) -> List[str]:
    pad = "  " * indent
    lines: List[str] = []
    if isinstance(value, dict):
        for k in sorted(value):
            v = value[k]
            if isinstance(v, (dict, list)) and v:
                lines.append(f"{pad}{k}:")
                lines.extend(_render(v, indent + 1))
            else:
                lines.append(f"{pad}{k}: {_scalar(v)}")
    elif isinstance(value, list):
        for v in value:
            if isinstance(v, (dict, list)):
                lines.append(f"{pad}-")
                lines.extend(_render(v, indent + 1))
            else:
                lines.append(f"{pad}- {_scalar(v)}")
    else:
        lines.append(f"{pad}{_scalar(value)}")
    return lines


def _scalar(v: Any) -> str:
    if v is None:
        return "none"
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (dict, list)):
        return "[]" if isinstance(v, list) else "{}"
    return str(v)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="chanrest", description=__doc__.splitlines()[0])
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="print the report as JSON")
    common.add_argument("--depth", type=int, default=16, help="exploration depth for CSMs")
    common.add_argument("--cap", type=int, default=4, help="channel capacity during exploration")
    common.add_argument("--len", type=int, default=8, help="word length bound for language checks")
    common.add_argument("--max-states", type=int, default=None,
                        help="state budget (default: $CHANREST_MAX_STATES or %d)" % default_max_states())
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify", parents=[common], help="classify a chart, HMSC, global type or CSM")
    p.add_argument("path")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("check", parents=[common], help="check given restrictions")
    p.add_argument("path")
    p.add_argument("--bound", type=int, metavar="B", help="existentially B-bounded")
    p.add_argument("--sync", type=int, metavar="k", help="k-synchronous")
    p.add_argument("--half-duplex", action="store_true")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("embed", parents=[common], help="embed a global type into an HMSC")
    p.add_argument("path")
    p.add_argument("--out", help="output directory (default: the current directory)")
    p.set_defaults(func=cmd_embed)

    p = sub.add_parser("simulate", parents=[common], help="explore a CSM or replay a script")
    p.add_argument("path")
    p.add_argument("--script", help="trace file (or inline trace) to replay step by step")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("equiv", parents=[common], help="bounded language comparison")
    p.add_argument("left")
    p.add_argument("right")
    p.set_defaults(func=cmd_equiv)

    p = sub.add_parser("swap", parents=[common], help="list single-swap neighbours of a trace")
    p.add_argument("trace", help="trace file or inline trace")
    p.set_defaults(func=cmd_swap)

    p = sub.add_parser("equiv-trace", parents=[common], help="decide indistinguishability of two traces")
    p.add_argument("left")
    p.add_argument("right")
    p.set_defaults(func=cmd_equiv_trace)

    p = sub.add_parser("sample", parents=[common], help="print a seeded random object")
    p.add_argument("what", choices=["trace", "msc", "gt"])
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--size", type=int, default=8)
    p.set_defaults(func=cmd_sample)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.max_states is None:
        args.max_states = default_max_states()
    try:
        outcome = args.func(args)
    except ResourceLimitError as exc:
        print(f"chanrest: resource limit: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except (ChanrestError, ValueError, OSError) as exc:
        print(f"chanrest: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    if args.json:
        print(json.dumps(outcome.report, indent=2, sort_keys=True))
    elif args.command == "sample":
        sys.stdout.write(outcome.report["text"])
    else:
        print("\n".join(_render(outcome.report)))
    return outcome.code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
