"""End-to-end acceptance checks, one test per criterion.

Each test records a one-line pass/fail summary that is printed at the end
of the pytest run (see ``conftest.py``).  Running this file directly prints
the same lines.
"""

from __future__ import annotations

import random
import sys
import time
from functools import lru_cache

import oracles
from chanrest import corpus
from chanrest.csm import (bounded_equiv, classify_csm, maximal_traces, monitor_bound,
                          monitor_half_duplex, monitor_k_sync)
from chanrest.events import is_channel_compliant
from chanrest.fsm import bounded_language, expand, find_weak_bisimulation
from chanrest.generators import (random_bmsc, random_global_type, random_hmsc, random_lines_msc,
                                 random_prefix_msc, random_trace)
from chanrest.indist import closure, swap_neighbors
from chanrest.msc import msc_of, project_to_csm, satisfies_causal_delivery
from chanrest.mst import build_sync_automaton, embed_hmsc, qopt, type_automaton
from chanrest.restrictions import (classify, is_existentially_B_bounded, is_half_duplex_msc,
                                   is_half_duplex_trace, is_k_synchronous, least_existential_bound,
                                   least_k)

RESULTS = {}


def record(number: int, title: str):
    """Decorator: run the criterion, store a PASS/FAIL line, re-raise failures."""
    def wrap(fn):
        def run(*args, **kwargs):
            start = time.perf_counter()
            try:
                detail = fn(*args, **kwargs)
            except BaseException as exc:
                RESULTS[number] = f"criterion {number:2d} FAIL  {title}: {type(exc).__name__}: {exc}"[:300]
                raise
            took = time.perf_counter() - start
            note = f" ({detail})" if detail else ""
            RESULTS[number] = f"criterion {number:2d} PASS  {title}{note} [{took:.1f}s]"
        run.__name__ = fn.__name__
        run.__doc__ = fn.__doc__
        return run
    return wrap


def summary_lines():
    return [RESULTS[k] for k in sorted(RESULTS)]


def _triple(c):
    return (c.half_duplex, c.least_existential_bound, c.least_k)


@lru_cache(maxsize=None)
def _global_types():
    # types without any message embed with bound 0 (undefined); they are
    # checked separately in test_mst
    rng = random.Random(3)
    out = []
    while len(out) < 200:
        g = random_global_type(rng)
        if any(m.n_sends for m in embed_hmsc(g).bmsc_of.values()):
            out.append(g)
    return tuple(out)


# --- 1 ---------------------------------------------------------------------------------

@record(1, "classification matrix of the corpus charts and the branching HMSC")
def test_criterion_01_classification_matrix():
    expected = {
        "m_cross": (False, 1, 2),
        "m_mixed": (False, 1, None),
        "m_relay": (True, 1, None),
        "m_ring": (True, 1, 3),
    }
    for name, triple in expected.items():
        assert _triple(classify(corpus.load(name))) == triple, name
    ring = corpus.load("m_ring")
    assert not is_k_synchronous(ring, 1) and not is_k_synchronous(ring, 2)
    assert is_k_synchronous(ring, 3)
    assert _triple(corpus.load("h_branch").classify()) == (True, 1, 1)


# --- 2 ---------------------------------------------------------------------------------

@record(2, "global types embed as half-duplex, exists-1-bounded, 1-synchronous")
def test_criterion_02_global_types_restrictions():
    types = _global_types()
    assert len(types) >= 200
    per_chart = {}
    words_checked = 0
    for g in types:
        assert _triple(embed_hmsc(g).classify()) == (True, 1, 1), str(g)
        for w in bounded_language(type_automaton(g), 12):
            for u in [w] + [n for _, _, n in swap_neighbors(w)]:
                assert is_half_duplex_trace(u), (str(g), u)
                key = msc_of(u).canonical()
                if key not in per_chart:
                    m = msc_of(u)
                    per_chart[key] = is_existentially_B_bounded(m, 1) and is_k_synchronous(m, 1)
                assert per_chart[key], (str(g), u)
                words_checked += 1
    return f"{len(types)} types, {words_checked} words and neighbours"


# --- 3 ---------------------------------------------------------------------------------

@record(3, "embedding preserves the language up to swaps; weak bisimulation found")
def test_criterion_03_embedding_language():
    types = _global_types()
    for g in types:
        h = embed_hmsc(g)
        m_g = build_sync_automaton(g)
        q_h = qopt(h)
        assert bounded_language(expand(m_g), 10) == bounded_language(expand(q_h), 10), str(g)
        words = bounded_language(expand(m_g), 10)
        for w in words:
            assert h.member(w, max_len=500).verdict == "yes", (str(g), w)
        short = {w for w in words if len(w) <= 8}
        assert closure(short) == closure(h.words_up_to(8)), str(g)
        assert find_weak_bisimulation(m_g, q_h) is not None, str(g)
    return f"{len(types)} types"


# --- 4 ---------------------------------------------------------------------------------

@record(4, "1-synchronous HMSCs are half-duplex")
def test_criterion_04_one_sync_implies_half_duplex():
    rng = random.Random(4)
    found = 0
    attempts = 0
    while found < 200:
        attempts += 1
        assert attempts < 20000, "generator produced too few 1-synchronous HMSCs"
        h = random_hmsc(rng, max_nodes=8)
        if h.least_k() != 1:
            continue
        found += 1
        assert h.is_half_duplex(), h
    return f"{found} of {attempts} sampled HMSCs were 1-synchronous"


# --- 5 ---------------------------------------------------------------------------------

@record(5, "sampled HMSC words are exists-B-bounded for the HMSC bound")
def test_criterion_05_hmsc_bound():
    rng = random.Random(5)
    done = 0
    traces = 0
    while done < 200:
        h = random_hmsc(rng)
        if not any(m.n_sends for m in h.bmsc_of.values()):
            continue
        bound = h.existential_bound()
        sample = h.language_sample(4, 20, prefixes=False)
        verdict = {}
        for w in sample.complete:
            # a chart is determined by the per-process projections of any linearization
            key = tuple(sorted(oracles.projections(w).items()))
            if key not in verdict:
                verdict[key] = is_existentially_B_bounded(msc_of(w), bound)
            assert verdict[key], (h, w, bound)
            traces += 1
        done += 1
    return f"{done} HMSCs, {traces} complete words"


# --- 6 ---------------------------------------------------------------------------------

@record(6, "single swaps preserve the chart and all three restrictions")
def test_criterion_06_swaps_preserve():
    rng = random.Random(6)
    pairs = 0
    for _ in range(1000):
        w = random_trace(rng, 12)
        m = msc_of(w)
        hd = is_half_duplex_trace(w)
        b = least_existential_bound(m) if m.n_sends else 0
        k = least_k(m)
        for _, _, u in swap_neighbors(w):
            assert is_channel_compliant(u)
            mu = msc_of(u)
            assert mu.isomorphic(m), (w, u)
            assert is_half_duplex_trace(u) == hd, (w, u)
            assert (least_existential_bound(mu) if mu.n_sends else 0) == b, (w, u)
            assert least_k(mu) == k, (w, u)
            pairs += 1
    return f"1000 traces, {pairs} neighbours"


# --- 7 ---------------------------------------------------------------------------------

@record(7, "causal delivery for prefix MSCs and for charts of compliant traces")
def test_criterion_07_causal_delivery():
    rng = random.Random(7)
    for _ in range(500):
        assert satisfies_causal_delivery(random_lines_msc(rng, 10))
    for _ in range(500):
        w = random_trace(rng, 10)
        assert satisfies_causal_delivery(msc_of(w)), w


# --- 8 ---------------------------------------------------------------------------------

@record(8, "cut searches agree with brute force over linearizations")
def test_criterion_08_oracle_equivalence():
    rng = random.Random(8)
    charts = []
    for i in range(1200):
        kind = i % 3
        if kind == 0:
            charts.append(random_prefix_msc(rng, 8, 3))
        elif kind == 1:
            charts.append(random_bmsc(rng, 8, 3))
        else:
            charts.append(random_lines_msc(rng, 8, 3))
    for m in charts:
        assert len(m) <= 8
        assert is_half_duplex_msc(m) == oracles.brute_half_duplex(m), m
        for b in (1, 2, 3):
            assert is_existentially_B_bounded(m, b) == oracles.brute_exists_bounded(m, b), (m, b)
        for k in (1, 2, 3):
            assert is_k_synchronous(m, k) == oracles.brute_k_synchronous(m, k), (m, k)
    return f"{len(charts)} charts"


# --- 9 ---------------------------------------------------------------------------------

@record(9, "flooding CSMs: 1-synchronous yet not existentially bounded")
def test_criterion_09_flood():
    flood = corpus.load("csm_flood")
    half = corpus.load("csm_flood_half")
    v = monitor_half_duplex(flood, 20, 8)
    assert v.kind == "violation" and len(v.witness) == 2
    v = monitor_bound(flood, 1, 20, 8)
    assert v.kind == "divergence"
    assert monitor_k_sync(flood, 1, 20, 8).kind == "clean"
    assert monitor_half_duplex(half, 20, 8).kind == "clean"
    v2 = monitor_bound(half, 1, 20, 8)
    assert v2.kind == "divergence"
    # the certificates unroll into prefixes that need ever larger bounds
    for lasso in (v.lasso, v2.lasso):
        for bound in (1, 2, 3):
            m = msc_of(lasso.unroll(2 * bound + 2))
            assert least_existential_bound(m) > bound


# --- 10 --------------------------------------------------------------------------------

@record(10, "list protocol agrees across CSM, HMSC and global type")
def test_criterion_10_list_protocol():
    c = corpus.load("csm_list")
    g = corpus.load("g_list")
    assert bounded_equiv(c, type_automaton(g), 12).agree
    cc = classify_csm(c, 16, 4)
    assert cc.half_duplex.kind == "clean"
    assert cc.bound.kind == "clean" and cc.bound.value == 1
    assert cc.sync.kind == "clean" and cc.sync.value == 1
    assert _triple(corpus.load("h_list").classify()) == (True, 1, 1)
    assert _triple(embed_hmsc(g).classify()) == (True, 1, 1)
    words = maximal_traces(c, 12)
    for w in words:
        for u in closure({w}):
            assert c.accepts(u), (w, u)
    return f"{len(words)} maximal traces"


# --- 11 --------------------------------------------------------------------------------

@record(11, "projected charts reproduce their classification under the monitors")
def test_criterion_11_projections():
    expect = {
        # name: (half-duplex violation?, bound value, least k or None)
        "m_cross": (True, 1, 2),
        "m_mixed": (True, 1, None),
        "m_relay": (False, 1, None),
    }
    for name, (hd_violation, bound, k) in expect.items():
        c = project_to_csm(corpus.load(name))
        cc = classify_csm(c, 16, 4)
        assert (cc.half_duplex.kind == "violation") == hd_violation, name
        assert cc.bound.kind == "clean" and cc.bound.value == bound, name
        if k is None:
            assert cc.sync.kind == "violation", name
        else:
            assert cc.sync.kind == "clean" and cc.sync.value == k, name


if __name__ == "__main__":  # pragma: no cover
    failures = 0
    for name, fn in sorted(globals().items()):
        if name.startswith("test_criterion_"):
            try:
                fn()
            except BaseException:
                failures += 1
    print("\n".join(summary_lines()))
    sys.exit(1 if failures else 0)
