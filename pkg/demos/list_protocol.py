"""One protocol in three formalisms.

P streams list elements to Q, ends with nil, and Q acknowledges.  The
global type, the HMSC and the state machines all describe it; the
machines accept exactly the type's words up to a length, all three are
classified the same, and every schedule of an accepted run is accepted.
"""

from chanrest import bounded_equiv, classify_csm, closure, corpus, embed_hmsc, format_trace, maximal_traces
from chanrest.mst import type_automaton

g = corpus.load("g_list")
h = corpus.load("h_list")
c = corpus.load("csm_list")

r = bounded_equiv(c, type_automaton(g), 12)
print("machines and type agree on words up to 12:", r.agree)

print("type (embedded):", embed_hmsc(g).classify().as_dict())
print("HMSC:           ", h.classify().as_dict())
cc = classify_csm(c, 16, 4)
print("machines:        half-duplex", cc.half_duplex.kind, "| bound", cc.bound.value,
      "| least k", cc.sync.value, f"(depth {cc.sync.depth}, cap {cc.sync.channel_cap})")

words = maximal_traces(c, 12)
closed = all(c.accepts(u) for w in words for u in closure({w}))
print(f"\n{len(words)} complete runs up to 12 events; closed under swaps: {closed}")
for w in sorted(words, key=len)[:3]:
    print("  ", format_trace(w))
