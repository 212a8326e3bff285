"""Global types and their HMSC embedding.

A global type describes a protocol as synchronous exchanges.  Embedding
it gives an HMSC with one message per vertex, which is half-duplex,
existentially 1-bounded and 1-synchronous.  The type's automaton and the
HMSC's exchange automaton are weakly bisimilar.
"""

from chanrest import (bounded_language, build_sync_automaton, corpus, embed_hmsc, expand,
                      find_weak_bisimulation, format_trace, parse_global_type, qopt)
from chanrest.mst import describe_vertices, type_automaton

g = corpus.load("g_list")
print("type:", g)
m = build_sync_automaton(g)
print(f"synchronous automaton: {len(m.states)} states, {len(m.transitions)} transitions")
for src, label, dst in m.transitions:
    print(f"  {src} --{label}--> {dst}")

h = embed_hmsc(g)
print("\nembedded HMSC vertices:")
for v, term in describe_vertices(g).items():
    print(f"  {v:8} {term}")
print("classification:", h.classify().as_dict())

witness = find_weak_bisimulation(m, qopt(h))
print("weak bisimulation found:", witness is not None)
print("same exchange words up to 6:", bounded_language(expand(m), 6) == bounded_language(expand(qopt(h)), 6))

print("\nasynchronous words of the type up to length 6:")
for w in sorted(bounded_language(type_automaton(g), 6), key=len):
    print("  ", format_trace(w))

indep = corpus.load("g_two_indep")
print("\ntype", indep, "fixes one order of two unrelated exchanges")
print("its words:", [format_trace(w) for w in bounded_language(type_automaton(indep), 4)])
print("its HMSC allows", len(embed_hmsc(indep).words_up_to(4)), "words, every interleaving")

try:
    parse_global_type("P->Q:m.\n")
except Exception as exc:
    print("\nparse errors carry positions:", exc)
