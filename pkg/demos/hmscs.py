"""HMSCs: graphs of charts.

The language of an HMSC is every schedule of every chart obtained by
gluing the charts along a path from the initial vertex to a terminal one.
Membership is decided exactly; the restrictions are checked vertex by
vertex.
"""

from chanrest import corpus, format_trace, trace

h = corpus.load("h_list")
print("list HMSC vertices:", h.vertices)
print("edges:", h.edges)
print("classification:", h.classify().as_dict())

for text in ("P>Q!nil Q<P?nil Q>P!ack P<Q?ack",
             "P>Q!cons P>Q!cons Q<P?cons Q<P?cons P>Q!nil Q<P?nil Q>P!ack P<Q?ack",
             "P>Q!cons P>Q!nil Q<P?cons Q<P?nil Q>P!ack P<Q?ack",
             "P>Q!nil Q<P?nil"):
    print(f"member? {h.member(trace(text), max_len=50).verdict:8} {text}")

print("\nwords of length at most 6:")
for w in sorted(h.words_up_to(6), key=len):
    print("  ", format_trace(w) or "(empty)")

b = corpus.load("h_branch")
print("\nbranching HMSC: the order in which R hears P and Q picks the branch")
print("classification:", b.classify().as_dict())
for path in b.maximal_paths(3):
    print("path", path.vertices, "->", format_trace(next(b.path_msc(path.vertices).linearizations())))

# the list HMSC loops, so paths cut at the length budget contribute prefixes
sample = h.language_sample(3, 6)
print(f"\nlist HMSC, paths of at most 3 vertices: {len(sample.complete)} complete words, "
      f"{len(sample.prefixes)} prefixes of longer runs")
