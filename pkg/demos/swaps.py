"""Swapping adjacent events without anyone noticing.

Two adjacent events can be swapped when no process can tell the
difference: they belong to different processes and do not form a
send/receive pair that must stay ordered.  The swap class of a trace is
exactly the set of schedules of its chart.
"""

from chanrest import are_indistinguishable, format_trace, msc_of, swap_neighbors, trace
from chanrest.indist import equivalence_class

w = trace("P>Q!a R>Q!b Q<P?a Q<R?b")
print("trace:", format_trace(w))
for i, rule, u in swap_neighbors(w):
    print(f"  swap at {i} by {rule.name:9} -> {format_trace(u)}")

cls = equivalence_class(w)
lins = set(msc_of(w).linearizations())
print(f"\nswap class has {len(cls)} traces, the chart has {len(lins)} linearizations, equal: {cls == lins}")

print("\nindistinguishable pairs:")
for a, b in [("P>Q!a R>S!b", "R>S!b P>Q!a"),
             ("P>Q!a P>Q!b", "P>Q!b P>Q!a"),
             ("P>Q!a Q<P?a", "Q<P?a P>Q!a")]:
    print(f"  {a:14} ~ {b:14} {are_indistinguishable(trace(a), trace(b))}")

# a receive may move ahead of a send on its own channel only when an
# earlier message is already waiting there
print("\nP>Q!x P>Q!y Q<P?x neighbours:",
      [format_trace(u) for _, _, u in swap_neighbors(trace("P>Q!x P>Q!y Q<P?x"))])
