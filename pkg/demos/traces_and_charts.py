"""From traces to charts.

A trace is a word of send and receive events.  Its chart keeps only what
the processes can observe: their own event order, plus which receive
consumed which send.  Different traces with the same chart are just
different schedules of one run.
"""

from chanrest import corpus, format_trace, in_flight, is_channel_compliant, msc_of, trace
from chanrest.msc import concat, satisfies_causal_delivery

w = trace("P>Q!a Q>P!b P<Q?b Q<P?a")
print("trace:", format_trace(w))
print("channel-compliant:", is_channel_compliant(w))
print("in flight after two events:", dict(in_flight(w[:2])))

m = msc_of(w)
print("\nits chart, one line per process:")
print(m)
print("same chart as the corpus file m_cross:", m.isomorphic(corpus.load("m_cross")))

lins = list(m.linearizations())
print(f"\n{len(lins)} schedules produce this chart:")
for u in lins:
    print("  ", format_trace(u))

# a receive that overtakes an earlier send on the same channel breaks FIFO
print("\nP>Q!a P>Q!b Q<P?b compliant?", is_channel_compliant(trace("P>Q!a P>Q!b Q<P?b")))

for name in ("m_mixed", "m_relay", "m_ring"):
    c = corpus.load(name)
    print(f"{name}: linearization count {sum(1 for _ in c.linearizations())}, "
          f"causal delivery {satisfies_causal_delivery(c)}")

both = concat(m, corpus.load("m_relay"))
print("\nconcatenating m_cross and m_relay gives a chart with", len(both), "events")
