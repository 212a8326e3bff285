"""Monitoring communicating state machines.

A system of machines is explored breadth first up to a depth and a
channel capacity.  Violations come with a replayable witness; a channel
that grows forever comes with a lasso that can be unrolled; a clean
verdict is only as good as the bounds it was checked with.
"""

from chanrest import corpus, format_trace, least_existential_bound, msc_of, project_to_csm
from chanrest.csm import classify_csm, monitor_bound, monitor_half_duplex, monitor_k_sync

flood = corpus.load("csm_flood")
half = corpus.load("csm_flood_half")

v = monitor_half_duplex(flood, 20, 8)
print("flood, half-duplex:", v.kind, v.status, "witness", format_trace(v.witness))
v = monitor_bound(flood, 1, 20, 8)
print("flood, bound 1:", v.kind, v.status)
lasso = v.lasso.as_dict()
print(f"  lasso: stem '{lasso['stem']}', loop '{lasso['loop']}', growing {lasso['growing']}")
for n in (2, 4, 6, 8):
    w = v.lasso.unroll(n)
    print(f"  unrolled {n} times: least bound {least_existential_bound(msc_of(w))}")
v = monitor_k_sync(flood, 1, 20, 8)
print("flood, 1-sync:", v.kind, v.status, v.as_dict()["bounds"])

print("\nflood_half, half-duplex:", monitor_half_duplex(half, 20, 8).kind)
print("flood_half, bound 1:", monitor_bound(half, 1, 20, 8).kind)
print("so a 1-synchronous system need not be existentially bounded")

print("\nprojected corpus charts at depth 16:")
for name in ("m_cross", "m_mixed", "m_relay"):
    cc = classify_csm(project_to_csm(corpus.load(name)), 16, 4)
    print(f"  {name:8} half-duplex {cc.half_duplex.kind:9} bound {cc.bound.value} "
          f"sync {cc.sync.kind} {cc.sync.value}")
