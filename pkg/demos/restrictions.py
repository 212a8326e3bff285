"""The three channel restrictions on the corpus charts.

Half-duplex: no schedule ever has messages in flight in both directions
of a pair.  Existentially B-bounded: some schedule keeps every channel at
most B deep.  k-synchronous: some schedule splits into rounds of at most
k sends followed by their receives.  Each decider returns a witness.
"""

from chanrest import (bounded_linearization, classify, corpus, format_trace, half_duplex_violation,
                      is_k_synchronous, k_exchange_decomposition)

print(f"{'chart':10} {'half-duplex':>11} {'bound':>5} {'least k':>7}")
for name in ("m_cross", "m_mixed", "m_relay", "m_ring"):
    c = classify(corpus.load(name))
    print(f"{name:10} {str(c.half_duplex):>11} {c.least_existential_bound:>5} {str(c.least_k):>7}")

cross = corpus.load("m_cross")
i, j = half_duplex_violation(cross)
print("\nm_cross: sends", cross.labels[i], "and", cross.labels[j], "can be in flight together")
order = bounded_linearization(cross, 1)
print("a schedule with channels at most 1 deep:", format_trace(cross.labels[n] for n in order))
for block in k_exchange_decomposition(cross, 2):
    print("2-exchange:", format_trace(cross.labels[n] for n in block.sends + block.recvs))

ring = corpus.load("m_ring")
print("\nm_ring: 1-sync", is_k_synchronous(ring, 1), "| 2-sync", is_k_synchronous(ring, 2),
      "| 3-sync", is_k_synchronous(ring, 3))
print("all three ring sends must go out before any receive, so one round of three is needed")

relay = corpus.load("m_relay")
print("\nm_relay is half-duplex yet not k-synchronous for any k:",
      classify(relay).least_k is None)
print("its single schedule:", format_trace(next(relay.linearizations())))
