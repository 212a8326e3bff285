"""Brute-force reference implementations.

These only look at per-process event lines: matching is recomputed by
counting sends and receives per channel, linearizations are produced by
interleaving the lines, and every property is read straight off its
definition over words.  Nothing here touches the bitmask machinery of the
library, so agreement is a meaningful cross-check.
"""

from __future__ import annotations

from collections import defaultdict
from functools import lru_cache
from typing import Dict, List, Sequence, Tuple

from chanrest.events import Event, Kind


def lines_of(m) -> Dict[str, Tuple[Event, ...]]:
    return {p: m.process_sequence(p) for p in m.processes}


def interleavings(lines: Dict[str, Sequence[Event]]):
    """Every word that interleaves the lines and never receives ahead of its send.

    Receives are matched to sends by position on their channel; a receive of
    the n-th message needs the n-th send to have been emitted already.
    """
    procs = sorted(lines)
    word: List[Event] = []
    pos = {p: 0 for p in procs}
    sent = defaultdict(int)
    recvd = defaultdict(int)

    def rec():
        if all(pos[p] == len(lines[p]) for p in procs):
            yield tuple(word)
            return
        for p in procs:
            if pos[p] == len(lines[p]):
                continue
            e = lines[p][pos[p]]
            ch = e.channel
            if e.kind is Kind.RECV and recvd[ch] >= sent[ch]:
                continue
            counter = sent if e.kind is Kind.SEND else recvd
            counter[ch] += 1
            pos[p] += 1
            word.append(e)
            yield from rec()
            word.pop()
            pos[p] -= 1
            counter[ch] -= 1

    yield from rec()


def all_linearizations(m) -> List[Tuple[Event, ...]]:
    return list(interleavings(lines_of(m)))


def channel_counts(w: Sequence[Event]):
    """Yields the per-channel in-flight counts after every prefix (including the empty one)."""
    count = defaultdict(int)
    yield dict(count)
    for e in w:
        count[e.channel] += 1 if e.kind is Kind.SEND else -1
        yield dict(count)


def half_duplex_word(w: Sequence[Event]) -> bool:
    for count in channel_counts(w):
        for (p, q), n in count.items():
            if n and count.get((q, p), 0):
                return False
    return True


def bounded_word(w: Sequence[Event], bound: int) -> bool:
    return all(n <= bound for count in channel_counts(w) for n in count.values())


def matched_positions(w: Sequence[Event]) -> Dict[int, int]:
    """n-th send to n-th receive per channel, by position in ``w``."""
    sends = defaultdict(list)
    out = {}
    taken = defaultdict(int)
    for i, e in enumerate(w):
        if e.kind is Kind.SEND:
            sends[e.channel].append(i)
        else:
            out[sends[e.channel][taken[e.channel]]] = i
            taken[e.channel] += 1
    return out


def splits_into_exchanges(w: Sequence[Event], k: int) -> bool:
    """Can ``w`` be cut into blocks of at most k sends then at most k receives,
    each matched pair inside one block?"""
    n = len(w)
    partner = matched_positions(w)
    partner.update({r: s for s, r in list(partner.items())})

    def block_ok(i: int, j: int) -> bool:
        kinds = [w[x].kind for x in range(i, j)]
        n_send = 0
        while n_send < len(kinds) and kinds[n_send] is Kind.SEND:
            n_send += 1
        if any(kd is Kind.SEND for kd in kinds[n_send:]):
            return False
        if n_send > k or len(kinds) - n_send > k:
            return False
        return all(i <= partner[x] < j for x in range(i, j) if x in partner)

    @lru_cache(maxsize=None)
    def ok_from(i: int) -> bool:
        if i == n:
            return True
        return any(block_ok(i, j) and ok_from(j) for j in range(i + 1, n + 1))

    return ok_from(0)


def brute_half_duplex(m) -> bool:
    return all(half_duplex_word(w) for w in all_linearizations(m))


def brute_exists_bounded(m, bound: int) -> bool:
    return any(bounded_word(w, bound) for w in all_linearizations(m))


def brute_k_synchronous(m, k: int) -> bool:
    return any(splits_into_exchanges(w, k) for w in all_linearizations(m))


def brute_least_bound(m):
    sends = sum(1 for e in m.labels if e.kind is Kind.SEND)
    for b in range(1, sends + 1):
        if brute_exists_bounded(m, b):
            return b
    return 0


def brute_least_k(m):
    sends = sum(1 for e in m.labels if e.kind is Kind.SEND)
    for k in range(1, max(sends, 1) + 1):
        if brute_k_synchronous(m, k):
            return k
    return None


def projections(w: Sequence[Event]) -> Dict[str, Tuple[Event, ...]]:
    out = defaultdict(list)
    for e in w:
        out[e.actor].append(e)
    return {p: tuple(v) for p, v in out.items()}

