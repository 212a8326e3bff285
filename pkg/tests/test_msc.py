import random

import pytest
from hypothesis import given, settings

import oracles
import strategies
from chanrest import corpus
from chanrest.csm import maximal_traces, traces_up_to
from chanrest.errors import InvalidMscError, NotCompliantError
from chanrest.events import is_channel_compliant, matching, trace
from chanrest.generators import random_bmsc
from chanrest.msc import (PrefixMsc, concat, concat_all, message, msc_of, project_to_csm,
                          satisfies_causal_delivery)

W_CROSS = trace("P>Q!m1 Q>P!m2 Q<P?m1 P<Q?m2")


class TestConstruction:
    def test_single_pair(self):
        m = msc_of(trace("P>Q!m Q<P?m"))
        assert len(m) == 2
        assert m.match == {0: 1}
        assert m.process_sequence("P") == trace("P>Q!m")
        assert m.process_sequence("Q") == trace("Q<P?m")

    def test_cross(self):
        m = msc_of(W_CROSS)
        assert len(m) == 4 and m.match == {0: 2, 1: 3}
        assert m.happens_before(0, 2) and m.happens_before(1, 3)
        assert m.happens_before(0, 3) and m.happens_before(1, 2)  # per-process order
        assert not m.happens_before(0, 1) and not m.happens_before(1, 0)

    def test_unmatched_sends(self):
        m = msc_of(trace("P>Q!a P>Q!b"))
        assert m.match == {}
        assert m.unmatched_sends() == [0, 1]
        assert not m.is_complete

    def test_noncompliant_rejected(self):
        with pytest.raises(NotCompliantError):
            msc_of(trace("Q<P?m"))

    def test_reflexive(self):
        m = msc_of(W_CROSS)
        assert all(m.happens_before(e, e) for e in m.nodes)

    def test_unknown_node(self):
        with pytest.raises((IndexError, ValueError)):
            msc_of(W_CROSS).happens_before(0, 9)

    @pytest.mark.parametrize("lines", [
        {"P": ["Q?a"], "Q": ["P!b"]},  # label mismatch
        {"P": ["Q?a", "Q!b"], "Q": ["P?b", "P!a"]},  # cyclic order
        {"P": ["Q?a"], "Q": []},  # receive without a send
    ])
    def test_invalid_charts_rejected(self, lines):
        with pytest.raises(InvalidMscError):
            PrefixMsc.from_processes(lines)

    def test_fifo_rename(self):
        # both receive sides see the sends in FIFO order
        m = PrefixMsc.from_processes({"P": ["Q!a", "Q!b"], "Q": ["P?a", "P?b"]})
        assert m.match == {0: 2, 1: 3}
        with pytest.raises(InvalidMscError):
            PrefixMsc.from_processes({"P": ["Q!a", "Q!b"], "Q": ["P?b", "P?a"]})


class TestLinearizations:
    @pytest.mark.parametrize("m, count", [
        (message("P", "Q", "m"), 1),
        (msc_of(W_CROSS), 4),
    ])
    def test_counts(self, m, count):
        assert len(list(m.linearizations())) == count == m.count_linearizations()

    def test_relay_is_a_chain(self, fixtures):
        assert fixtures["m_relay"].count_linearizations() == 1

    @pytest.mark.parametrize("name, count", [("m_cross", 4), ("m_mixed", 26), ("m_relay", 1),
                                             ("m_ring", 48)])
    def test_fixture_counts_against_interleavings(self, fixtures, name, count):
        m = fixtures[name]
        assert set(m.linearizations()) == set(oracles.all_linearizations(m))
        assert m.count_linearizations() == count

    @settings(max_examples=60)
    @given(strategies.line_mscs())
    def test_against_brute_force(self, m):
        words = list(m.linearizations())
        assert len(words) == len(set(words)) == m.count_linearizations()
        assert set(words) == set(oracles.all_linearizations(m))
        for w in words:
            assert is_channel_compliant(w)
            assert msc_of(w) == m

    @given(strategies.traces())
    def test_trace_is_linearization_of_its_chart(self, w):
        m = msc_of(w)
        assert m.is_linearization(w)
        assert m.match == matching(w)


class TestConcat:
    def test_identity(self, fixtures):
        m = fixtures["m_cross"]
        assert concat(m, PrefixMsc.empty()) == m
        assert concat(PrefixMsc.empty(), m) == m

    def test_same_channel(self):
        m = concat(message("P", "Q", "a"), message("P", "Q", "b"))
        words = set(m.linearizations())
        assert trace("P>Q!a Q<P?a P>Q!b Q<P?b") in words
        assert trace("P>Q!a P>Q!b Q<P?a Q<P?b") in words

    def test_independent_processes(self):
        assert concat(message("P", "Q", "m"), message("R", "S", "n")).count_linearizations() == 6

    def test_left_operand_must_be_basic(self):
        with pytest.raises(InvalidMscError):
            concat(msc_of(trace("P>Q!a")), message("P", "Q", "b"))

    @given(strategies.bmscs(4), strategies.bmscs(4), strategies.bmscs(4))
    def test_associative(self, a, b, c):
        assert concat(concat(a, b), c) == concat(a, concat(b, c))
        assert concat_all([a, b, c]) == concat(a, concat(b, c))


class TestCausalDelivery:
    def test_vacuous(self):
        assert satisfies_causal_delivery(PrefixMsc.empty())
        assert satisfies_causal_delivery(msc_of(W_CROSS))

    @given(strategies.traces())
    def test_charts_of_traces(self, w):
        assert satisfies_causal_delivery(msc_of(w))

    @settings(max_examples=60)
    @given(strategies.line_mscs(10))
    def test_charts_built_from_lines(self, m):
        assert satisfies_causal_delivery(m)


def _accepted(c, n):
    # a projection reaches a final configuration only once every line is done
    return maximal_traces(c, n)


class TestProjection:
    def test_single_message(self):
        c = project_to_csm(message("P", "Q", "m"))
        assert len(c.machines["P"].states) == 2 and len(c.machines["P"].transitions) == 1
        assert len(c.machines["Q"].states) == 2 and len(c.machines["Q"].transitions) == 1

    def test_idle_process(self):
        c = project_to_csm(message("P", "Q", "m"), processes=["R"])
        assert list(c.machines["R"].states) == [0] and set(c.machines["R"].finals) == {0}

    @pytest.mark.parametrize("name", ["m_cross", "m_mixed", "m_relay", "m_ring"])
    def test_reproduces_language(self, fixtures, name):
        m = fixtures[name]
        assert _accepted(project_to_csm(m), len(m)) == set(m.linearizations())

    def test_reachable_traces_are_prefixes(self, fixtures):
        m = fixtures["m_cross"]
        prefixes = {w[:i] for w in m.linearizations() for i in range(len(w) + 1)}
        assert set(traces_up_to(project_to_csm(m), 4)) == prefixes

    def test_random_complete_charts(self):
        rng = random.Random(11)
        for _ in range(40):
            m = random_bmsc(rng, 6)
            if not len(m):
                continue
            assert _accepted(project_to_csm(m), len(m)) == set(m.linearizations())
