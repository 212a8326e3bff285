import pytest
from hypothesis import given

import strategies
from chanrest.errors import NotCompliantError, ParseError
from chanrest.events import (Event, Kind, SyncEvent, channel_recv_values, channel_send_values,
                             format_trace, in_flight, is_channel_compliant, is_complete, matching,
                             parse_event, parse_sync_event, parse_trace, prefixes, project, trace)

LIST_WORD = trace("P>Q!nil Q<P?nil Q>P!ack P<Q?ack")
W_CROSS = trace("P>Q!m1 Q>P!m2 Q<P?m1 P<Q?m2")


class TestParsing:
    def test_send_and_receive(self):
        s = parse_event("P>Q!m")
        r = parse_event("Q<P?m")
        assert (s.kind, s.actor, s.peer, s.msg) == (Kind.SEND, "P", "Q", "m")
        assert (r.kind, r.actor, r.peer, r.msg) == (Kind.RECV, "Q", "P", "m")
        assert s.channel == r.channel == ("P", "Q")
        assert s.dual() == r

    def test_sync_event(self):
        e = parse_sync_event("P->Q:m")
        assert str(e) == "P->Q:m"
        assert e.send_event() == parse_event("P>Q!m")
        assert e.recv_event() == parse_event("Q<P?m")

    @pytest.mark.parametrize("bad", ["P>P!m", "P>Q", "P!Q>m", "", "P>Q!", "P->P:m"])
    def test_rejects_malformed(self, bad):
        with pytest.raises((ParseError, ValueError)):
            if "->" in bad:
                parse_sync_event(bad)
            else:
                parse_event(bad)

    def test_round_trip(self):
        assert parse_trace(format_trace(LIST_WORD)) == LIST_WORD

    def test_parse_error_position(self):
        with pytest.raises(ParseError) as info:
            parse_trace("P>Q!m\nQ<P?m bogus", "t.trace")
        assert info.value.line == 2


class TestChannelValues:
    def test_list_word(self):
        assert channel_send_values(LIST_WORD, "P", "Q") == ["nil"]

    def test_empty(self):
        assert channel_send_values((), "P", "Q") == []
        assert channel_recv_values((), "P", "Q") == []

    def test_two_sides(self):
        w = trace("P>Q!a P>Q!b Q<P?a")
        assert channel_send_values(w, "P", "Q") == ["a", "b"]
        assert channel_recv_values(w, "P", "Q") == ["a"]

    @given(strategies.traces())
    def test_against_naive_filter(self, w):
        for e in w:
            p, q = e.channel
            sends = [x.msg for x in w if x.kind is Kind.SEND and x.channel == (p, q)]
            recvs = [x.msg for x in w if x.kind is Kind.RECV and x.channel == (p, q)]
            assert channel_send_values(w, p, q) == sends
            assert channel_recv_values(w, p, q) == recvs


class TestCompliance:
    @pytest.mark.parametrize("w, expected", [
        (LIST_WORD, True),
        ((), True),
        (trace("Q<P?m"), False),
        (trace("P>Q!a Q<P?b"), False),
        (W_CROSS, True),
    ])
    def test_examples(self, w, expected):
        assert is_channel_compliant(w) is expected

    @pytest.mark.parametrize("w, expected", [
        (LIST_WORD, True),
        (trace("P>Q!m"), False),
        (W_CROSS, True),
    ])
    def test_complete(self, w, expected):
        assert is_complete(w) is expected

    def test_complete_rejects_noncompliant(self):
        with pytest.raises(NotCompliantError):
            is_complete(trace("Q<P?m"))

    @given(strategies.traces())
    def test_receive_values_prefix_of_send_values(self, w):
        for u in prefixes(w):
            for e in u:
                p, q = e.channel
                sent = channel_send_values(u, p, q)
                got = channel_recv_values(u, p, q)
                assert sent[:len(got)] == got

    @given(strategies.traces(complete=True))
    def test_generated_complete_traces(self, w):
        assert is_complete(w)
        assert not any(in_flight(w).values())


class TestMatching:
    @pytest.mark.parametrize("w, expected", [
        ("P>Q!m Q<P?m", {0: 1}),
        ("P>Q!a P>Q!b Q<P?a Q<P?b", {0: 2, 1: 3}),
        ("P>Q!a P>Q!b Q<P?a", {0: 2}),
    ])
    def test_examples(self, w, expected):
        assert matching(trace(w)) == expected

    def test_rejects_noncompliant(self):
        with pytest.raises(NotCompliantError):
            matching(trace("Q<P?m"))

    @given(strategies.traces())
    def test_pairs_agree(self, w):
        m = matching(w)
        assert len(set(m.values())) == len(m)
        for i, j in m.items():
            assert i < j
            assert w[i].kind is Kind.SEND and w[j].kind is Kind.RECV
            assert w[i].msg == w[j].msg and w[i].channel == w[j].channel


class TestPrefixes:
    def test_examples(self):
        assert list(prefixes(trace("P>Q!m"))) == [(), trace("P>Q!m")]
        assert list(prefixes(())) == [()]
        assert len(list(prefixes(trace("P>Q!m Q<P?m")))) == 3

    def test_projection(self):
        assert project(LIST_WORD, "Q") == trace("Q<P?nil Q>P!ack")


def test_event_constructors():
    assert Event.send("P", "Q", "m") == parse_event("P>Q!m")
    assert Event.recv("Q", "P", "m") == parse_event("Q<P?m")
    assert isinstance(parse_sync_event("P->Q:m"), SyncEvent)
