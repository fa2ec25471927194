import io

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import ev
from oracles import maximal_runs
from nextcmd import cleanse
from nextcmd.cleanse import TokenStream, compress_runs, deduplicate, filter_event_types, tokenize
from nextcmd.events import Session, Token


def session(*events):
    return Session("s", tuple(events))


def stream(*bases):
    return TokenStream("s", tuple(Token(b) for b in bases))


class TestFilter:
    def test_keeps_developer_induced(self):
        s = session(ev("s", 0, "CommandEvent"), ev("s", 1, "SystemEvent"), ev("s", 2, "BuildEvent"))
        assert [e.event_type for e in filter_event_types(s).events] == ["CommandEvent", "BuildEvent"]

    def test_all_excluded_and_empty(self):
        s = session(*[ev("s", i, "ActivityEvent") for i in range(3)])
        assert len(filter_event_types(s)) == 0
        assert len(filter_event_types(session())) == 0

    def test_unknown_removed_and_counted(self):
        s = session(ev("s", 0, "Mystery"), ev("s", 1, "InfoEvent"), ev("s", 2, "EditEvent"))
        out = cleanse.cleanse_sessions([s])
        assert out.removed_by_filter == 2
        assert out.removed_unknown == 1


class TestDeduplicate:
    def test_same_ms_same_type(self):
        s = session(ev("s", 0, "CommandEvent", "Copy"), ev("s", 0, "CommandEvent", "Copy"))
        assert len(deduplicate(s)) == 1

    def test_key_differs(self):
        assert len(deduplicate(session(ev("s", 0, "CommandEvent"), ev("s", 0, "BuildEvent")))) == 2
        assert len(deduplicate(session(ev("s", 0, "CommandEvent"), ev("s", 1, "CommandEvent")))) == 2

    def test_descriptor_not_in_key_first_wins(self):
        s = session(ev("s", 0, "CommandEvent", "Copy"), ev("s", 0, "CommandEvent", "Paste"))
        (kept,) = deduplicate(s).events
        assert kept.descriptor == "Copy"

    @given(st.lists(st.tuples(st.integers(0, 4), st.sampled_from(["EditEvent", "BuildEvent"])),
                    max_size=30))
    def test_idempotent_and_order_preserving(self, spec):
        s = session(*[ev("s", ms, t, str(i)) for i, (ms, t) in enumerate(sorted(spec))])
        once = deduplicate(s)
        assert deduplicate(once) == once
        positions = [s.events.index(e) for e in once.events]
        assert positions == sorted(positions)


class TestTokenize:
    @pytest.mark.parametrize("etype,desc,expected", [
        ("CommandEvent", "Refresh", "CommandEvent-Refresh"),
        ("WindowEvent", "Move", "WindowEvent-Move"),
        ("BuildEvent", None, "BuildEvent"),
        ("CommandEvent", "Go To Definition", "CommandEvent-Go_To_Definition"),
    ])
    def test_rendering(self, etype, desc, expected):
        (tok,) = tokenize(session(ev("s", 0, etype, desc))).tokens
        assert tok.render() == expected
        assert not tok.repeated


class TestCompressRuns:
    def test_examples(self):
        assert compress_runs(stream("C", "C", "C")).rendered() == ["C+"]
        assert compress_runs(stream("C")).rendered() == ["C"]
        assert compress_runs(stream("A", "A", "B", "A")).rendered() == ["A+", "B", "A"]

    def test_distinct_descriptors_do_not_merge(self):
        ts = stream("CommandEvent-Copy", "CommandEvent-Paste")
        assert len(compress_runs(ts)) == 2

    def test_type_only_key(self):
        ts = stream("CommandEvent-Copy", "CommandEvent-Paste", "BuildEvent")
        assert compress_runs(ts, run_key="type_only").rendered() == ["CommandEvent-Copy+", "BuildEvent"]
        with pytest.raises(ValueError):
            compress_runs(ts, run_key="bogus")

    @given(st.lists(st.sampled_from(["A", "B", "C"]), max_size=40))
    def test_against_groupby_oracle(self, bases):
        out = compress_runs(stream(*bases))
        expected = [b + "+" if n >= 2 else b for b, n in maximal_runs(bases)]
        assert out.rendered() == expected

    @given(st.lists(st.tuples(st.sampled_from(["A", "B", "C"]), st.booleans()), max_size=40))
    def test_idempotent_and_shrinking(self, toks):
        ts = TokenStream("s", tuple(Token(b, r) for b, r in toks))
        once = compress_runs(ts)
        assert compress_runs(once) == once
        assert len(once) <= len(ts)
        has_run = any(n >= 2 for _, n in maximal_runs([b for b, _ in toks]))
        assert (len(once) == len(ts)) == (not has_run)
        bases = [t.base for t in once.tokens]
        assert all(a != b for a, b in zip(bases, bases[1:]))


class TestPipeline:
    def test_removal_bookkeeping(self):
        s = session(
            ev("s", 0, "CommandEvent", "Copy"),
            ev("s", 0, "CommandEvent", "Copy"),      # duplicate
            ev("s", 1, "SystemEvent"),
            ev("s", 2, "CommandEvent", "Copy"),      # run with the first
            ev("s", 3, "BuildEvent"),
        )
        out = cleanse.cleanse_sessions([s])
        assert (out.removed_by_filter, out.removed_by_dedup, out.removed_by_compression) == (1, 1, 1)
        assert out.streams[0].rendered() == ["CommandEvent-Copy+", "BuildEvent"]

    def test_streams_round_trip(self):
        streams = [stream("A", "B"), TokenStream("t", (Token("X", True),))]
        buf = io.StringIO()
        cleanse.write_streams(streams, buf)
        buf.seek(0)
        assert cleanse.read_streams(buf) == streams
