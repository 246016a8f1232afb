import json

import pytest

from darkscope.tape import (
    EventKind,
    Side,
    Tape,
    TapeEvent,
    TapeFormatError,
    merge_streams,
    parse_tape,
    serialize_tape,
    validate_tape,
)


def lit(ts, symbol="SYM", price=100.0, size=500.0, side=Side.BUY, **kw):
    return TapeEvent(EventKind.LIT, ts, symbol, price, size, side, **kw)


def dark(ts, symbol="SYM", price=100.0, size=500.0, side=Side.BUY, venue="V1", **kw):
    return TapeEvent(EventKind.DARK, ts, symbol, price, size, side, venue=venue, **kw)


class TestParse:
    def test_three_valid_lines_round_trip(self):
        lines = [
            '{"kind": "lit", "ts": 1000, "symbol": "SYM", "price": 100.0, "size": 250.0, "side": "buy"}',
            '{"kind": "dark", "ts": 1500, "symbol": "SYM", "price": 100.5, "size": 5000.0, "side": "sell", "venue": "V1"}',
            '{"kind": "lit", "ts": 2000, "symbol": "SYM", "price": 99.5, "size": 125.0, "side": "unknown"}',
        ]
        tape = parse_tape(lines)
        assert len(tape) == 3
        assert [e.ts for e in tape] == [1000, 1500, 2000]
        assert tape.events[1].venue == "V1"
        assert tape.symbol == "SYM"

    def test_empty_input(self):
        assert len(parse_tape([])) == 0
        assert len(parse_tape(["", "   "])) == 0

    def test_zero_size_names_line(self):
        lines = [
            '{"kind": "lit", "ts": 1, "symbol": "S", "price": 1.0, "size": 10.0, "side": "buy"}',
            '{"kind": "lit", "ts": 2, "symbol": "S", "price": 1.0, "size": 0, "side": "buy"}',
        ]
        with pytest.raises(TapeFormatError, match="line 2"):
            parse_tape(lines)

    def test_dark_missing_venue(self):
        line = '{"kind": "dark", "ts": 1, "symbol": "S", "price": 1.0, "size": 1.0, "side": "buy"}'
        with pytest.raises(TapeFormatError, match="venue"):
            parse_tape([line])

    def test_dark_unknown_side(self):
        line = '{"kind": "dark", "ts": 1, "symbol": "S", "price": 1.0, "size": 1.0, "side": "unknown", "venue": "V"}'
        with pytest.raises(TapeFormatError, match="side"):
            parse_tape([line])

    def test_mixed_symbols(self):
        lines = [
            '{"kind": "lit", "ts": 1, "symbol": "A", "price": 1.0, "size": 1.0, "side": "buy"}',
            '{"kind": "lit", "ts": 2, "symbol": "B", "price": 1.0, "size": 1.0, "side": "buy"}',
        ]
        with pytest.raises(TapeFormatError, match="mixed symbols"):
            parse_tape(lines)

    def test_malformed_json_names_line(self):
        with pytest.raises(TapeFormatError, match="line 1"):
            parse_tape(["{nope"])

    def test_negative_price(self):
        line = '{"kind": "lit", "ts": 1, "symbol": "S", "price": -3.0, "size": 1.0, "side": "buy"}'
        with pytest.raises(TapeFormatError, match="price"):
            parse_tape([line])

    def test_parse_sorts_with_lit_first_tie_break(self):
        lines = [
            '{"kind": "dark", "ts": 5, "symbol": "S", "price": 1.0, "size": 1.0, "side": "buy", "venue": "V"}',
            '{"kind": "lit", "ts": 5, "symbol": "S", "price": 1.0, "size": 1.0, "side": "sell"}',
            '{"kind": "lit", "ts": 1, "symbol": "S", "price": 1.0, "size": 1.0, "side": "buy"}',
        ]
        tape = parse_tape(lines)
        assert [(e.ts, e.kind) for e in tape] == [
            (1, EventKind.LIT),
            (5, EventKind.LIT),
            (5, EventKind.DARK),
        ]


class TestSerialize:
    def test_round_trip_field_exact(self):
        events = (
            lit(1, price=100.123456789012345, size=0.1, mid=99.87654321),
            dark(2, price=3.0000000000000004, size=12345.6789, side=Side.SELL, own=False,
                 truth={"fill": "V1:f0", "leaked": True}),
            lit(3, side=Side.UNKNOWN),
        )
        tape = Tape("SYM", events, meta={"scenario": "unit", "seed": 7})
        text = list(serialize_tape(tape))
        back = parse_tape(text)
        assert back.events == tape.events
        assert back.meta == tape.meta

    def test_floats_survive_bit_exact(self):
        e = lit(1, price=0.1 + 0.2, size=1e-15)
        back = parse_tape(serialize_tape(Tape("SYM", (e,))))
        assert back.events[0].price == 0.30000000000000004
        assert back.events[0].size == 1e-15


class TestMerge:
    def test_interleaves_by_ts(self):
        a = Tape("S", (lit(1), lit(3)))
        b = Tape("S", (dark(2),))
        merged = merge_streams(a, b)
        assert [(e.ts, e.kind) for e in merged] == [
            (1, EventKind.LIT),
            (2, EventKind.DARK),
            (3, EventKind.LIT),
        ]

    def test_tie_break_lit_first(self):
        merged = merge_streams(Tape("S", (lit(5),)), Tape("S", (dark(5),)))
        assert [e.kind for e in merged] == [EventKind.LIT, EventKind.DARK]

    def test_merge_with_empty_is_identity(self):
        a = Tape("S", (lit(1), dark(2), lit(3)))
        merged = merge_streams(a, Tape("S"))
        assert merged.events == a.events

    def test_symbol_mismatch(self):
        with pytest.raises(ValueError, match="symbol mismatch"):
            merge_streams(Tape("A", (lit(1, symbol="A"),)), Tape("B", (dark(1, symbol="B"),)))

    def test_preserves_event_multiset_and_count(self):
        a = Tape("S", (lit(1), lit(2), lit(2)))
        b = Tape("S", (dark(1), dark(4)))
        merged = merge_streams(a, b)
        assert len(merged) == len(a) + len(b)
        assert sorted(e.ts for e in merged) == [1, 1, 2, 2, 4]

    def test_associative_up_to_tie_break(self):
        a = Tape("S", (lit(1), lit(5)))
        b = Tape("S", (dark(2),))
        c = Tape("S", (dark(5), dark(9)))
        left = merge_streams(merge_streams(a, b), c)
        right = merge_streams(a, merge_streams(Tape("S"), merge_streams(b, c)))
        assert left.events == right.events


class TestValidate:
    def test_valid_tape_empty_report(self):
        tape = Tape("SYM", (lit(1), dark(2), lit(5)))
        assert validate_tape(tape) == []

    def test_out_of_order_pair_flagged_at_index(self):
        tape = Tape("SYM", (lit(5), lit(3)))
        issues = validate_tape(tape)
        assert len(issues) == 1
        assert issues[0].code == "ordering"
        assert issues[0].index == 1

    def test_dark_unknown_side_flagged(self):
        bad = TapeEvent(EventKind.DARK, 1, "SYM", 1.0, 1.0, Side.UNKNOWN, venue="V")
        issues = validate_tape(Tape("SYM", (bad,)))
        assert [i.code for i in issues] == ["dark_side"]

    def test_field_domain_violations_all_reported(self):
        bad = TapeEvent(EventKind.LIT, -1, "SYM", 0.0, -2.0, Side.BUY)
        codes = {i.code for i in validate_tape(Tape("SYM", (bad,)))}
        assert codes == {"ts_negative", "price_domain", "size_domain"}

    def test_symbol_mismatch_flagged(self):
        tape = Tape("OTHER", (lit(1),))
        assert [i.code for i in validate_tape(tape)] == ["symbol_mismatch"]

    def test_equal_ts_dark_before_lit_is_ordering_violation(self):
        tape = Tape("SYM", (dark(5), lit(5)))
        assert any(i.code == "ordering" for i in validate_tape(tape))

    def test_does_not_mutate(self):
        tape = Tape("SYM", (lit(5), lit(3)))
        validate_tape(tape)
        assert [e.ts for e in tape] == [5, 3]


def test_event_objects_are_flat_key_value(tmp_path):
    tape = Tape("S", (dark(2, truth={"fill": "V:f0"}),))
    line = list(serialize_tape(tape))[0]
    obj = json.loads(line)
    assert obj["kind"] == "dark"
    assert set(obj) <= {"kind", "ts", "symbol", "price", "size", "side", "venue", "mid", "own", "truth"}
