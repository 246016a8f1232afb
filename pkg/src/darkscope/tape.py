"""Unified event tape: data model, parsing, merging, validation.

A tape is one symbol's strictly ordered stream of lit-market prints and
dark-venue fills. Timestamps are integer nanoseconds so duration arithmetic
is exact; durations become floating seconds only inside the statistics
layer. Events at equal timestamps order lit-before-dark, which keeps every
duration non-negative and errs toward flagging.

Wire format: one JSON object per line with fields
``kind`` ("lit" | "dark"), ``ts`` (int ns), ``symbol``, ``price``, ``size``,
``side`` ("buy" | "sell" | "unknown"), and optional ``venue``, ``mid``,
``own``, ``truth``. An optional leading ``{"kind": "meta", ...}`` line
carries tape provenance.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Any, Iterable, Iterator

__all__ = [
    "EventKind",
    "Side",
    "TapeEvent",
    "Tape",
    "TapeFormatError",
    "ValidationIssue",
    "parse_tape",
    "serialize_tape",
    "merge_streams",
    "validate_tape",
]

# Duration floor, in nanoseconds: equal-timestamp events yield this instead of 0.
DURATION_FLOOR_NS = 1


class EventKind(str, Enum):
    LIT = "lit"
    DARK = "dark"

    @property
    def sort_rank(self) -> int:
        # Lit prints order before dark fills at equal timestamps.
        return 0 if self is EventKind.LIT else 1


class Side(str, Enum):
    BUY = "buy"
    SELL = "sell"
    UNKNOWN = "unknown"

    @property
    def sign(self) -> int:
        """Buy/sell indicator: +1 buy, -1 sell, 0 unknown."""
        if self is Side.BUY:
            return 1
        if self is Side.SELL:
            return -1
        return 0

    def opposite(self) -> "Side":
        if self is Side.BUY:
            return Side.SELL
        if self is Side.SELL:
            return Side.BUY
        return Side.UNKNOWN


class TapeFormatError(ValueError):
    """Raised for malformed tape input; carries the 1-based line number."""

    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


@dataclass(frozen=True)
class TapeEvent:
    """One print or fill.

    ``size`` is notional in currency units; ``mid`` is the mid price at event
    time when known; ``own`` marks own fills on lit feeds (recorded, no
    filtering semantics); ``truth`` holds simulator ground-truth flags.
    """

    kind: EventKind
    ts: int
    symbol: str
    price: float
    size: float
    side: Side = Side.UNKNOWN
    venue: str | None = None
    mid: float | None = None
    own: bool | None = None
    truth: dict[str, Any] | None = None

    @property
    def sort_key(self) -> tuple[int, int]:
        return (self.ts, self.kind.sort_rank)

    def is_lit(self) -> bool:
        return self.kind is EventKind.LIT

    def is_dark(self) -> bool:
        return self.kind is EventKind.DARK


@dataclass(frozen=True)
class Tape:
    """Immutable ordered event sequence for one symbol."""

    symbol: str
    events: tuple[TapeEvent, ...] = ()
    meta: dict[str, Any] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.events)

    def __iter__(self) -> Iterator[TapeEvent]:
        return iter(self.events)

    def lit_events(self) -> tuple[TapeEvent, ...]:
        return tuple(e for e in self.events if e.is_lit())

    def dark_events(self) -> tuple[TapeEvent, ...]:
        return tuple(e for e in self.events if e.is_dark())


@dataclass(frozen=True)
class ValidationIssue:
    """One invariant violation found by validate_tape (data, not an error)."""

    index: int
    code: str
    message: str


_REQUIRED_FIELDS = ("kind", "ts", "symbol", "price", "size")
_SIDES = {s.value: s for s in Side}
_KINDS = {k.value: k for k in EventKind}


def _event_from_obj(obj: dict[str, Any], line_no: int) -> TapeEvent:
    for name in _REQUIRED_FIELDS:
        if name not in obj:
            raise TapeFormatError(line_no, f"missing field '{name}'")
    kind = _KINDS.get(obj["kind"])
    if kind is None:
        raise TapeFormatError(line_no, f"unknown kind '{obj['kind']}'")
    ts = obj["ts"]
    if not isinstance(ts, int) or isinstance(ts, bool):
        raise TapeFormatError(line_no, f"ts must be an integer, got {ts!r}")
    if ts < 0:
        raise TapeFormatError(line_no, f"negative ts {ts}")
    try:
        price = float(obj["price"])
        size = float(obj["size"])
    except (TypeError, ValueError):
        raise TapeFormatError(line_no, "price/size must be numeric") from None
    if not price > 0:
        raise TapeFormatError(line_no, f"price must be > 0, got {price}")
    if not size > 0:
        raise TapeFormatError(line_no, f"size must be > 0, got {size}")
    side_raw = obj.get("side", "unknown")
    side = _SIDES.get(side_raw)
    if side is None:
        raise TapeFormatError(line_no, f"unknown side '{side_raw}'")
    venue = obj.get("venue")
    if venue is not None and not isinstance(venue, str):
        raise TapeFormatError(line_no, f"venue must be a string, got {venue!r}")
    if kind is EventKind.DARK:
        if not venue:
            raise TapeFormatError(line_no, "dark fill missing venue")
        if side is Side.UNKNOWN:
            raise TapeFormatError(line_no, "dark fill missing side")
    mid = obj.get("mid")
    if mid is not None:
        mid = float(mid)
        if not mid > 0:
            raise TapeFormatError(line_no, f"mid must be > 0, got {mid}")
    own = obj.get("own")
    if own is not None and not isinstance(own, bool):
        raise TapeFormatError(line_no, f"own must be a boolean, got {own!r}")
    truth = obj.get("truth")
    if truth is not None and not isinstance(truth, dict):
        raise TapeFormatError(line_no, f"truth must be an object, got {truth!r}")
    return TapeEvent(
        kind=kind,
        ts=ts,
        symbol=str(obj["symbol"]),
        price=price,
        size=size,
        side=side,
        venue=venue,
        mid=mid,
        own=own,
        truth=truth,
    )


def parse_tape(lines: Iterable[str], *, symbol: str | None = None) -> Tape:
    """Parse line-delimited tape text into a validated, sorted Tape.

    Blank lines are skipped. Errors name the offending 1-based line number.
    All fields round-trip bit-exactly through serialize_tape.
    """
    events: list[TapeEvent] = []
    meta: dict[str, Any] = {}
    tape_symbol = symbol
    for line_no, line in enumerate(lines, start=1):
        line = line.strip()
        if not line:
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise TapeFormatError(line_no, f"invalid JSON ({exc.msg})") from None
        if not isinstance(obj, dict):
            raise TapeFormatError(line_no, "record must be a JSON object")
        if obj.get("kind") == "meta":
            meta.update({k: v for k, v in obj.items() if k != "kind"})
            continue
        event = _event_from_obj(obj, line_no)
        if tape_symbol is None:
            tape_symbol = event.symbol
        elif event.symbol != tape_symbol:
            raise TapeFormatError(
                line_no,
                f"mixed symbols: expected '{tape_symbol}', got '{event.symbol}'",
            )
        events.append(event)
    events.sort(key=lambda e: e.sort_key)
    return Tape(symbol=tape_symbol or "", events=tuple(events), meta=meta)


def event_to_obj(event: TapeEvent) -> dict[str, Any]:
    """Flat key/value mapping for one event, omitting absent optionals."""
    obj: dict[str, Any] = {
        "kind": event.kind.value,
        "ts": event.ts,
        "symbol": event.symbol,
        "price": event.price,
        "size": event.size,
        "side": event.side.value,
    }
    if event.venue is not None:
        obj["venue"] = event.venue
    if event.mid is not None:
        obj["mid"] = event.mid
    if event.own is not None:
        obj["own"] = event.own
    if event.truth is not None:
        obj["truth"] = event.truth
    return obj


def serialize_tape(tape: Tape) -> Iterator[str]:
    """Yield tape lines (no trailing newline); inverse of parse_tape."""
    if tape.meta:
        yield json.dumps({"kind": "meta", **tape.meta}, sort_keys=True)
    for event in tape.events:
        yield json.dumps(event_to_obj(event))


def merge_streams(lit: Tape, dark: Tape) -> Tape:
    """Stable merge of two same-symbol tapes, lit-first at equal timestamps."""
    if lit.symbol and dark.symbol and lit.symbol != dark.symbol:
        raise ValueError(f"symbol mismatch: '{lit.symbol}' vs '{dark.symbol}'")
    events = sorted(lit.events + dark.events, key=lambda e: e.sort_key)
    meta = {**lit.meta, **dark.meta}
    return Tape(symbol=lit.symbol or dark.symbol, events=tuple(events), meta=meta)


def validate_tape(tape: Tape) -> list[ValidationIssue]:
    """Audit every tape invariant; returns all violations, mutating nothing.

    Empty report iff the tape is valid.
    """
    issues: list[ValidationIssue] = []
    prev_key: tuple[int, int] | None = None
    for i, e in enumerate(tape.events):
        if e.ts < 0:
            issues.append(ValidationIssue(i, "ts_negative", f"ts {e.ts} < 0"))
        if not e.price > 0:
            issues.append(ValidationIssue(i, "price_domain", f"price {e.price} <= 0"))
        if not e.size > 0:
            issues.append(ValidationIssue(i, "size_domain", f"size {e.size} <= 0"))
        if e.symbol != tape.symbol:
            issues.append(
                ValidationIssue(
                    i, "symbol_mismatch", f"event symbol '{e.symbol}' != tape '{tape.symbol}'"
                )
            )
        if e.is_dark():
            if not e.venue:
                issues.append(ValidationIssue(i, "dark_venue", "dark fill missing venue"))
            if e.side is Side.UNKNOWN:
                issues.append(ValidationIssue(i, "dark_side", "dark fill with side unknown"))
        key = e.sort_key
        if prev_key is not None and key < prev_key:
            issues.append(
                ValidationIssue(
                    i,
                    "ordering",
                    f"event at index {i} out of order: {key} after {prev_key}",
                )
            )
        prev_key = key
    return issues


def with_price(event: TapeEvent, price: float, mid: float | None = None) -> TapeEvent:
    """Copy of event with price (and optionally mid) replaced."""
    return replace(event, price=price, mid=mid if mid is not None else event.mid)
