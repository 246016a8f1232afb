"""Synthetic market generator with known ground truth.

Builds tapes where every statistical claim can be checked against
construction: lit prints as a (piecewise-constant) Poisson stream, dark
fills timed independently per venue, and configurable pathologies layered
on top:

* leakage       - a dark fill triggers an injected lit print after a short
                  latency (two orders of magnitude faster than background by
                  default), optionally size-dependent past a notional knee;
* dark-lit sweep - an injected print at a fixed ~1 ms after the fill;
* latent prices - the fill itself is re-timed to ~1 ms after the nearest
                  preceding lit print;
* price impact  - a log-mid random walk stepping per lit print, with an
                  impact step in an injected print's direction and an
                  optional continuous drift (the competing-trader case).

All randomness flows from one 64-bit seed through counter-based Philox
streams spawned per component and per venue, so venue streams stay
independent and every tape is bit-reproducible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Any, Iterable, Sequence

import numpy as np

from .slippage import PricePath
from .tape import EventKind, Side, Tape, TapeEvent, merge_streams

__all__ = [
    "VenueProfile",
    "PriceModel",
    "Scenario",
    "gen_lit_tape",
    "gen_dark_fills",
    "inject_leakage",
    "gen_price_path",
    "reprice",
    "simulate_scenario",
    "preset",
    "fleet",
    "parse_scenario",
    "format_scenario",
    "PRESET_NAMES",
]

_NS = 1_000_000_000
SWEEP_LATENCY_NS = 1_000_000  # fixed ~1 ms sweep print latency
LATENT_OFFSET_NS = 1_000_000  # latent fills land ~1 ms after a lit print


@dataclass(frozen=True)
class VenueProfile:
    """Pathology knobs for one dark venue.

    ``leak_prob`` applies to fills at or below ``size_leak_knee`` (when set),
    ``leak_prob_large`` above it. The injected print's latency is exponential
    with mean ``leak_latency_mean``, truncated at a tenth of the local mean
    lit duration; ``leak_latency_kind="fixed"`` makes it exactly the mean
    instead. ``active`` restricts the venue's fills to a time window in
    seconds (None = whole tape).
    """

    venue: str
    leak_prob: float = 0.0
    leak_latency_mean: float = 0.01
    leak_latency_kind: str = "exp"
    size_log_mu: float = 8.82
    size_log_sigma: float = 1.0
    size_leak_knee: float | None = None
    leak_prob_large: float = 0.0
    sweep_prob: float = 0.0
    latent_prob: float = 0.0
    active: tuple[float, float] | None = None

    def __post_init__(self) -> None:
        for name in ("leak_prob", "leak_prob_large", "sweep_prob", "latent_prob"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"{name} must be in [0, 1], got {value}")
        if self.leak_latency_mean <= 0:
            raise ValueError("leak_latency_mean must be > 0")
        if self.leak_latency_kind not in ("exp", "fixed"):
            raise ValueError(f"leak_latency_kind must be 'exp' or 'fixed', got {self.leak_latency_kind!r}")

    def leak_prob_for(self, size: float) -> float:
        if self.size_leak_knee is not None and size > self.size_leak_knee:
            return self.leak_prob_large
        return self.leak_prob


@dataclass(frozen=True)
class PriceModel:
    """Log-mid random walk parameters (basis points)."""

    sigma_per_trade: float = 3.0
    leak_impact: float = 0.0
    competing_drift: float = 0.0  # bp per second
    start_mid: float = 100.0

    def __post_init__(self) -> None:
        if self.sigma_per_trade < 0:
            raise ValueError("sigma_per_trade must be >= 0")
        if self.start_mid <= 0:
            raise ValueError("start_mid must be > 0")


@dataclass(frozen=True)
class Scenario:
    """Full generator configuration.

    ``lit_schedule`` is a piecewise-constant mean-duration schedule:
    (start_second, seconds_per_trade) segments, first starting at 0.
    ``dark_fill_rate`` is mean fills per second per venue. When
    ``fills_per_order`` is set, each venue's fill stream is chunked into
    consecutive parent orders of that many fills sharing one i.i.d. side;
    otherwise sides are i.i.d. per fill.
    """

    symbol: str = "SYM"
    seed: int = 0
    duration: float = 1_000.0
    lit_schedule: tuple[tuple[float, float], ...] = ((0.0, 1.0),)
    dark_fill_rate: float = 0.05
    venues: tuple[VenueProfile, ...] = (VenueProfile("DARK1"),)
    price: PriceModel = field(default_factory=PriceModel)
    fills_per_order: int | None = None
    lit_size_log_mu: float = 9.0
    lit_size_log_sigma: float = 1.0
    name: str = "custom"

    def __post_init__(self) -> None:
        if self.duration < 0:
            raise ValueError("duration must be >= 0")
        if self.dark_fill_rate < 0:
            raise ValueError("dark_fill_rate must be >= 0")
        if not self.lit_schedule or self.lit_schedule[0][0] != 0.0:
            raise ValueError("lit_schedule must start at t = 0")
        starts = [s for s, _ in self.lit_schedule]
        if sorted(starts) != starts or len(set(starts)) != len(starts):
            raise ValueError("lit_schedule starts must be strictly increasing")
        if any(m <= 0 for _, m in self.lit_schedule):
            raise ValueError("lit_schedule mean durations must be > 0")
        if self.fills_per_order is not None and self.fills_per_order < 1:
            raise ValueError("fills_per_order must be >= 1")

    def mean_duration_at(self, t_s: float) -> float:
        mean = self.lit_schedule[0][1]
        for start, m in self.lit_schedule:
            if t_s < start:
                break
            mean = m
        return mean


def _streams(scenario: Scenario) -> dict[str, np.random.SeedSequence]:
    root = np.random.SeedSequence(scenario.seed)
    lit, dark, inject, price = root.spawn(4)
    return {"lit": lit, "dark": dark, "inject": inject, "price": price}


def _rng(seq: np.random.SeedSequence) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(seq))


def _exponential_times(rng: np.random.Generator, mean: float, start: float, end: float) -> np.ndarray:
    """Event times of a homogeneous Poisson stream on [start, end)."""
    span = end - start
    if span <= 0:
        return np.empty(0)
    times: list[np.ndarray] = []
    t = 0.0
    while True:
        block = max(int((span - t) / mean * 1.2) + 16, 16)
        gaps = rng.exponential(mean, size=block)
        cum = t + np.cumsum(gaps)
        times.append(cum[cum < span])
        if cum[-1] >= span:
            break
        t = cum[-1]
    return start + np.concatenate(times)


def gen_lit_tape(scenario: Scenario) -> Tape:
    """Lit prints with exponential inter-arrivals per the schedule.

    Prices are placeholders until reprice() runs; a segment boundary restarts
    the wait, which is exact for a Poisson stream (memorylessness).
    """
    rng = _rng(_streams(scenario)["lit"])
    segments = list(scenario.lit_schedule) + [(scenario.duration, 0.0)]
    all_times: list[np.ndarray] = []
    for (start, mean), (nxt, _) in zip(segments, segments[1:]):
        end = min(nxt, scenario.duration)
        if end <= start:
            continue
        all_times.append(_exponential_times(rng, mean, start, end))
    times = np.concatenate(all_times) if all_times else np.empty(0)
    ts = np.round(times * _NS).astype(np.int64)
    sizes = rng.lognormal(scenario.lit_size_log_mu, scenario.lit_size_log_sigma, size=ts.size)
    sides = rng.integers(0, 2, size=ts.size)
    events = tuple(
        TapeEvent(
            kind=EventKind.LIT,
            ts=int(t),
            symbol=scenario.symbol,
            price=scenario.price.start_mid,
            size=float(s),
            side=Side.BUY if b else Side.SELL,
        )
        for t, s, b in zip(ts, sizes, sides)
    )
    return Tape(symbol=scenario.symbol, events=events)


def gen_dark_fills(scenario: Scenario) -> Tape:
    """Poisson-timed fills per venue, lognormal sizes, i.i.d. sides.

    With ``fills_per_order`` set, consecutive chunks share one side and carry
    an order key in ``truth``; fills always carry a per-venue fill key.
    """
    stream = _streams(scenario)["dark"]
    children = stream.spawn(max(len(scenario.venues), 1))
    events: list[TapeEvent] = []
    for profile, child in zip(scenario.venues, children):
        rng = _rng(child)
        window = profile.active or (0.0, scenario.duration)
        start = max(window[0], 0.0)
        end = min(window[1], scenario.duration)
        if scenario.dark_fill_rate == 0 or end <= start:
            continue
        times = _exponential_times(rng, 1.0 / scenario.dark_fill_rate, start, end)
        ts = np.round(times * _NS).astype(np.int64)
        sizes = rng.lognormal(profile.size_log_mu, profile.size_log_sigma, size=ts.size)
        group = scenario.fills_per_order
        if group:
            n_orders = -(-ts.size // group)
            order_sides = rng.integers(0, 2, size=n_orders)
            side_of = lambda j: Side.BUY if order_sides[j // group] else Side.SELL
            order_of = lambda j: f"{profile.venue}:o{j // group}"
        else:
            fill_sides = rng.integers(0, 2, size=ts.size)
            side_of = lambda j: Side.BUY if fill_sides[j] else Side.SELL
            order_of = lambda j: f"{profile.venue}:f{j}"
        for j in range(ts.size):
            truth: dict[str, Any] = {
                "fill": f"{profile.venue}:f{j}",
                "order": order_of(j),
                "leaked": False,
                "sweep": False,
                "latent": False,
            }
            events.append(
                TapeEvent(
                    kind=EventKind.DARK,
                    ts=int(ts[j]),
                    symbol=scenario.symbol,
                    price=scenario.price.start_mid,
                    size=float(sizes[j]),
                    side=side_of(j),
                    venue=profile.venue,
                    truth=truth,
                )
            )
    events.sort(key=lambda e: e.sort_key)
    return Tape(symbol=scenario.symbol, events=tuple(events))


def inject_leakage(
    lit: Tape,
    dark: Tape,
    profiles: Sequence[VenueProfile],
    *,
    schedule: tuple[tuple[float, float], ...] = ((0.0, 1.0),),
    lit_size_log_mu: float = 9.0,
    lit_size_log_sigma: float = 1.0,
    seed: int | np.random.SeedSequence = 0,
) -> Tape:
    """Apply venue pathologies and return the merged, sorted tape.

    Per dark fill on a profiled venue: with the (size-dependent) leak
    probability, inject a lit print at fill time plus a truncated-exponential
    latency; with ``sweep_prob``, inject one at a fixed ~1 ms; with
    ``latent_prob``, re-time the fill itself to ~1 ms after the nearest
    preceding lit print. Injected prints carry the causing fill's key in
    ``truth``; with all probabilities zero this is a plain merge.
    """
    seq = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    by_venue = {p.venue: p for p in profiles}
    children = dict(zip(by_venue, seq.spawn(max(len(by_venue), 1))))
    lit_ts = np.array([e.ts for e in lit.events], dtype=np.int64)

    def mean_at(ts: int) -> float:
        mean = schedule[0][1]
        t_s = ts / _NS
        for start, m in schedule:
            if t_s < start:
                break
            mean = m
        return mean

    injected: list[TapeEvent] = []
    fills: list[TapeEvent] = []
    rngs = {venue: _rng(child) for venue, child in children.items()}
    for fill in dark.events:
        profile = by_venue.get(fill.venue or "")
        if profile is None:
            fills.append(fill)
            continue
        rng = rngs[profile.venue]
        truth = dict(fill.truth or {})
        ts = fill.ts

        if profile.latent_prob and rng.random() < profile.latent_prob:
            i = int(np.searchsorted(lit_ts, ts, side="left")) - 1
            if i >= 0:
                ts = int(lit_ts[i]) + LATENT_OFFSET_NS
                truth["latent"] = True

        if rng.random() < profile.leak_prob_for(fill.size):
            mean = profile.leak_latency_mean
            if profile.leak_latency_kind == "fixed":
                latency = mean
            else:
                # truncated exponential on (0, local mean duration / 10]
                cap = mean_at(ts) / 10.0
                u = rng.random()
                latency = -mean * math.log1p(-u * -math.expm1(-cap / mean))
            latency_ns = max(int(round(latency * _NS)), 1)
            truth["leaked"] = True
            injected.append(
                TapeEvent(
                    kind=EventKind.LIT,
                    ts=ts + latency_ns,
                    symbol=fill.symbol,
                    price=fill.price,
                    size=float(rng.lognormal(lit_size_log_mu, lit_size_log_sigma)),
                    side=fill.side,
                    truth={"injected_by": truth.get("fill", ""), "cause": "leak"},
                )
            )

        if profile.sweep_prob and rng.random() < profile.sweep_prob:
            truth["sweep"] = True
            injected.append(
                TapeEvent(
                    kind=EventKind.LIT,
                    ts=ts + SWEEP_LATENCY_NS,
                    symbol=fill.symbol,
                    price=fill.price,
                    size=float(rng.lognormal(lit_size_log_mu, lit_size_log_sigma)),
                    side=fill.side.opposite(),
                    truth={"injected_by": truth.get("fill", ""), "cause": "sweep"},
                )
            )

        if ts != fill.ts or truth != (fill.truth or {}):
            fills.append(replace(fill, ts=ts, truth=truth))
        else:
            fills.append(fill)

    lit_all = Tape(
        symbol=lit.symbol,
        events=tuple(sorted(lit.events + tuple(injected), key=lambda e: e.sort_key)),
        meta=lit.meta,
    )
    dark_all = Tape(
        symbol=dark.symbol,
        events=tuple(sorted(fills, key=lambda e: e.sort_key)),
        meta=dark.meta,
    )
    return merge_streams(lit_all, dark_all)


def gen_price_path(
    merged: Tape,
    model: PriceModel,
    seed: int | np.random.SeedSequence = 0,
    *,
    start_ts: int = 0,
    end_ts: int | None = None,
) -> PricePath:
    """Log-mid random walk sampled at every lit print.

    Each print steps by sigma_per_trade plus drift accrued since the previous
    sample; an injected print adds the impact step in its own direction. The
    path opens at ``start_ts`` and closes with a drift-only sample at
    ``end_ts`` (defaults to the last event).
    """
    seq = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    rng = _rng(seq)
    lits = [e for e in merged.events if e.is_lit()]
    n = len(lits)
    ts = np.array([e.ts for e in lits], dtype=np.int64)
    z = rng.normal(size=n)
    prev = np.concatenate(([start_ts], ts[:-1])) if n else np.empty(0, dtype=np.int64)
    dt_s = (ts - prev) / _NS
    steps = model.sigma_per_trade * 1e-4 * z + model.competing_drift * 1e-4 * dt_s
    if model.leak_impact:
        impact = np.array(
            [
                model.leak_impact * 1e-4 * e.side.sign
                if e.truth is not None and "injected_by" in e.truth
                else 0.0
                for e in lits
            ]
        )
        steps = steps + impact
    log_mid = math.log(model.start_mid) + np.cumsum(steps)

    out_ts = [start_ts]
    out_val = [math.log(model.start_mid)]
    for i in range(n):
        t = int(ts[i])
        if t == out_ts[-1]:
            out_val[-1] = float(log_mid[i])
        else:
            out_ts.append(t)
            out_val.append(float(log_mid[i]))
    last = end_ts if end_ts is not None else (int(ts[-1]) if n else start_ts)
    if last > out_ts[-1]:
        drift_tail = model.competing_drift * 1e-4 * (last - out_ts[-1]) / _NS
        out_ts.append(int(last))
        out_val.append(out_val[-1] + drift_tail)
    return PricePath(np.array(out_ts, dtype=np.int64), np.array(out_val))


def reprice(tape: Tape, path: PricePath) -> Tape:
    """Set every event's price and mid from the path (LOCF at event time)."""
    if not tape.events:
        return tape
    ts = np.array([e.ts for e in tape.events], dtype=np.int64)
    mids = np.exp(path.log_mid_at(ts))
    events = tuple(
        replace(e, price=float(m), mid=float(m)) for e, m in zip(tape.events, mids)
    )
    return Tape(symbol=tape.symbol, events=events, meta=tape.meta)


def simulate_scenario(scenario: Scenario) -> tuple[Tape, PricePath]:
    """Generate the full merged, repriced tape and its price path."""
    streams = _streams(scenario)
    lit = gen_lit_tape(scenario)
    dark = gen_dark_fills(scenario)
    merged = inject_leakage(
        lit,
        dark,
        scenario.venues,
        schedule=scenario.lit_schedule,
        lit_size_log_mu=scenario.lit_size_log_mu,
        lit_size_log_sigma=scenario.lit_size_log_sigma,
        seed=streams["inject"],
    )
    end_ts = int(round(scenario.duration * _NS))
    path = gen_price_path(merged, scenario.price, streams["price"], end_ts=end_ts)
    tape = reprice(merged, path)
    meta = {
        "scenario": scenario.name,
        "seed": scenario.seed,
        "symbol": scenario.symbol,
        "config": format_scenario(scenario).splitlines(),
    }
    return Tape(symbol=tape.symbol, events=tape.events, meta=meta), path


PRESET_NAMES = ("null", "leaky", "sweep", "latent", "competing", "size_knee")


def preset(name: str, seed: int = 0, **overrides: Any) -> Scenario:
    """Canonical scenarios with documented parameters.

    null       clean tape: no leakage, no sweeps, no latency, no drift.
    leaky      leak_prob 0.5 with ~10 ms latency against a 1 s lit stream
               (mean lit duration / 100) and 1.5 bp impact per leaked print;
               clip sizes cluster small (log sigma 0.6) so a raised fill
               floor acts as an effective stop.
    sweep      sweep_prob 0.4, prints at a fixed 1 ms.
    latent     latent_prob 0.4, fills re-timed to 1 ms after a lit print.
    competing  no leakage, 0.05 bp/s drift: slippage without causation.
    size_knee  leak_prob 0.5 up to a £30,000 notional knee, 0.16 above it;
               lognormal sizes (median ≈ £6,800) put ~7% of fills past the
               knee, so the unrestricted signalling share sits near 50% and
               the above-knee share near 20%.

    Scenario-level fields (duration, dark_fill_rate, venues, ...) can be
    overridden by keyword.
    """
    base_price = PriceModel(sigma_per_trade=3.0)
    if name == "null":
        scenario = Scenario(
            seed=seed,
            duration=12_000.0,
            dark_fill_rate=1.0,
            venues=(VenueProfile("DARK1"),),
            price=base_price,
            name=name,
        )
    elif name == "leaky":
        scenario = Scenario(
            seed=seed,
            duration=4_000.0,
            dark_fill_rate=0.05,
            venues=(
                VenueProfile(
                    "DARK1", leak_prob=0.5, leak_latency_mean=0.01, size_log_sigma=0.6
                ),
            ),
            price=replace(base_price, leak_impact=1.5),
            fills_per_order=15,
            name=name,
        )
    elif name == "sweep":
        scenario = Scenario(
            seed=seed,
            duration=4_000.0,
            dark_fill_rate=0.05,
            venues=(VenueProfile("DARK1", sweep_prob=0.4),),
            price=replace(base_price, leak_impact=1.5),
            fills_per_order=15,
            name=name,
        )
    elif name == "latent":
        scenario = Scenario(
            seed=seed,
            duration=4_000.0,
            dark_fill_rate=0.05,
            venues=(VenueProfile("DARK1", latent_prob=0.4),),
            price=base_price,
            name=name,
        )
    elif name == "competing":
        scenario = Scenario(
            seed=seed,
            duration=4_000.0,
            dark_fill_rate=0.05,
            venues=(VenueProfile("DARK1", size_log_sigma=0.6),),
            price=replace(base_price, competing_drift=0.05),
            fills_per_order=15,
            name=name,
        )
    elif name == "size_knee":
        scenario = Scenario(
            seed=seed,
            duration=20_000.0,
            dark_fill_rate=0.1,
            venues=(
                VenueProfile(
                    "DARK1",
                    leak_prob=0.5,
                    leak_latency_mean=0.01,
                    size_log_mu=8.82,
                    size_log_sigma=1.0,
                    size_leak_knee=30_000.0,
                    leak_prob_large=0.16,
                ),
            ),
            price=replace(base_price, leak_impact=1.5),
            name=name,
        )
    else:
        raise ValueError(f"unknown preset '{name}' (known: {', '.join(PRESET_NAMES)})")
    if overrides:
        scenario = replace(scenario, **overrides)
    return scenario


def fleet(
    base: Scenario,
    n_venues: int,
    venue_span_s: float,
    stagger_s: float,
    tail_s: float = 60.0,
) -> Scenario:
    """Replicate the first venue into n staggered venues.

    Venue i is active on [i * stagger, i * stagger + span); the duration
    extends to cover the last window plus a tail. Staggering keeps injected
    prints a small fraction of background lit activity however many venues
    trade, and gives the backtest one order episode per venue window.
    """
    if not base.venues:
        raise ValueError("base scenario has no venue profile to replicate")
    profile = base.venues[0]
    venues = tuple(
        replace(
            profile,
            venue=f"{profile.venue}{i:03d}",
            active=(i * stagger_s, i * stagger_s + venue_span_s),
        )
        for i in range(n_venues)
    )
    duration = (n_venues - 1) * stagger_s + venue_span_s + tail_s
    return replace(base, venues=venues, duration=duration)


# ---------------------------------------------------------------------------
# Flat key/value scenario files


def format_scenario(scenario: Scenario) -> str:
    """Scenario as flat key=value lines (inverse of parse_scenario)."""
    lines = [
        f"name={scenario.name}",
        f"symbol={scenario.symbol}",
        f"seed={scenario.seed}",
        f"duration={scenario.duration!r}",
        "lit_schedule=" + ",".join(f"{s!r}:{m!r}" for s, m in scenario.lit_schedule),
        f"dark_fill_rate={scenario.dark_fill_rate!r}",
        f"lit_size_log_mu={scenario.lit_size_log_mu!r}",
        f"lit_size_log_sigma={scenario.lit_size_log_sigma!r}",
        f"price.sigma_per_trade={scenario.price.sigma_per_trade!r}",
        f"price.leak_impact={scenario.price.leak_impact!r}",
        f"price.competing_drift={scenario.price.competing_drift!r}",
        f"price.start_mid={scenario.price.start_mid!r}",
    ]
    if scenario.fills_per_order is not None:
        lines.append(f"fills_per_order={scenario.fills_per_order}")
    for v in scenario.venues:
        prefix = f"venue.{v.venue}."
        lines.append(f"{prefix}leak_prob={v.leak_prob!r}")
        lines.append(f"{prefix}leak_latency_mean={v.leak_latency_mean!r}")
        lines.append(f"{prefix}leak_latency_kind={v.leak_latency_kind}")
        lines.append(f"{prefix}size_log_mu={v.size_log_mu!r}")
        lines.append(f"{prefix}size_log_sigma={v.size_log_sigma!r}")
        if v.size_leak_knee is not None:
            lines.append(f"{prefix}size_leak_knee={v.size_leak_knee!r}")
            lines.append(f"{prefix}leak_prob_large={v.leak_prob_large!r}")
        lines.append(f"{prefix}sweep_prob={v.sweep_prob!r}")
        lines.append(f"{prefix}latent_prob={v.latent_prob!r}")
        if v.active is not None:
            lines.append(f"{prefix}active={v.active[0]!r}:{v.active[1]!r}")
    return "\n".join(lines) + "\n"


def parse_scenario(text: str | Iterable[str]) -> Scenario:
    """Parse the flat key=value scenario format."""
    if isinstance(text, str):
        text = text.splitlines()
    scalars: dict[str, str] = {}
    price_kv: dict[str, str] = {}
    venue_kv: dict[str, dict[str, str]] = {}
    for raw_no, raw in enumerate(text, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ValueError(f"scenario line {raw_no}: expected key=value, got {line!r}")
        key, value = line.split("=", 1)
        key, value = key.strip(), value.strip()
        if key.startswith("price."):
            price_kv[key[len("price.") :]] = value
        elif key.startswith("venue."):
            rest = key[len("venue.") :]
            if "." not in rest:
                raise ValueError(f"scenario line {raw_no}: bad venue key {key!r}")
            venue, attr = rest.split(".", 1)
            venue_kv.setdefault(venue, {})[attr] = value
        else:
            scalars[key] = value

    def fget(kv: dict[str, str], key: str, default: float) -> float:
        return float(kv[key]) if key in kv else default

    schedule: tuple[tuple[float, float], ...] = ((0.0, 1.0),)
    if "lit_schedule" in scalars:
        pairs = []
        for part in scalars["lit_schedule"].split(","):
            s, m = part.split(":")
            pairs.append((float(s), float(m)))
        schedule = tuple(pairs)

    price = PriceModel(
        sigma_per_trade=fget(price_kv, "sigma_per_trade", 3.0),
        leak_impact=fget(price_kv, "leak_impact", 0.0),
        competing_drift=fget(price_kv, "competing_drift", 0.0),
        start_mid=fget(price_kv, "start_mid", 100.0),
    )
    venues = []
    for venue, kv in venue_kv.items():
        knee = float(kv["size_leak_knee"]) if "size_leak_knee" in kv else None
        active = None
        if "active" in kv:
            a, b = kv["active"].split(":")
            active = (float(a), float(b))
        venues.append(
            VenueProfile(
                venue=venue,
                leak_prob=fget(kv, "leak_prob", 0.0),
                leak_latency_mean=fget(kv, "leak_latency_mean", 0.01),
                leak_latency_kind=kv.get("leak_latency_kind", "exp"),
                size_log_mu=fget(kv, "size_log_mu", 8.82),
                size_log_sigma=fget(kv, "size_log_sigma", 1.0),
                size_leak_knee=knee,
                leak_prob_large=fget(kv, "leak_prob_large", 0.0),
                sweep_prob=fget(kv, "sweep_prob", 0.0),
                latent_prob=fget(kv, "latent_prob", 0.0),
                active=active,
            )
        )
    return Scenario(
        symbol=scalars.get("symbol", "SYM"),
        seed=int(scalars.get("seed", "0")),
        duration=float(scalars.get("duration", "1000.0")),
        lit_schedule=schedule,
        dark_fill_rate=float(scalars.get("dark_fill_rate", "0.05")),
        venues=tuple(venues) if venues else (VenueProfile("DARK1"),),
        price=price,
        fills_per_order=int(scalars["fills_per_order"]) if "fills_per_order" in scalars else None,
        lit_size_log_mu=float(scalars.get("lit_size_log_mu", "9.0")),
        lit_size_log_sigma=float(scalars.get("lit_size_log_sigma", "1.0")),
        name=scalars.get("name", "custom"),
    )
