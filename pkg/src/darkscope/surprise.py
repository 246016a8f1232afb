"""Timing-surprise scoring of dark fills against local lit-trade intensity.

The lit stream is treated locally as a Poisson point process. A rolling
window keeps the last n lit inter-arrival durations and their mean m, the
maximum-likelihood scale (seconds per trade). The wait from a dark fill to
the next lit print has the same exponential law as the inter-arrival
durations (memorylessness: the inspection time does not matter), so it can
be scored against the window.

Scoring uses the predictive distribution of the next duration with the
scale integrated out against a 1/scale prior:

    density  f(d) = n^(n+1) m^n / (n m + d)^(n+1)
    cdf      F(d) = 1 - (n m / (n m + d))^n

F(d) is exactly Uniform(0,1) when d and the window come from one Poisson
process, for every n >= 1, which makes it a calibrated p-value with the
estimator noise of small windows priced in (heavier tails than the plug-in
exponential). Small p = suspiciously quick lit print. The backward duration
(lit print just before the fill) is scored identically as a latent-price
indicator.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .tape import DURATION_FLOOR_NS, Side, Tape, TapeEvent

__all__ = [
    "DurationWindow",
    "SurpriseRecord",
    "update_window",
    "exponential_cdf",
    "plugin_pvalue",
    "predictive_density",
    "predictive_cdf",
    "fill_pvalue",
    "score_fill",
    "score_tape",
    "DEFAULT_WINDOW_SIZE",
    "DEFAULT_HORIZON_MULT",
    "MIN_DURATION_S",
    "MIN_PVALUE",
]

DEFAULT_WINDOW_SIZE = 10
# Forward lookahead horizon, in units of the window mean. Censored mass under
# the null is exp(-50): negligible, and the stream never stalls.
DEFAULT_HORIZON_MULT = 50.0
# Tape duration floor (1 ns) in seconds.
MIN_DURATION_S = DURATION_FLOOR_NS * 1e-9
# p-values are clamped below so Fisher's -2 log p stays finite.
MIN_PVALUE = 1e-300

_NS = 1e-9


@dataclass(frozen=True)
class DurationWindow:
    """Rolling buffer of the last lit-print durations (seconds).

    ``capacity`` bounds the buffer; ``n`` is the retained count; ``mean`` is
    the arithmetic mean, equal to the ML scale estimate ``intensity_hat``
    (seconds per trade). ``last_ts`` is the previous lit print's timestamp.
    """

    capacity: int = DEFAULT_WINDOW_SIZE
    durations: tuple[float, ...] = ()
    last_ts: int | None = None

    def __post_init__(self) -> None:
        if self.capacity < 1:
            raise ValueError(f"window capacity must be >= 1, got {self.capacity}")

    @property
    def n(self) -> int:
        return len(self.durations)

    @property
    def mean(self) -> float:
        if not self.durations:
            raise ValueError("empty window has no mean")
        return math.fsum(self.durations) / len(self.durations)

    @property
    def intensity_hat(self) -> float:
        """ML scale estimate: the mean duration, seconds per trade."""
        return self.mean

    def primed(self) -> bool:
        return bool(self.durations)


def update_window(window: DurationWindow, lit_event_ts: int) -> DurationWindow:
    """Fold one lit print into the window; returns the updated window.

    The first print only anchors the clock. Later prints append the duration
    since the previous one (floored at the 1 ns tape floor), evicting the
    oldest entry beyond capacity. Raises on a decreasing timestamp.
    """
    if window.last_ts is None:
        return DurationWindow(window.capacity, window.durations, lit_event_ts)
    if lit_event_ts < window.last_ts:
        raise ValueError(
            f"non-monotone lit timestamp: {lit_event_ts} < {window.last_ts}"
        )
    duration = max(lit_event_ts - window.last_ts, DURATION_FLOOR_NS) * _NS
    durations = window.durations + (duration,)
    if len(durations) > window.capacity:
        durations = durations[-window.capacity :]
    return DurationWindow(window.capacity, durations, lit_event_ts)


def exponential_cdf(delta: float, lam: float) -> float:
    """P(duration <= delta) under Exponential with mean ``lam`` seconds."""
    if lam <= 0:
        raise ValueError(f"scale must be > 0, got {lam}")
    if delta < 0:
        raise ValueError(f"duration must be >= 0, got {delta}")
    return -math.expm1(-delta / lam)


def plugin_pvalue(delta: float, window: DurationWindow) -> float:
    """Lower-tail probability of ``delta`` under the plug-in exponential.

    Uses the window mean as the scale with no allowance for estimator noise;
    kept for comparison against the predictive p-value.
    """
    _require_primed(window)
    return exponential_cdf(delta, window.mean)


def predictive_density(delta: float, window: DurationWindow) -> float:
    """Predictive density (1/seconds) of the next duration at ``delta``."""
    _require_primed(window)
    if delta < 0:
        raise ValueError(f"duration must be >= 0, got {delta}")
    n = window.n
    m = window.mean
    # n^(n+1) m^n / (n m + d)^(n+1)  ==  (1/m) * (n m / (n m + d))^(n+1)
    log_ratio = -math.log1p(delta / (n * m))
    return math.exp((n + 1) * log_ratio) / m


def predictive_cdf(delta: float, window: DurationWindow) -> float:
    """P(next duration <= delta) with the scale integrated out.

    1 - (n m / (n m + d))^n, computed in log space so it stays accurate for
    tiny d/m and converges cleanly to the exponential CDF as n grows.
    """
    _require_primed(window)
    if delta < 0:
        raise ValueError(f"duration must be >= 0, got {delta}")
    n = window.n
    m = window.mean
    return -math.expm1(-n * math.log1p(delta / (n * m)))


def fill_pvalue(delta: float, window: DurationWindow) -> float:
    """Surprise p-value of a fill-to-print duration: small = suspiciously quick.

    Lower-tail predictive probability, with the duration floored at the 1 ns
    tape floor and the result clamped to [1e-300, 1] so log p is finite.
    """
    _require_primed(window)
    p = predictive_cdf(max(delta, MIN_DURATION_S), window)
    return min(max(p, MIN_PVALUE), 1.0)


@dataclass(frozen=True)
class SurpriseRecord:
    """Per-dark-fill surprise scores.

    Forward fields are absent when no lit print lands inside the lookahead
    horizon (censored fill); backward fields are absent when the fill
    precedes every lit print. ``next_lit_side`` records relative direction
    only; it never modifies a p-value.
    """

    fill: TapeEvent
    delta_fwd: float | None
    delta_bwd: float | None
    p_fwd: float | None
    p_bwd: float | None
    n_used: int
    mean_used: float
    next_lit_side: Side = Side.UNKNOWN


def score_fill(
    tape: Tape,
    index: int,
    window: DurationWindow,
    horizon_s: float,
) -> SurpriseRecord:
    """Score the dark fill at ``tape.events[index]`` against ``window``.

    Forward duration runs to the first lit print after the fill (sequence
    order, so an equal-timestamp lit print counts as backward) and is
    censored beyond ``horizon_s``. The window is read, never mutated.
    """
    fill = tape.events[index]
    if not fill.is_dark():
        raise ValueError(f"event at index {index} is not a dark fill")
    if not window.primed():
        raise ValueError("window must hold at least one duration before scoring")

    horizon_ns = int(horizon_s * 1e9)
    events = tape.events
    delta_fwd = None
    next_side = Side.UNKNOWN
    for j in range(index + 1, len(events)):
        e = events[j]
        if e.ts - fill.ts > horizon_ns:
            break
        if e.is_lit():
            delta_fwd = max(e.ts - fill.ts, DURATION_FLOOR_NS) * _NS
            next_side = e.side
            break

    delta_bwd = None
    for j in range(index - 1, -1, -1):
        e = events[j]
        if e.is_lit():
            delta_bwd = max(fill.ts - e.ts, DURATION_FLOOR_NS) * _NS
            break

    return SurpriseRecord(
        fill=fill,
        delta_fwd=delta_fwd,
        delta_bwd=delta_bwd,
        p_fwd=fill_pvalue(delta_fwd, window) if delta_fwd is not None else None,
        p_bwd=fill_pvalue(delta_bwd, window) if delta_bwd is not None else None,
        n_used=window.n,
        mean_used=window.mean,
        next_lit_side=next_side,
    )


def score_tape(
    tape: Tape,
    window_size: int = DEFAULT_WINDOW_SIZE,
    horizon_mult: float = DEFAULT_HORIZON_MULT,
) -> list[SurpriseRecord]:
    """Stream a merged tape and score every dark fill.

    Lit prints feed the duration window; dark fills never do. Fills arriving
    before the window holds a single duration are skipped (nothing to score
    against). The lookahead horizon is ``horizon_mult`` times the window mean
    at scoring time.
    """
    window = DurationWindow(capacity=window_size)
    records: list[SurpriseRecord] = []
    for i, event in enumerate(tape.events):
        if event.is_lit():
            window = update_window(window, event.ts)
        elif window.primed():
            records.append(score_fill(tape, i, window, horizon_mult * window.mean))
    return records


def _require_primed(window: DurationWindow) -> None:
    if not window.primed():
        raise ValueError("window must hold at least one duration")


def record_to_obj(record: SurpriseRecord) -> dict:
    """Wire-format object for one scored fill (kind = "surprise")."""
    fill = record.fill
    obj = {
        "kind": "surprise",
        "ts": fill.ts,
        "symbol": fill.symbol,
        "venue": fill.venue,
        "side": fill.side.value,
        "size": fill.size,
        "n": record.n_used,
        "mean": record.mean_used,
        "next_lit_side": record.next_lit_side.value,
    }
    if record.delta_fwd is not None:
        obj["delta_fwd"] = record.delta_fwd
        obj["p_fwd"] = record.p_fwd
    if record.delta_bwd is not None:
        obj["delta_bwd"] = record.delta_bwd
        obj["p_bwd"] = record.p_bwd
    return obj
