"""Post-fill slippage estimation, detectability power analysis, and reports.

Slippage of a fill is the signed log-mid move over a short horizon,
sign * (log mid(t + tau) - log mid(t)) * 1e4 basis points, positive when the
price moved with the fill (adverse for the filler). Detecting a mean
slippage mu against return noise sigma with a t-test needs at least
(sigma/mu)^2 fills, the 1/Sharpe^2 bound; the module also estimates the
empirical fill count where the seed-averaged running t-statistic reaches a
target, to show the bound at work on simulated drift.

Reports: mean slippage per p-value bucket (signalling fills should sit in
the low-p buckets with visibly higher slippage) and the share of flagged
fills above a minimum fill-size threshold.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .surprise import SurpriseRecord
from .tape import Side, TapeEvent

__all__ = [
    "PricePath",
    "SlippageConfig",
    "SlippageStats",
    "PowerAnalysis",
    "BucketRow",
    "ThresholdRow",
    "CensoredFillError",
    "post_fill_slippage",
    "slippages",
    "mean_slippage",
    "min_fills_bound",
    "empirical_crossing",
    "bucket_report",
    "size_threshold_report",
    "arrival_slippage",
]

BP = 1e4  # basis points per unit log return


class CensoredFillError(ValueError):
    """The price path does not cover the fill's horizon."""


@dataclass(frozen=True)
class PricePath:
    """Log mid-price samples at strictly increasing nanosecond timestamps.

    Values between samples are last-observation-carried-forward: the mid does
    not move without an observation.
    """

    ts: np.ndarray
    log_mid: np.ndarray

    def __post_init__(self) -> None:
        ts = np.asarray(self.ts, dtype=np.int64)
        log_mid = np.asarray(self.log_mid, dtype=np.float64)
        if ts.shape != log_mid.shape or ts.ndim != 1:
            raise ValueError("ts and log_mid must be 1-d arrays of equal length")
        if ts.size and np.any(np.diff(ts) <= 0):
            raise ValueError("path timestamps must be strictly increasing")
        if log_mid.size and not np.all(np.isfinite(log_mid)):
            raise ValueError("log_mid must be finite")
        object.__setattr__(self, "ts", ts)
        object.__setattr__(self, "log_mid", log_mid)

    def __len__(self) -> int:
        return int(self.ts.size)

    @property
    def start_ts(self) -> int:
        return int(self.ts[0])

    @property
    def end_ts(self) -> int:
        return int(self.ts[-1])

    def log_mid_at(self, ts):
        """LOCF value(s) at ts (scalar or array). Raises before first sample."""
        idx = np.searchsorted(self.ts, ts, side="right") - 1
        if np.any(idx < 0):
            raise CensoredFillError("timestamp precedes the first path sample")
        return self.log_mid[idx]

    def covers(self, t0: int, t1: int) -> bool:
        return len(self) > 0 and self.start_ts <= t0 and t1 <= self.end_ts


@dataclass(frozen=True)
class SlippageConfig:
    """Horizon for post-fill slippage; prices interpolate LOCF."""

    tau: float = 5.0  # seconds

    def __post_init__(self) -> None:
        if not self.tau > 0:
            raise ValueError(f"tau must be > 0, got {self.tau}")

    @property
    def tau_ns(self) -> int:
        return int(round(self.tau * 1e9))


def post_fill_slippage(fill: TapeEvent, path: PricePath, cfg: SlippageConfig) -> float:
    """Signed post-fill return in bp; positive = price moved with the fill.

    The start mid is the fill's own ``mid`` when present, else LOCF from the
    path. Raises CensoredFillError when the path does not cover
    [fill.ts, fill.ts + tau].
    """
    sign = fill.side.sign
    if sign == 0:
        raise ValueError("fill side must be buy or sell")
    end_ts = fill.ts + cfg.tau_ns
    if not path.covers(fill.ts, end_ts):
        raise CensoredFillError(
            f"path [{path.start_ts}, {path.end_ts}] does not cover fill horizon "
            f"[{fill.ts}, {end_ts}]"
        )
    p0 = math.log(fill.mid) if fill.mid is not None else float(path.log_mid_at(fill.ts))
    p1 = float(path.log_mid_at(end_ts))
    return sign * (p1 - p0) * BP


def slippages(
    fills: Sequence[TapeEvent], path: PricePath, cfg: SlippageConfig
) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized per-fill slippage.

    Returns (values, covered) where ``covered`` marks fills whose horizon the
    path covers; values of censored fills are NaN.
    """
    n = len(fills)
    values = np.full(n, np.nan)
    covered = np.zeros(n, dtype=bool)
    if n == 0 or len(path) == 0:
        return values, covered
    ts = np.array([f.ts for f in fills], dtype=np.int64)
    signs = np.array([f.side.sign for f in fills], dtype=np.float64)
    if np.any(signs == 0):
        raise ValueError("every fill side must be buy or sell")
    end_ts = ts + cfg.tau_ns
    covered = (ts >= path.start_ts) & (end_ts <= path.end_ts)
    if not np.any(covered):
        return values, covered
    mids = np.array(
        [math.log(f.mid) if f.mid is not None else np.nan for f in fills],
        dtype=np.float64,
    )
    p0 = np.where(np.isnan(mids[covered]), path.log_mid_at(ts[covered]), mids[covered])
    p1 = path.log_mid_at(end_ts[covered])
    values[covered] = signs[covered] * (p1 - p0) * BP
    return values, covered


@dataclass(frozen=True)
class SlippageStats:
    """Sample mean/std/t over uncensored fills.

    ``degenerate`` is set when the sample std is zero, leaving t undefined.
    """

    mean: float
    std: float
    t_stat: float
    count: int
    censored: int = 0
    degenerate: bool = False


def mean_slippage(
    fills: Sequence[TapeEvent], path: PricePath, cfg: SlippageConfig
) -> SlippageStats:
    """Mean, std and t = mean * sqrt(count) / std over uncensored fills."""
    values, covered = slippages(fills, path, cfg)
    sample = values[covered]
    censored = int(len(fills) - sample.size)
    if sample.size < 2:
        raise ValueError(f"need >= 2 uncensored fills, got {sample.size}")
    mean = float(sample.mean())
    std = float(sample.std(ddof=1))
    if std == 0.0:
        return SlippageStats(mean, 0.0, math.nan, int(sample.size), censored, degenerate=True)
    t = mean * math.sqrt(sample.size) / std
    return SlippageStats(mean, std, t, int(sample.size), censored)


@dataclass(frozen=True)
class PowerAnalysis:
    """Detectability bound: T = (sigma/mu)^2 fills for a t = 1 signal."""

    mu: float
    sigma: float
    min_fills: float


def min_fills_bound(mu: float, sigma: float) -> float:
    """Minimum fills to detect mean slippage mu against noise sigma.

    (sigma/mu)^2, the 1/Sharpe^2 bound; infinite when mu = 0. Half the signal
    costs four times the fills.
    """
    if sigma <= 0:
        raise ValueError(f"sigma must be > 0, got {sigma}")
    if mu == 0:
        return math.inf
    return (sigma / mu) ** 2


def power_analysis(mu: float, sigma: float) -> PowerAnalysis:
    return PowerAnalysis(mu=mu, sigma=sigma, min_fills=min_fills_bound(mu, sigma))


def empirical_crossing(
    mu: float,
    sigma: float,
    seeds: int = 200,
    seed: int = 0,
    t_target: float = 2.0,
    max_fills: int | None = None,
) -> int:
    """Fill count where the seed-median running t-statistic reaches t_target.

    Each seed draws i.i.d. per-fill slippages Normal(mu, sigma^2); the running
    t = mean * sqrt(k) / std trajectories are combined by pointwise median
    across seeds. A single trajectory first-passes the target far too early by
    chance, and the pointwise mean is wrecked by the infinite-variance t
    values at tiny k; the median trajectory tracks mu * sqrt(k) / sigma and
    crosses near (t_target * sigma / mu)^2. Returns max_fills when it never
    crosses.
    """
    if sigma <= 0 or mu == 0:
        raise ValueError("need sigma > 0 and mu != 0 for a finite crossing")
    bound = min_fills_bound(mu, sigma)
    if max_fills is None:
        max_fills = int(16 * t_target**2 * bound)
    k = np.arange(1, max_fills + 1, dtype=np.float64)
    trajectories = np.empty((seeds, max_fills))
    root = np.random.SeedSequence(seed)
    for row, child in enumerate(root.spawn(seeds)):
        rng = np.random.Generator(np.random.Philox(child))
        x = rng.normal(mu, sigma, size=max_fills)
        csum = np.cumsum(x)
        csum2 = np.cumsum(x * x)
        mean = csum / k
        var = (csum2 - k * mean**2) / np.maximum(k - 1, 1)
        with np.errstate(invalid="ignore", divide="ignore"):
            t = mean * np.sqrt(k) / np.sqrt(var)
        t[0] = 0.0
        trajectories[row] = t
    med = np.median(trajectories, axis=0)
    hits = np.flatnonzero(np.abs(med) >= t_target)
    return int(hits[0] + 1) if hits.size else max_fills


@dataclass(frozen=True)
class BucketRow:
    """One p-value bucket: [p_lo, p_hi), mean slippage with its stderr."""

    p_lo: float
    p_hi: float
    mean: float | None
    stderr: float | None
    n: int


def bucket_report(
    records: Sequence[tuple[SurpriseRecord, float]], buckets: int = 10
) -> list[BucketRow]:
    """Mean slippage per equal-width forward-p bucket over [0, 1].

    Records with a censored forward duration are skipped. Sparse buckets are
    reported with n = 0 and no mean. The last bucket is closed at 1.
    """
    if buckets < 1:
        raise ValueError(f"buckets must be >= 1, got {buckets}")
    sums = np.zeros(buckets)
    sums2 = np.zeros(buckets)
    counts = np.zeros(buckets, dtype=np.int64)
    for record, slip in records:
        if record.p_fwd is None:
            continue
        b = min(int(record.p_fwd * buckets), buckets - 1)
        sums[b] += slip
        sums2[b] += slip * slip
        counts[b] += 1
    rows: list[BucketRow] = []
    for b in range(buckets):
        lo, hi = b / buckets, (b + 1) / buckets
        n = int(counts[b])
        if n == 0:
            rows.append(BucketRow(lo, hi, None, None, 0))
            continue
        mean = sums[b] / n
        if n > 1:
            var = max(sums2[b] / n - mean * mean, 0.0) * n / (n - 1)
            stderr = math.sqrt(var / n)
        else:
            stderr = None
        rows.append(BucketRow(lo, hi, float(mean), stderr, n))
    return rows


@dataclass(frozen=True)
class ThresholdRow:
    """Share of flagged fills (p_fwd < alpha) among fills with size >= threshold."""

    threshold: float
    share: float | None
    n: int


def size_threshold_report(
    records: Sequence[tuple[SurpriseRecord, float]],
    thresholds: Sequence[float],
    alpha: float = 0.05,
) -> list[ThresholdRow]:
    """Signalling share as a function of a minimum fill-size threshold.

    For each threshold the cohort is the fills at least that large with a
    scored forward duration; empty cohorts report an absent share.
    """
    if not records:
        raise ValueError("no records to report on")
    sizes = []
    flagged = []
    for record, size in records:
        if record.p_fwd is None:
            continue
        sizes.append(size)
        flagged.append(record.p_fwd < alpha)
    sizes_arr = np.asarray(sizes, dtype=np.float64)
    flagged_arr = np.asarray(flagged, dtype=bool)
    rows: list[ThresholdRow] = []
    for threshold in thresholds:
        mask = sizes_arr >= threshold
        n = int(mask.sum())
        share = float(flagged_arr[mask].mean()) if n else None
        rows.append(ThresholdRow(float(threshold), share, n))
    return rows


def path_to_lines(path: PricePath):
    """Serialize a price path as wire lines (kind = "mid")."""
    for t, v in zip(path.ts, path.log_mid):
        yield json.dumps({"kind": "mid", "ts": int(t), "log_mid": float(v)})


def path_from_lines(lines) -> PricePath:
    """Inverse of path_to_lines."""
    ts: list[int] = []
    vals: list[float] = []
    for line in lines:
        line = line.strip()
        if not line:
            continue
        obj = json.loads(line)
        if obj.get("kind") != "mid":
            raise ValueError(f"expected kind 'mid' in path line, got {obj.get('kind')!r}")
        ts.append(int(obj["ts"]))
        vals.append(float(obj["log_mid"]))
    return PricePath(np.array(ts, dtype=np.int64), np.array(vals))


def bucket_row_to_obj(row: BucketRow) -> dict:
    obj: dict = {"kind": "report", "report": "slippage_by_pvalue", "p_lo": row.p_lo, "p_hi": row.p_hi, "n": row.n}
    if row.mean is not None:
        obj["mean_bp"] = row.mean
    if row.stderr is not None:
        obj["stderr_bp"] = row.stderr
    return obj


def threshold_row_to_obj(row: ThresholdRow) -> dict:
    obj: dict = {"kind": "report", "report": "signalling_by_min_size", "threshold": row.threshold, "n": row.n}
    if row.share is not None:
        obj["share"] = row.share
    return obj


def arrival_slippage(fills: Sequence[TapeEvent]) -> float:
    """Order-level arrival slippage in bp over one order's fills.

    Signed difference between the size-weighted average fill price and the
    order's first-fill mid (the arrival proxy: a dark order's first fill is
    effectively at mid). Positive = adverse for the order's side.
    """
    if not fills:
        raise ValueError("order has no fills")
    sign = fills[0].side.sign
    if sign == 0:
        raise ValueError("order side must be buy or sell")
    first = fills[0]
    arrival = first.mid if first.mid is not None else first.price
    weights = np.array([f.size for f in fills], dtype=np.float64)
    prices = np.array([f.price for f in fills], dtype=np.float64)
    vwap = float(np.average(prices, weights=weights))
    return sign * (math.log(vwap) - math.log(arrival)) * BP
