"""Trend indicators over a per-commit entropy series."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .records import EntropySeries

DEFAULT_THRESHOLDS = (0.10, 0.20, 0.50, 0.80, 1.00)
PATTERN_EPSILON = 1e-3
MIN_PATTERN_LENGTH = 10


class SpreadPattern(str, enum.Enum):
    STABLE = "STABLE"
    STABILIZING = "STABILIZING"
    INCREASING = "INCREASING"


def _values(series: EntropySeries | Sequence[float], metric: str) -> np.ndarray:
    if isinstance(series, EntropySeries):
        return series.values(metric)
    return np.asarray(series, dtype=float)


def _positions(series: EntropySeries | Sequence[float]) -> np.ndarray:
    if isinstance(series, EntropySeries):
        return series.positions
    return np.arange(len(series), dtype=float)


@dataclass(frozen=True)
class SpikeDropTable:
    counts: dict[float, tuple[int, int]]
    # consecutive pairs whose base value is 0 (relative change undefined)
    skipped: int = 0

    def __getitem__(self, threshold: float) -> tuple[int, int]:
        return self.counts[threshold]


def count_spikes_drops(
    series: EntropySeries | Sequence[float],
    thresholds: Iterable[float] = DEFAULT_THRESHOLDS,
    metric: str = "total_h_token",
) -> SpikeDropTable:
    """Count consecutive pairs whose relative rise (spike) or fall (drop) reaches each threshold."""
    v = _values(series, metric)
    if len(v) < 2:
        raise ValueError("spike/drop counting needs at least 2 points")
    thresholds = sorted(float(t) for t in thresholds)
    if any(t <= 0 or not math.isfinite(t) for t in thresholds):
        raise ValueError("thresholds must be positive and finite")
    base, nxt = v[:-1], v[1:]
    ok = base > 0
    rel = (nxt[ok] - base[ok]) / base[ok]
    counts = {t: (int(np.sum(rel >= t)), int(np.sum(-rel >= t))) for t in thresholds}
    return SpikeDropTable(counts, int(np.sum(~ok)))


def ols(x: np.ndarray, y: np.ndarray) -> tuple[float, float]:
    """Least-squares ``(slope, intercept)`` of ``y`` on ``x``."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if len(x) < 2:
        raise ValueError("linear regression needs at least 2 points")
    xm, ym = x.mean(), y.mean()
    dx = x - xm
    sxx = float(dx @ dx)
    if sxx == 0:
        raise ValueError("regression x values are all equal")
    slope = float(dx @ (y - ym)) / sxx
    return slope, float(ym - slope * xm)


def linear_trend(series: EntropySeries | Sequence[float], metric: str = "total_h_token") -> tuple[float, float]:
    return ols(_positions(series), _values(series, metric))


def _segments(n: int, k: int) -> list[slice]:
    if k < 1:
        raise ValueError("segment count must be >= 1")
    base, extra = divmod(n, k)
    out, start = [], 0
    for i in range(k):
        size = base + (1 if i < extra else 0)
        out.append(slice(start, start + size))
        start += size
    return out


def segment_slopes(
    series: EntropySeries | Sequence[float], k: int, metric: str = "total_h_token"
) -> list[float]:
    """OLS slope of each of ``k`` contiguous, near-equal segments."""
    x, y = _positions(series), _values(series, metric)
    segs = _segments(len(y), k)
    if any(s.stop - s.start < 2 for s in segs):
        raise ValueError(f"{k} segments over {len(y)} points leaves a segment with < 2 points; use a smaller k")
    return [ols(x[s], y[s])[0] for s in segs]


def half_slopes(series: EntropySeries | Sequence[float], metric: str = "spread") -> tuple[float, float]:
    """Slopes of the two halves, each divided by that half's mean value."""
    x, y = _positions(series), _values(series, metric)
    out = []
    for s in _segments(len(y), 2):
        slope = ols(x[s], y[s])[0]
        mean = float(np.mean(y[s]))
        out.append(slope / abs(mean) if mean else (0.0 if slope == 0 else math.copysign(math.inf, slope)))
    return out[0], out[1]


def classify_spread_pattern(
    series: EntropySeries | Sequence[float],
    metric: str = "spread",
    epsilon: float = PATTERN_EPSILON,
) -> SpreadPattern:
    y = _values(series, metric)
    if len(y) < MIN_PATTERN_LENGTH:
        raise ValueError(f"spread pattern needs at least {MIN_PATTERN_LENGTH} points, got {len(y)}")
    s1, s2 = half_slopes(series, metric)
    if abs(s1) < epsilon and abs(s2) < epsilon:
        return SpreadPattern.STABLE
    if s1 >= epsilon and abs(s2) < epsilon:
        return SpreadPattern.STABILIZING
    return SpreadPattern.INCREASING


def relative_deltas(series: EntropySeries | Sequence[float], metric: str = "total_h_token") -> np.ndarray:
    v = _values(series, metric)
    base, nxt = v[:-1], v[1:]
    ok = base != 0
    return (nxt[ok] - base[ok]) / np.abs(base[ok])


def smoothness(series: EntropySeries | Sequence[float], metric: str = "total_h_token") -> float:
    """Coefficient of variation of the absolute relative per-commit changes (0 if there are none)."""
    r = np.abs(relative_deltas(series, metric))
    if len(r) == 0 or r.mean() == 0:
        return 0.0
    return float(r.std() / r.mean())


@dataclass(frozen=True)
class TrendReport:
    metric: str
    n_commits: int
    overall_slope: float | None
    intercept: float | None
    segment_slopes: list[float]
    spike_drop_table: dict[float, tuple[int, int]]
    smoothness: float
    spread_pattern: SpreadPattern | None
    spread_half_slopes: tuple[float, float] | None
    continuing_change: bool
    increasing_complexity: bool
    notes: list[str] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "metric": self.metric,
            "n_commits": self.n_commits,
            "overall_slope": self.overall_slope,
            "intercept": self.intercept,
            "segment_slopes": self.segment_slopes,
            "spike_drop_table": [
                {"threshold": t, "spikes": s, "drops": d} for t, (s, d) in sorted(self.spike_drop_table.items())
            ],
            "smoothness": self.smoothness,
            "spread_pattern": self.spread_pattern.value if self.spread_pattern else None,
            "spread_half_slopes": list(self.spread_half_slopes) if self.spread_half_slopes else None,
            "continuing_change": self.continuing_change,
            "increasing_complexity": self.increasing_complexity,
            "notes": self.notes,
        }


def lehman_indicators(
    series: EntropySeries,
    metric: str = "total_h_token",
    thresholds: Iterable[float] = DEFAULT_THRESHOLDS,
    segments: int = 4,
    epsilon: float = PATTERN_EPSILON,
) -> TrendReport:
    """Bundle the trend indicators used to discuss continuing change,
    increasing complexity and smooth growth.

    Indicators whose preconditions the series does not meet (too few points
    for a regression, a split or a pattern) are left empty and explained in
    ``notes``.
    """
    if len(series) == 0:
        raise ValueError("empty series")
    thresholds = tuple(thresholds)
    notes: list[str] = []
    v = series.values(metric)

    slope = intercept = None
    table: dict[float, tuple[int, int]] = {float(t): (0, 0) for t in thresholds}
    if len(series) >= 2:
        slope, intercept = linear_trend(series, metric)
        table = count_spikes_drops(series, thresholds, metric).counts
    else:
        notes.append("fewer than 2 commits: no regression or spike/drop counts")

    seg: list[float] = []
    k = min(segments, len(series) // 2)
    if k >= 1:
        seg = segment_slopes(series, k, metric)
        if k < segments:
            notes.append(f"segments reduced from {segments} to {k}")

    pattern = halves = None
    if len(series) >= MIN_PATTERN_LENGTH:
        pattern = classify_spread_pattern(series, "spread", epsilon)
        halves = half_slopes(series, "spread")
    else:
        notes.append(f"fewer than {MIN_PATTERN_LENGTH} commits: no spread pattern")

    return TrendReport(
        metric=metric,
        n_commits=len(series),
        overall_slope=slope,
        intercept=intercept,
        segment_slopes=seg,
        spike_drop_table=table,
        smoothness=smoothness(series, metric),
        spread_pattern=pattern,
        spread_half_slopes=halves,
        continuing_change=bool(np.any(np.diff(v) != 0)),
        increasing_complexity=slope is not None and slope > 0,
        notes=notes,
    )
