"""Spearman rank correlation and the entropy-vs-classic-metric tables."""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
from scipy import stats as sps

from .records import FileChangeRecord, write_csv

SIGNIFICANCE = 0.005
DELTA_METRICS = ("delta_h_token", "delta_h_ast_edge", "delta_h_ast_node")
LEVEL_METRICS = (
    "h_token",
    "h_token_no_comments",
    "h_comments_only",
    "h_token_no_kw_num",
    "h_ast_edge",
    "h_ast_node",
)
CLASSIC_METRICS = (
    "insertions",
    "deletions",
    "insertions_minus_deletions",
    "nloc",
    "cyclomatic",
    "token_count",
    "methods_changed",
)


class UndefinedCorrelationError(ValueError):
    pass


def average_ranks(values: Sequence[float]) -> np.ndarray:
    """1-based ranks; tied values share the mean of the ranks they span."""
    a = np.asarray(values, dtype=float)
    order = np.argsort(a, kind="mergesort")
    sorted_a = a[order]
    ranks = np.empty(len(a), dtype=float)
    i = 0
    n = len(a)
    while i < n:
        j = i
        while j + 1 < n and sorted_a[j + 1] == sorted_a[i]:
            j += 1
        ranks[order[i : j + 1]] = (i + j) / 2 + 1
        i = j + 1
    return ranks


def _pearson(a: np.ndarray, b: np.ndarray) -> float:
    da = a - a.mean()
    db = b - b.mean()
    denom = math.sqrt(float(da @ da) * float(db @ db))
    return float(da @ db) / denom


def spearman(x: Sequence[float], y: Sequence[float]) -> tuple[float, float]:
    """Tie-corrected Spearman rho and its two-sided p-value (t approximation)."""
    if len(x) != len(y):
        raise ValueError(f"length mismatch: {len(x)} != {len(y)}")
    n = len(x)
    if n < 4:
        raise ValueError(f"need at least 4 pairs, got {n}")
    rx, ry = average_ranks(x), average_ranks(y)
    if np.all(rx == rx[0]) or np.all(ry == ry[0]):
        raise UndefinedCorrelationError("correlation undefined for a constant vector")
    rho = max(-1.0, min(1.0, _pearson(rx, ry)))
    if abs(rho) == 1.0:
        return rho, 0.0
    t = rho * math.sqrt((n - 2) / (1 - rho * rho))
    p = float(2 * sps.t.sf(abs(t), n - 2))
    return rho, min(1.0, p)


@dataclass(frozen=True)
class CorrelationCell:
    metric_x: str
    metric_y: str
    rho: float | None
    n: int
    p_value: float | None
    error: str | None = None

    @property
    def significant(self) -> bool:
        return self.p_value is not None and self.p_value < SIGNIFICANCE


def _metric(record: FileChangeRecord, name: str) -> float:
    if name == "insertions_minus_deletions":
        return record.insertions - record.deletions
    return getattr(record, name)


def _cells(columns: dict[str, list[float]], xs: Sequence[str], ys: Sequence[str]) -> list[CorrelationCell]:
    out = []
    for mx in xs:
        for my in ys:
            x, y = columns[mx], columns[my]
            try:
                rho, p = spearman(x, y)
                out.append(CorrelationCell(mx, my, rho, len(x), p))
            except ValueError as exc:
                out.append(CorrelationCell(mx, my, None, len(x), None, str(exc)))
    return out


def correlation_table(
    files: Sequence[FileChangeRecord],
    level: str = "file",
    entropy_metrics: Sequence[str] | None = None,
    classic_metrics: Sequence[str] = CLASSIC_METRICS,
    use_levels: bool = False,
) -> list[CorrelationCell]:
    """Spearman correlations between entropy and classic metrics.

    At ``level="file"`` each file change is one sample. At ``level="commit"``
    the file changes of a commit are summed first, so the entropy column is
    the commit's change of the project total.
    """
    if not files:
        raise ValueError("empty dataset")
    if entropy_metrics is None:
        entropy_metrics = LEVEL_METRICS if use_levels else DELTA_METRICS
    names = [*entropy_metrics, *classic_metrics]
    if level == "file":
        columns = {m: [float(_metric(r, m)) for r in files] for m in names}
    elif level == "commit":
        sums: dict[str, dict[str, float]] = defaultdict(lambda: dict.fromkeys(names, 0.0))
        for r in files:
            row = sums[r.commit_id]
            for m in names:
                row[m] += _metric(r, m)
        columns = {m: [row[m] for row in sums.values()] for m in names}
    else:
        raise ValueError(f"level must be 'file' or 'commit', not {level!r}")
    return _cells(columns, entropy_metrics, classic_metrics)


def write_correlations(path: Path, cells: Iterable[CorrelationCell]) -> None:
    header = ["metric_x", "metric_y", "rho", "n", "p_value", "significant"]
    write_csv(path, header, ([c.metric_x, c.metric_y, c.rho, c.n, c.p_value, c.significant] for c in cells))
