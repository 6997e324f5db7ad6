"""Streaming z-score detection of surprising entropy deltas, and label scoring."""

from __future__ import annotations

import csv
import enum
import math
from collections import Counter, deque
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .records import EntropySeries

SENTINEL_Z = math.inf
DEFAULT_MEMORY_FRACTIONS = (0.5, 0.75, 1.0)


@dataclass(frozen=True)
class DetectorConfig:
    """Exactly one of ``memory_fraction`` (batch) or ``window_size`` (streaming)."""

    memory_fraction: float | None = 1.0
    window_size: int | None = None
    z_threshold: float = 3.0
    min_samples: int = 30

    def __post_init__(self):
        if (self.memory_fraction is None) == (self.window_size is None):
            raise ValueError("set exactly one of memory_fraction and window_size")
        if self.memory_fraction is not None and not 0 < self.memory_fraction <= 1:
            raise ValueError("memory_fraction must be in (0, 1]")
        if self.window_size is not None and self.window_size < 1:
            raise ValueError("window_size must be >= 1")
        if not self.z_threshold > 0:
            raise ValueError("z_threshold must be > 0")
        if self.min_samples < 1:
            raise ValueError("min_samples must be >= 1")

    def capacity(self, n_total: int) -> int:
        if self.window_size is not None:
            return self.window_size
        return math.floor(self.memory_fraction * n_total)

    @property
    def label(self) -> str:
        if self.window_size is not None:
            return f"window={self.window_size}"
        return f"memory={self.memory_fraction:g}"


class Direction(str, enum.Enum):
    INSERTION = "INSERTION"
    REMOVAL = "REMOVAL"


@dataclass(frozen=True)
class AnomalyEvent:
    commit_id: str
    position: int
    delta: float
    z_score: float
    direction: Direction
    files_changed: int
    window_mean: float
    window_std: float

    def to_json(self) -> dict:
        return {
            "commit_id": self.commit_id,
            "position": self.position,
            "delta": self.delta,
            # JSON has no infinity; the degenerate-window sentinel is written as a string
            "z_score": self.z_score if math.isfinite(self.z_score) else "inf",
            "direction": self.direction.value,
            "files_changed": self.files_changed,
            "window_mean": self.window_mean,
            "window_std": self.window_std,
        }


class RollingWindow:
    """Bounded FIFO of values with O(1) mean, population std and exact constancy test."""

    def __init__(self, capacity: int):
        self.capacity = capacity
        self._values: deque[float] = deque()
        self._distinct: Counter = Counter()
        self._mean = 0.0
        self._m2 = 0.0

    def __len__(self) -> int:
        return len(self._values)

    def push(self, x: float) -> None:
        if self.capacity <= 0:
            return
        self._values.append(x)
        self._distinct[x] += 1
        n = len(self._values)
        d = x - self._mean
        self._mean += d / n
        self._m2 += d * (x - self._mean)
        while len(self._values) > self.capacity:
            self._pop()

    def _pop(self) -> None:
        x = self._values.popleft()
        self._distinct[x] -= 1
        if not self._distinct[x]:
            del self._distinct[x]
        n = len(self._values)
        if n == 0:
            self._mean = self._m2 = 0.0
            return
        old_mean = self._mean
        self._mean = (old_mean * (n + 1) - x) / n
        self._m2 -= (x - old_mean) * (x - self._mean)
        if len(self._distinct) == 1:
            # collapse accumulated rounding when the window becomes constant
            self._mean, self._m2 = next(iter(self._distinct)), 0.0

    @property
    def constant(self) -> bool:
        return len(self._distinct) == 1

    def stats(self) -> tuple[float, float]:
        if self.constant:
            return next(iter(self._distinct)), 0.0
        var = max(self._m2 / len(self._values), 0.0)
        return self._mean, math.sqrt(var)


def detect(
    deltas: Sequence[float],
    config: DetectorConfig = DetectorConfig(),
    commit_ids: Sequence[str] | None = None,
    positions: Sequence[int] | None = None,
    files_changed: Sequence[int] | None = None,
    n_total: int | None = None,
) -> list[AnomalyEvent]:
    """Flag deltas that are outliers against the window of deltas before them.

    The window holds at most ``config.capacity(n_total)`` past values, where
    ``n_total`` defaults to ``len(deltas)``. A delta is scored only once the
    window holds ``min_samples`` values, and is never part of its own window.
    """
    n = len(deltas)
    window = RollingWindow(config.capacity(n if n_total is None else n_total))
    events = []
    for i, d in enumerate(deltas):
        d = float(d)
        if len(window) >= config.min_samples:
            mu, sigma = window.stats()
            z = None
            if sigma > 0:
                z = (d - mu) / sigma
                if abs(z) < config.z_threshold:
                    z = None
            elif d != mu:
                z = math.copysign(SENTINEL_Z, d - mu)
            if z is not None:
                events.append(
                    AnomalyEvent(
                        commit_id=commit_ids[i] if commit_ids is not None else str(i),
                        position=positions[i] if positions is not None else i,
                        delta=d,
                        z_score=z,
                        direction=Direction.INSERTION if d > 0 else Direction.REMOVAL,
                        files_changed=files_changed[i] if files_changed is not None else 0,
                        window_mean=mu,
                        window_std=sigma,
                    )
                )
        window.push(d)
    return events


def detect_series(
    series: EntropySeries,
    config: DetectorConfig = DetectorConfig(),
    metric: str = "total_h_token",
    files_changed: Sequence[int] | None = None,
) -> list[AnomalyEvent]:
    return detect(
        series.deltas(metric).tolist(),
        config,
        commit_ids=[p.commit_id for p in series.points],
        positions=[p.position for p in series.points],
        files_changed=files_changed,
    )


# ---------------------------------------------------------------------------
# labels and precision

BASE_CATEGORIES = (
    "config",
    "documentation",
    "file_ext_convert",
    "ex_code",
    "autogen_code",
    "soft_feat_add",
    "soft_feat_up",
    "soft_feat_rem",
    "refactor",
    "rebase",
    "old_code_rem",
    "test_code",
    "bug_fix",
    "prod_feat_add",
    "prod_feat_up",
    "prod_feat_rem",
    "commit_revert",
    "multiple_changes",
)
DEPENDENCY_QUALIFIERS = ("add_dep", "rem_dep", "ext_dep")


def parse_category(category: str) -> tuple[str, str | None]:
    """Split ``"soft_feat_add+ext_dep"`` into ``("soft_feat_add", "ext_dep")``."""
    base, sep, qualifier = category.partition("+")
    if base not in BASE_CATEGORIES:
        raise ValueError(f"unknown event category {category!r}")
    if sep:
        if not base.startswith("soft_feat_") or qualifier not in DEPENDENCY_QUALIFIERS:
            raise ValueError(f"invalid dependency qualifier in {category!r}")
        return base, qualifier
    return base, None


@dataclass(frozen=True)
class EventLabel:
    commit_id: str
    category: str
    relevant: bool

    def __post_init__(self):
        parse_category(self.category)


class StrictnessLevel(str, enum.Enum):
    MAXIMALLY_CONSERVATIVE = "MAXIMALLY_CONSERVATIVE"
    CONSERVATIVE = "CONSERVATIVE"
    LEAST_CONSERVATIVE = "LEAST_CONSERVATIVE"


_FEATURE_INSERT_UPDATE = {"soft_feat_add", "soft_feat_up", "prod_feat_add", "prod_feat_up"}
_FEATURE_REMOVAL = {"soft_feat_rem", "prod_feat_rem"}


def counts_as_true_positive(label: EventLabel, level: StrictnessLevel) -> bool:
    """Nested acceptance: feature insertions/updates, then feature removals,
    then porting and dependency-extraction events."""
    if not label.relevant:
        return False
    base, qualifier = parse_category(label.category)
    if qualifier == "ext_dep":
        return level is StrictnessLevel.LEAST_CONSERVATIVE
    if base in _FEATURE_INSERT_UPDATE:
        return True
    if base in _FEATURE_REMOVAL:
        return level is not StrictnessLevel.MAXIMALLY_CONSERVATIVE
    return False


class MissingLabelsError(KeyError):
    def __init__(self, missing: Sequence[str]):
        super().__init__(f"unlabelled events: {', '.join(missing)}")
        self.missing = list(missing)


def score_events(
    events: Iterable[AnomalyEvent | str],
    labels: Mapping[str, EventLabel] | Iterable[EventLabel],
    level: StrictnessLevel,
) -> float:
    """Fraction of labelled events that are true positives at ``level``."""
    if not isinstance(labels, Mapping):
        labels = {lab.commit_id: lab for lab in labels}
    ids = [e.commit_id if isinstance(e, AnomalyEvent) else e for e in events]
    missing = [c for c in ids if c not in labels]
    if missing:
        raise MissingLabelsError(missing)
    if not ids:
        return 0.0
    return sum(counts_as_true_positive(labels[c], level) for c in ids) / len(ids)


def read_labels(path: str | Path) -> dict[str, EventLabel]:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        missing = {"commit_id", "category", "relevant"} - set(reader.fieldnames or ())
        if missing:
            raise ValueError(f"{path}: missing columns {sorted(missing)}")
        out = {}
        for row in reader:
            rel = row["relevant"].strip().lower()
            if rel not in ("true", "false", "1", "0", "yes", "no"):
                raise ValueError(f"{path}: bad relevant value {row['relevant']!r}")
            out[row["commit_id"]] = EventLabel(row["commit_id"], row["category"].strip(), rel in ("true", "1", "yes"))
        return out


# ---------------------------------------------------------------------------
# audit planning

def sample_size(population: int, margin: float = 0.05, z: float = 1.959964, p: float = 0.5) -> int:
    """Sample size for estimating a proportion, with finite-population correction."""
    if population <= 0:
        return 0
    n0 = z * z * p * (1 - p) / (margin * margin)
    return min(population, math.ceil(n0 / (1 + (n0 - 1) / population)))


@dataclass(frozen=True)
class RunSummary:
    config: DetectorConfig
    events_detected: int
    sample_size: int


def summarize_runs(configs: Iterable[DetectorConfig], deltas: Sequence[float]) -> list[RunSummary]:
    out = []
    for cfg in configs:
        n = len(detect(deltas, cfg))
        out.append(RunSummary(cfg, n, sample_size(n)))
    return out
