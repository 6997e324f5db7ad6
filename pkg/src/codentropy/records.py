"""Dataset rows and their on-disk formats (RFC-4180 CSV and JSON)."""

from __future__ import annotations

import csv
import dataclasses
import enum
import io
import json
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

COMMITS_CSV = "commits.csv"
FILE_CHANGES_CSV = "file_changes.csv"
SERIES_JSON = "series.json"


class ChangeType(str, enum.Enum):
    ADD = "ADD"
    MODIFY = "MODIFY"
    RENAME = "RENAME"
    DELETE = "DELETE"


@dataclass(frozen=True)
class ProjectTotals:
    total_h_token: float = 0.0
    total_h_ast_edge: float = 0.0
    total_h_ast_node: float = 0.0
    file_count: int = 0

    @property
    def spread(self) -> float:
        return self.total_h_token / self.file_count if self.file_count else 0.0


@dataclass(frozen=True)
class CommitRecord:
    commit_id: str
    position: int
    timestamp: int
    author_id: str
    message_length: int
    is_merge: bool
    files_changed: int
    insertions: int
    deletions: int
    totals: ProjectTotals


@dataclass(frozen=True)
class FileChangeRecord:
    commit_id: str
    file_path: str
    old_path: str | None
    change_type: ChangeType
    insertions: int
    deletions: int
    nloc: int
    token_count: int
    cyclomatic: int
    methods_changed: int
    h_token: float
    h_token_no_comments: float
    h_comments_only: float
    h_token_no_kw_num: float
    h_ast_node: float
    h_ast_edge: float
    delta_h_token: float
    delta_h_ast_edge: float
    delta_h_ast_node: float


@dataclass(frozen=True)
class SeriesPoint:
    position: int
    commit_id: str
    total_h_token: float
    total_h_ast_edge: float
    total_h_ast_node: float
    file_count: int
    spread: float


SERIES_METRICS = ("total_h_token", "total_h_ast_edge", "total_h_ast_node", "file_count", "spread")


@dataclass(frozen=True)
class EntropySeries:
    """Per-commit project totals ordered by position on the linearized history."""

    points: tuple[SeriesPoint, ...] = ()

    def __post_init__(self):
        pos = [p.position for p in self.points]
        if any(b <= a for a, b in zip(pos, pos[1:])):
            raise ValueError("series positions must be strictly increasing")

    def __len__(self) -> int:
        return len(self.points)

    @classmethod
    def from_values(cls, values: Iterable[float], metric: str = "total_h_token") -> "EntropySeries":
        """Build a series carrying ``values`` in ``metric`` (other metrics zero)."""
        pts = []
        for i, v in enumerate(values):
            row = dict.fromkeys(SERIES_METRICS, 0.0)
            row["file_count"] = 0
            row[metric] = v
            pts.append(SeriesPoint(position=i, commit_id=f"{i:040x}", **row))
        return cls(tuple(pts))

    @property
    def positions(self) -> np.ndarray:
        return np.array([p.position for p in self.points], dtype=float)

    def values(self, metric: str = "total_h_token") -> np.ndarray:
        if metric not in SERIES_METRICS:
            raise ValueError(f"unknown series metric {metric!r}")
        return np.array([getattr(p, metric) for p in self.points], dtype=float)

    def deltas(self, metric: str = "total_h_token") -> np.ndarray:
        """Per-commit change; the first commit is measured against an empty project."""
        return np.diff(self.values(metric), prepend=0.0)


# ---------------------------------------------------------------------------
# formatting

def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, enum.Enum):
        return value.value
    if isinstance(value, float):
        return repr(value)
    return str(value)


COMMIT_COLUMNS = [f.name for f in fields(CommitRecord) if f.name != "totals"] + [
    "total_h_token",
    "total_h_ast_edge",
    "total_h_ast_node",
    "file_count",
    "spread",
]
FILE_COLUMNS = [f.name for f in fields(FileChangeRecord)]


def _commit_row(rec: CommitRecord) -> list:
    t = rec.totals
    head = [getattr(rec, name) for name in COMMIT_COLUMNS[:9]]
    return head + [t.total_h_token, t.total_h_ast_edge, t.total_h_ast_node, t.file_count, t.spread]


def write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\r\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_cell(v) for v in row])
    path.write_text(buf.getvalue(), encoding="utf-8", newline="")


def write_commits(path: Path, records: Iterable[CommitRecord]) -> None:
    write_csv(path, COMMIT_COLUMNS, (_commit_row(r) for r in records))


def write_file_changes(path: Path, records: Iterable[FileChangeRecord]) -> None:
    write_csv(path, FILE_COLUMNS, ([getattr(r, c) for c in FILE_COLUMNS] for r in records))


def series_from_commits(records: Iterable[CommitRecord]) -> EntropySeries:
    return EntropySeries(
        tuple(
            SeriesPoint(
                position=r.position,
                commit_id=r.commit_id,
                total_h_token=r.totals.total_h_token,
                total_h_ast_edge=r.totals.total_h_ast_edge,
                total_h_ast_node=r.totals.total_h_ast_node,
                file_count=r.totals.file_count,
                spread=r.totals.spread,
            )
            for r in records
        )
    )


def dump_json(obj) -> str:
    return json.dumps(obj, indent=2, ensure_ascii=False, allow_nan=False) + "\n"


def write_series(path: Path, series: EntropySeries) -> None:
    rows = [
        {"commit_id": p.commit_id, "position": p.position, **{m: getattr(p, m) for m in SERIES_METRICS}}
        for p in series.points
    ]
    path.write_text(dump_json(rows), encoding="utf-8")


def read_series(path: Path) -> EntropySeries:
    rows = json.loads(Path(path).read_text(encoding="utf-8"))
    return EntropySeries(
        tuple(
            SeriesPoint(
                position=int(r["position"]),
                commit_id=r["commit_id"],
                total_h_token=float(r["total_h_token"]),
                total_h_ast_edge=float(r["total_h_ast_edge"]),
                total_h_ast_node=float(r["total_h_ast_node"]),
                file_count=int(r["file_count"]),
                spread=float(r["spread"]),
            )
            for r in rows
        )
    )


def _parse(field_type, text: str):
    if field_type in ("int", int):
        return int(text)
    if field_type in ("float", float):
        return float(text)
    if field_type in ("bool", bool):
        return text == "true"
    if field_type is ChangeType or field_type == "ChangeType":
        return ChangeType(text)
    if field_type == "str | None":
        return text or None
    return text


def read_file_changes(path: Path) -> list[FileChangeRecord]:
    types = {f.name: f.type for f in fields(FileChangeRecord)}
    with open(path, newline="", encoding="utf-8") as fh:
        return [
            FileChangeRecord(**{k: _parse(types[k], v) for k, v in row.items()})
            for row in csv.DictReader(fh)
        ]


def read_commits(path: Path) -> list[CommitRecord]:
    types = {f.name: f.type for f in fields(CommitRecord)}
    out = []
    with open(path, newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            totals = ProjectTotals(
                total_h_token=float(row["total_h_token"]),
                total_h_ast_edge=float(row["total_h_ast_edge"]),
                total_h_ast_node=float(row["total_h_ast_node"]),
                file_count=int(row["file_count"]),
            )
            head = {k: _parse(types[k], row[k]) for k in COMMIT_COLUMNS[:9]}
            out.append(CommitRecord(**head, totals=totals))
    return out


def as_dict(record) -> dict:
    return dataclasses.asdict(record)
