"""Command-line entry point: ``codentropy {analyze,detect,trends,correlate}``.

Every subcommand reads and writes inside ``--out``; later stages reuse the
mined datasets. Flags may also come from ``--config FILE`` (``key = value``
lines); flags on the command line win.
"""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import filelock

from . import anomaly, analytics, miner, records, stats
from .git import GitError, RepositoryNotFoundError
from .grammars import UnknownGrammarError, get_grammar
from .lexical import TokenizationConfig

log = logging.getLogger("codentropy")

LOCK_NAME = ".codentropy.lock"
EVENTS_JSON = "events.json"
PRECISION_JSON = "precision.json"
TREND_JSON = "trend_report.json"
SPIKES_CSV = "spikes_drops.csv"
CORR_FILE_CSV = "correlations_file.csv"
CORR_COMMIT_CSV = "correlations_commit.csv"


class StageError(RuntimeError):
    def __init__(self, stage: str, message: str):
        super().__init__(f"{stage}: {message}")
        self.stage = stage


@dataclass
class RunConfig:
    output_dir: Path
    repo_path: Path | None = None
    branch: str | None = None
    grammar: str = "java"
    tokenization: TokenizationConfig = TokenizationConfig()
    detector: anomaly.DetectorConfig = anomaly.DetectorConfig()
    detect_metric: str = "total_h_token"
    thresholds: tuple[float, ...] = analytics.DEFAULT_THRESHOLDS
    segments: int = 4
    labels: Path | None = None
    use_levels: bool = False


def _floats(text: str) -> tuple[float, ...]:
    try:
        values = tuple(float(t) for t in text.split(",") if t.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of numbers: {text!r}") from None
    if not values:
        raise argparse.ArgumentTypeError("empty threshold list")
    return values


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", type=Path, help="key = value file mirroring these flags")
    p.add_argument("--out", type=Path, default=Path("codentropy-out"), help="output directory")
    p.add_argument("--repo", type=Path, help="path to a local git repository")
    p.add_argument("--branch", help="branch to traverse (default: the checked-out branch)")
    p.add_argument("--grammar", default="java")
    p.add_argument("-v", "--verbose", action="store_true")

    tok = p.add_argument_group("tokenization (selects the word stream behind h_token)")
    tok.add_argument("--include-comments", dest="include_comments", action="store_true", default=True)
    tok.add_argument("--no-comments", dest="include_comments", action="store_false")
    tok.add_argument("--comments-only", action="store_true", default=False)
    tok.add_argument("--include-keywords", dest="include_keywords", action="store_true", default=True)
    tok.add_argument("--no-keywords", dest="include_keywords", action="store_false")
    tok.add_argument("--include-numbers", dest="include_numbers", action="store_true", default=True)
    tok.add_argument("--no-numbers", dest="include_numbers", action="store_false")

    det = p.add_argument_group("detector")
    det.add_argument("--memory-frac", type=float, default=None, help="window as a fraction of all commits (default 1.0)")
    det.add_argument("--window-size", type=int, default=None, help="fixed window length (streaming mode)")
    det.add_argument("--z-threshold", type=float, default=3.0)
    det.add_argument("--min-samples", type=int, default=30)
    det.add_argument("--metric", default="total_h_token", choices=["total_h_token", "total_h_ast_edge", "total_h_ast_node"])
    det.add_argument("--labels", type=Path, help="labels.csv with commit_id,category,relevant")

    tr = p.add_argument_group("trends and correlations")
    tr.add_argument("--thresholds", type=_floats, default=analytics.DEFAULT_THRESHOLDS)
    tr.add_argument("--segments", type=int, default=4)
    tr.add_argument("--levels", action="store_true", help="correlate entropy levels instead of deltas")


def build_parser(defaults: dict | None = None) -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="codentropy", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in [
        ("analyze", "mine a repository into commits.csv, file_changes.csv, series.json"),
        ("detect", "flag surprising commits into events.json"),
        ("trends", "write trend_report.json and spikes_drops.csv"),
        ("correlate", "write Spearman correlation tables"),
    ]:
        p = sub.add_parser(name, help=help_text)
        _add_common(p)
        if defaults:
            p.set_defaults(**defaults)
    return parser


def read_config_file(path: Path) -> dict[str, str]:
    out = {}
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ValueError(f"{path}:{lineno}: expected 'key = value'")
        out[key.strip().lstrip("-").replace("-", "_")] = value.strip()
    return out


# config-file keys -> (argparse dest, converter)
_CONFIG_KEYS = {
    "out": ("out", Path),
    "output_dir": ("out", Path),
    "repo": ("repo", Path),
    "repo_path": ("repo", Path),
    "branch": ("branch", str),
    "grammar": ("grammar", str),
    "include_comments": ("include_comments", "bool"),
    "comments_only": ("comments_only", "bool"),
    "include_keywords": ("include_keywords", "bool"),
    "include_numbers": ("include_numbers", "bool"),
    "memory_frac": ("memory_frac", float),
    "window_size": ("window_size", int),
    "z_threshold": ("z_threshold", float),
    "min_samples": ("min_samples", int),
    "metric": ("metric", str),
    "labels": ("labels", Path),
    "thresholds": ("thresholds", _floats),
    "segments": ("segments", int),
    "levels": ("levels", "bool"),
}


def _to_bool(text: str) -> bool:
    low = text.lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def parse_args(argv: Sequence[str] | None) -> argparse.Namespace:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.config is None:
        return args
    try:
        values = read_config_file(args.config)
    except OSError as exc:
        parser.error(f"cannot read config file: {exc}")
    except ValueError as exc:
        parser.error(str(exc))
    defaults = {}
    for key, text in values.items():
        if key not in _CONFIG_KEYS:
            parser.error(f"{args.config}: unknown key {key!r}")
        dest, conv = _CONFIG_KEYS[key]
        try:
            defaults[dest] = _to_bool(text) if conv == "bool" else conv(text)
        except (ValueError, argparse.ArgumentTypeError) as exc:
            parser.error(f"{args.config}: {key}: {exc}")
    # re-parse so that command-line flags override the file
    return build_parser(defaults).parse_args(argv)


def run_config(args: argparse.Namespace) -> RunConfig:
    """Validate flags before any work starts."""
    if args.memory_frac is not None and args.window_size is not None:
        raise StageError("config", "--memory-frac and --window-size are mutually exclusive")
    try:
        get_grammar(args.grammar)
        tokenization = TokenizationConfig(
            include_comments=args.include_comments or args.comments_only,
            include_keywords=args.include_keywords,
            include_numbers=args.include_numbers,
            comments_only=args.comments_only,
        )
        detector = anomaly.DetectorConfig(
            memory_fraction=None if args.window_size is not None else (1.0 if args.memory_frac is None else args.memory_frac),
            window_size=args.window_size,
            z_threshold=args.z_threshold,
            min_samples=args.min_samples,
        )
    except (ValueError, UnknownGrammarError) as exc:
        raise StageError("config", str(exc)) from None
    if args.segments < 1:
        raise StageError("config", "--segments must be >= 1")
    if any(t <= 0 for t in args.thresholds):
        raise StageError("config", "--thresholds must be positive")
    return RunConfig(
        output_dir=args.out,
        repo_path=args.repo,
        branch=args.branch,
        grammar=args.grammar,
        tokenization=tokenization,
        detector=detector,
        detect_metric=args.metric,
        thresholds=tuple(args.thresholds),
        segments=args.segments,
        labels=args.labels,
        use_levels=args.levels,
    )


def _mine(cfg: RunConfig) -> miner.MiningResult:
    if cfg.repo_path is None:
        raise StageError("analyze", "--repo is required")
    try:
        result = miner.mine(cfg.repo_path, cfg.branch, cfg.grammar, token_config=cfg.tokenization)
    except RepositoryNotFoundError:
        raise StageError("analyze", f"repository not found: {cfg.repo_path}") from None
    except GitError as exc:
        raise StageError("analyze", str(exc)) from None
    miner.write_outputs(result, cfg.output_dir)
    return result


def cmd_analyze(cfg: RunConfig) -> int:
    result = _mine(cfg)
    last = result.commits[-1].totals if result.commits else records.ProjectTotals()
    print(
        f"analyzed {len(result.commits)} commits, {len(result.files)} file changes"
        f" ({len(result.skipped)} skipped, {result.parse_failures} unparseable);"
        f" final total_h_token={last.total_h_token:.6f} total_h_ast_edge={last.total_h_ast_edge:.6f}"
        f" total_h_ast_node={last.total_h_ast_node:.6f} files={last.file_count}"
    )
    return 0


def _load_series(cfg: RunConfig, stage: str) -> records.EntropySeries:
    path = cfg.output_dir / records.SERIES_JSON
    if not path.exists():
        raise StageError(stage, f"{path} not found; run `codentropy analyze` first (or pass --repo)")
    return records.read_series(path)


def _files_changed(cfg: RunConfig, series: records.EntropySeries) -> list[int] | None:
    path = cfg.output_dir / records.COMMITS_CSV
    if not path.exists():
        return None
    by_id = {c.commit_id: c.files_changed for c in records.read_commits(path)}
    return [by_id.get(p.commit_id, 0) for p in series.points]


def cmd_detect(cfg: RunConfig) -> int:
    if cfg.repo_path is not None:
        _mine(cfg)
    series = _load_series(cfg, "detect")
    events = anomaly.detect_series(series, cfg.detector, cfg.detect_metric, _files_changed(cfg, series))
    (cfg.output_dir / EVENTS_JSON).write_text(records.dump_json([e.to_json() for e in events]), encoding="utf-8")
    print(
        f"{len(events)} events over {len(series)} commits ({cfg.detector.label}, |z| >= {cfg.detector.z_threshold:g});"
        f" 95% audit sample: {anomaly.sample_size(len(events))}"
    )
    if cfg.labels is not None:
        try:
            labels = anomaly.read_labels(cfg.labels)
        except (OSError, ValueError) as exc:
            raise StageError("detect", f"labels: {exc}") from None
        labelled = [e for e in events if e.commit_id in labels]
        precision = {
            level.value: (anomaly.score_events(labelled, labels, level) if labelled else None)
            for level in anomaly.StrictnessLevel
        }
        report = {"labelled_events": len(labelled), "unlabelled_events": len(events) - len(labelled), "precision": precision}
        (cfg.output_dir / PRECISION_JSON).write_text(records.dump_json(report), encoding="utf-8")
        for level, value in precision.items():
            print(f"  {level}: {'n/a' if value is None else f'{100 * value:.2f}%'} ({len(labelled)} labelled)")
    return 0


def cmd_trends(cfg: RunConfig) -> int:
    series = _load_series(cfg, "trends")
    if len(series) == 0:
        raise StageError("trends", "series is empty")
    report = analytics.lehman_indicators(series, cfg.detect_metric, cfg.thresholds, cfg.segments)
    (cfg.output_dir / TREND_JSON).write_text(records.dump_json(report.to_json()), encoding="utf-8")
    records.write_csv(
        cfg.output_dir / SPIKES_CSV,
        ["threshold", "spikes", "drops"],
        ([t, s, d] for t, (s, d) in sorted(report.spike_drop_table.items())),
    )
    pattern = report.spread_pattern.value if report.spread_pattern else "n/a"
    print(f"slope={report.overall_slope} pattern={pattern} smoothness={report.smoothness:.4f}")
    return 0


def cmd_correlate(cfg: RunConfig) -> int:
    path = cfg.output_dir / records.FILE_CHANGES_CSV
    if not path.exists():
        raise StageError("correlate", f"{path} not found; run `codentropy analyze` first")
    files = records.read_file_changes(path)
    if not files:
        raise StageError("correlate", "file dataset is empty")
    for level, name in (("file", CORR_FILE_CSV), ("commit", CORR_COMMIT_CSV)):
        cells = stats.correlation_table(files, level, use_levels=cfg.use_levels)
        stats.write_correlations(cfg.output_dir / name, cells)
    print(f"wrote {CORR_FILE_CSV} and {CORR_COMMIT_CSV} from {len(files)} file changes")
    return 0


COMMANDS = {"analyze": cmd_analyze, "detect": cmd_detect, "trends": cmd_trends, "correlate": cmd_correlate}


def main(argv: Sequence[str] | None = None) -> int:
    args = parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = run_config(args)
        cfg.output_dir.mkdir(parents=True, exist_ok=True)
        lock = filelock.FileLock(str(cfg.output_dir / LOCK_NAME), timeout=0)
        try:
            with lock:
                return COMMANDS[args.command](cfg)
        except filelock.Timeout:
            raise StageError(args.command, f"{cfg.output_dir} is in use by another run") from None
    except StageError as exc:
        print(f"codentropy {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"codentropy {args.command}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
