"""Commit-by-commit traversal producing the commit and file-change datasets.

Project totals are sums of per-file entropies over the live source files,
maintained incrementally: each commit adds its file deltas to the running
totals in path order, and the running totals are periodically checked
against a full recomputation from the per-file state.
"""

from __future__ import annotations

import hashlib
import logging
import math
import os
from dataclasses import dataclass, field
from pathlib import Path

from .entropy import SymbolHistogram, shannon_entropy
from .git import Change, Repository
from .grammars import Grammar, get_grammar
from .lexical import (
    ALL_TOKENS,
    COMMENTS_ONLY,
    NO_COMMENTS,
    NO_KEYWORDS_NUMBERS,
    SourceDecodeError,
    TokenizationConfig,
    decode_source,
    tokenize,
)
from .records import (
    COMMITS_CSV,
    FILE_CHANGES_CSV,
    SERIES_JSON,
    ChangeType,
    CommitRecord,
    EntropySeries,
    FileChangeRecord,
    ProjectTotals,
    series_from_commits,
    write_commits,
    write_file_changes,
    write_series,
)
from .syntax import ParseError, StructuralProfile, changed_methods, parse_profile

log = logging.getLogger(__name__)

TOKEN_VARIANTS = {
    "h_token": ALL_TOKENS,
    "h_token_no_comments": NO_COMMENTS,
    "h_comments_only": COMMENTS_ONLY,
    "h_token_no_kw_num": NO_KEYWORDS_NUMBERS,
}

TOTALS_TOLERANCE = 1e-6


class StateDriftError(AssertionError):
    pass


@dataclass(frozen=True)
class FileEntropyState:
    """Histograms and derived metrics of one file version."""

    token_hists: dict[str, SymbolHistogram]
    node_hist: SymbolHistogram
    edge_hist: SymbolHistogram
    entropies: dict[str, float]
    nloc: int = 0
    token_count: int = 0
    cyclomatic: int = 0
    parse_failed: bool = False

    @property
    def h_token(self) -> float:
        return self.entropies["h_token"]

    @property
    def h_ast_edge(self) -> float:
        return self.entropies["h_ast_edge"]

    @property
    def h_ast_node(self) -> float:
        return self.entropies["h_ast_node"]


def _empty_state() -> FileEntropyState:
    empty = SymbolHistogram()
    names = [*TOKEN_VARIANTS, "h_ast_node", "h_ast_edge"]
    return FileEntropyState({k: empty for k in TOKEN_VARIANTS}, empty, empty, dict.fromkeys(names, 0.0))


EMPTY_FILE = _empty_state()


def count_nloc(text: str) -> int:
    return sum(1 for line in text.splitlines() if line.strip())


def measure_file(
    source: str | bytes,
    grammar: str | Grammar = "java",
    token_config: TokenizationConfig = ALL_TOKENS,
) -> FileEntropyState:
    """Compute every per-file metric from scratch.

    ``token_config`` selects the word stream behind ``h_token`` (and so behind
    the project totals); the other three textual variants are fixed.
    """
    text = decode_source(source)
    variants = {**TOKEN_VARIANTS, "h_token": token_config}
    hists = {name: SymbolHistogram.from_symbols(tokenize(text, grammar, cfg)) for name, cfg in variants.items()}
    all_words = hists["h_token"] if token_config == ALL_TOKENS else SymbolHistogram.from_symbols(tokenize(text, grammar))
    parse_failed = False
    try:
        profile = parse_profile(text, grammar)
    except ParseError as exc:
        log.warning("unparseable source (%s); structural metrics set to 0", exc)
        profile = StructuralProfile.empty()
        parse_failed = True
    entropies = {name: shannon_entropy(h) for name, h in hists.items()}
    entropies["h_ast_node"] = shannon_entropy(profile.node_hist)
    entropies["h_ast_edge"] = shannon_entropy(profile.edge_hist)
    return FileEntropyState(
        token_hists=hists,
        node_hist=profile.node_hist,
        edge_hist=profile.edge_hist,
        entropies=entropies,
        nloc=count_nloc(text),
        token_count=all_words.total,
        cyclomatic=profile.file_cyclomatic,
        parse_failed=parse_failed,
    )


@dataclass
class ProjectState:
    """Live source files and running totals. Updated in place commit by commit."""

    files: dict[str, FileEntropyState] = field(default_factory=dict)
    total_h_token: float = 0.0
    total_h_ast_edge: float = 0.0
    total_h_ast_node: float = 0.0

    @property
    def totals(self) -> ProjectTotals:
        return ProjectTotals(self.total_h_token, self.total_h_ast_edge, self.total_h_ast_node, len(self.files))

    def recompute(self) -> ProjectTotals:
        files = self.files.values()
        return ProjectTotals(
            math.fsum(f.h_token for f in files),
            math.fsum(f.h_ast_edge for f in files),
            math.fsum(f.h_ast_node for f in files),
            len(self.files),
        )

    def check(self, tolerance: float = TOTALS_TOLERANCE) -> None:
        full = self.recompute()
        running = self.totals
        for name in ("total_h_token", "total_h_ast_edge", "total_h_ast_node"):
            if abs(getattr(full, name) - getattr(running, name)) > tolerance:
                raise StateDriftError(f"{name}: running {getattr(running, name)} != recomputed {getattr(full, name)}")


@dataclass
class MiningResult:
    commits: list[CommitRecord] = field(default_factory=list)
    files: list[FileChangeRecord] = field(default_factory=list)
    skipped: list[tuple[str, str, str]] = field(default_factory=list)
    parse_failures: int = 0

    @property
    def series(self) -> EntropySeries:
        return series_from_commits(self.commits)


def anonymize(email: str) -> str:
    return hashlib.sha256(email.strip().lower().encode("utf-8")).hexdigest()[:16]


def linearize_history(repo: Repository, branch: str | None = None) -> list[str]:
    return repo.first_parent_chain(branch)


@dataclass(frozen=True)
class _Planned:
    change_type: ChangeType
    path: str
    old_path: str | None
    old_blob: str | None
    new_blob: str | None
    insertions: int
    deletions: int


def _plan(changes: list[Change], g: Grammar) -> list[_Planned]:
    out = []
    for c in changes:
        old_src = c.old_path is not None and g.handles(c.old_path)
        new_src = c.new_path is not None and g.handles(c.new_path)
        if c.status == "R" and old_src and new_src:
            out.append(_Planned(ChangeType.RENAME, c.new_path, c.old_path, c.old_blob, c.new_blob, c.insertions, c.deletions))
            continue
        if old_src and (c.status in "DR" or not new_src):
            out.append(_Planned(ChangeType.DELETE, c.old_path, None, c.old_blob, None, c.insertions, c.deletions))
        if new_src and c.status in "ACR":
            out.append(_Planned(ChangeType.ADD, c.new_path, None, None, c.new_blob, c.insertions, c.deletions))
        elif new_src and old_src and c.status in "MT":
            out.append(_Planned(ChangeType.MODIFY, c.new_path, None, c.old_blob, c.new_blob, c.insertions, c.deletions))
    # deletions sort before anything re-occupying the same path
    out.sort(key=lambda p: (p.path, p.change_type is not ChangeType.DELETE))
    return out


def _text(repo: Repository, blob: str | None) -> str:
    return "" if blob is None else decode_source(repo.blob(blob))


def analyze_commit(
    repo: Repository,
    state: ProjectState,
    sha: str,
    position: int,
    grammar: str | Grammar = "java",
    result: MiningResult | None = None,
    token_config: TokenizationConfig = ALL_TOKENS,
) -> tuple[CommitRecord, list[FileChangeRecord]]:
    """Measure one commit against its first parent and fold it into ``state``."""
    g = get_grammar(grammar)
    info = repo.commit_info(sha)
    parent = info.parents[0] if info.parents else None
    planned = _plan(repo.diff(parent, sha), g)

    before = dict(state.files)
    measured: list[tuple[_Planned, FileEntropyState, int]] = []
    for p in planned:
        try:
            new_text = _text(repo, p.new_blob)
        except SourceDecodeError as exc:
            log.warning("%s %s: skipped (%s)", sha[:12], p.path, exc)
            if result is not None:
                result.skipped.append((sha, p.path, str(exc)))
            continue
        try:
            old_text = _text(repo, p.old_blob)
        except SourceDecodeError:
            old_text = ""
        current = EMPTY_FILE if p.change_type is ChangeType.DELETE else measure_file(new_text, g, token_config)
        if current.parse_failed and result is not None:
            result.parse_failures += 1
        try:
            n_changed = changed_methods(old_text, new_text, g)
        except ParseError:
            n_changed = 0
        measured.append((p, current, n_changed))

    records = []
    for p, current, n_changed in measured:
        prev_path = p.old_path if p.change_type is ChangeType.RENAME else p.path
        previous = EMPTY_FILE if p.change_type is ChangeType.ADD else before.get(prev_path, EMPTY_FILE)
        e = current.entropies
        records.append(
            FileChangeRecord(
                commit_id=sha,
                file_path=p.path,
                old_path=p.old_path,
                change_type=p.change_type,
                insertions=p.insertions,
                deletions=p.deletions,
                nloc=current.nloc,
                token_count=current.token_count,
                cyclomatic=current.cyclomatic,
                methods_changed=n_changed,
                h_token=e["h_token"],
                h_token_no_comments=e["h_token_no_comments"],
                h_comments_only=e["h_comments_only"],
                h_token_no_kw_num=e["h_token_no_kw_num"],
                h_ast_node=e["h_ast_node"],
                h_ast_edge=e["h_ast_edge"],
                delta_h_token=e["h_token"] - previous.h_token,
                delta_h_ast_edge=e["h_ast_edge"] - previous.h_ast_edge,
                delta_h_ast_node=e["h_ast_node"] - previous.h_ast_node,
            )
        )

    # removals first so that path reuse within one commit resolves correctly
    for p, _, _ in measured:
        if p.change_type is ChangeType.DELETE:
            state.files.pop(p.path, None)
        elif p.change_type is ChangeType.RENAME:
            state.files.pop(p.old_path, None)
    for p, current, _ in measured:
        if p.change_type is not ChangeType.DELETE:
            state.files[p.path] = current
    for r in records:
        state.total_h_token += r.delta_h_token
        state.total_h_ast_edge += r.delta_h_ast_edge
        state.total_h_ast_node += r.delta_h_ast_node

    commit = CommitRecord(
        commit_id=sha,
        position=position,
        timestamp=info.timestamp,
        author_id=anonymize(info.author_email),
        message_length=len(info.message),
        is_merge=len(info.parents) > 1,
        files_changed=len(records),
        insertions=sum(r.insertions for r in records),
        deletions=sum(r.deletions for r in records),
        totals=state.totals,
    )
    return commit, records


def mine(
    repo: Repository | str | os.PathLike,
    branch: str | None = None,
    grammar: str | Grammar = "java",
    check_every: int = 50,
    token_config: TokenizationConfig = ALL_TOKENS,
) -> MiningResult:
    """Traverse the first-parent history of ``branch`` and collect both datasets."""
    if not isinstance(repo, Repository):
        with Repository(repo) as r:
            return mine(r, branch, grammar, check_every, token_config)
    g = get_grammar(grammar)
    state = ProjectState()
    result = MiningResult()
    chain = linearize_history(repo, branch)
    for position, sha in enumerate(chain):
        commit, files = analyze_commit(repo, state, sha, position, g, result, token_config)
        result.commits.append(commit)
        result.files.extend(files)
        if check_every and (position + 1) % check_every == 0:
            state.check()
        log.debug("%d/%d %s: %d files", position + 1, len(chain), sha[:12], len(files))
    if chain:
        state.check()
    return result


def tree_totals(
    repo: Repository,
    sha: str,
    grammar: str | Grammar = "java",
    token_config: TokenizationConfig = ALL_TOKENS,
) -> ProjectTotals:
    """Totals recomputed from scratch over every source file in the tree of ``sha``."""
    g = get_grammar(grammar)
    states = []
    for path, blob in sorted(repo.tree_files(sha).items()):
        if not g.handles(path):
            continue
        try:
            states.append(measure_file(repo.blob(blob), g, token_config))
        except SourceDecodeError:
            continue
    return ProjectTotals(
        math.fsum(s.h_token for s in states),
        math.fsum(s.h_ast_edge for s in states),
        math.fsum(s.h_ast_node for s in states),
        len(states),
    )


def write_outputs(result: MiningResult, out_dir: str | os.PathLike) -> None:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_commits(out / COMMITS_CSV, result.commits)
    write_file_changes(out / FILE_CHANGES_CSV, result.files)
    write_series(out / SERIES_JSON, result.series)
