"""Read-only access to a Git repository through the ``git`` executable."""

from __future__ import annotations

import logging
import os
import subprocess
from dataclasses import dataclass
from pathlib import Path

log = logging.getLogger(__name__)

EMPTY_SHA = "0" * 40


class GitError(RuntimeError):
    pass


class RepositoryNotFoundError(GitError):
    pass


class BranchNotFoundError(GitError):
    pass


@dataclass(frozen=True)
class CommitInfo:
    sha: str
    parents: tuple[str, ...]
    timestamp: int
    author_email: str
    message: str


@dataclass(frozen=True)
class Change:
    """One entry of a tree diff. ``status`` is git's letter: A, M, D, R, T, C."""

    status: str
    old_path: str | None
    new_path: str | None
    old_blob: str | None
    new_blob: str | None
    insertions: int = 0
    deletions: int = 0


def _env() -> dict[str, str]:
    env = dict(os.environ)
    # user config must not alter diff output (renames, external diff drivers)
    env.update(GIT_CONFIG_NOSYSTEM="1", GIT_CONFIG_GLOBAL=os.devnull, LC_ALL="C")
    return env


class Repository:
    """A local repository. Use as a context manager to close the blob reader."""

    def __init__(self, path: str | os.PathLike):
        self.path = Path(path)
        if not self.path.exists():
            raise RepositoryNotFoundError(f"repository not found: {self.path}")
        try:
            out = self._git("rev-parse", "--git-dir")
        except GitError:
            raise RepositoryNotFoundError(f"repository not found: {self.path}") from None
        if not out.strip():
            raise RepositoryNotFoundError(f"repository not found: {self.path}")
        self._batch: subprocess.Popen | None = None

    def __enter__(self) -> "Repository":
        return self

    def __exit__(self, *exc) -> None:
        self.close()

    def close(self) -> None:
        if self._batch is not None:
            self._batch.stdin.close()
            self._batch.wait()
            self._batch = None

    def _git_bytes(self, *args: str) -> bytes:
        proc = subprocess.run(
            ["git", "-C", str(self.path), *args],
            capture_output=True,
            env=_env(),
        )
        if proc.returncode != 0:
            raise GitError(f"git {' '.join(args)}: {proc.stderr.decode(errors='replace').strip()}")
        return proc.stdout

    def _git(self, *args: str) -> str:
        return self._git_bytes(*args).decode("utf-8", "surrogateescape")

    def default_branch(self) -> str:
        return self._git("symbolic-ref", "--short", "HEAD").strip()

    def has_commits(self, branch: str | None = None) -> bool:
        try:
            self._git("rev-parse", "--verify", "--quiet", f"{branch or 'HEAD'}^{{commit}}")
        except GitError:
            return False
        return True

    def first_parent_chain(self, branch: str | None = None) -> list[str]:
        """Commit ids on the first-parent chain of ``branch``, oldest first."""
        if branch is None:
            branch = self.default_branch()
            if not self.has_commits(branch):
                return []
        elif not self.has_commits(branch):
            raise BranchNotFoundError(f"branch not found: {branch}")
        return self._git("rev-list", "--first-parent", "--reverse", branch, "--").split()

    def commit_info(self, sha: str) -> CommitInfo:
        raw = self._git("show", "-s", "--format=%H%x00%P%x00%ct%x00%ae%x00%B", sha)
        commit, parents, ts, email, message = raw.split("\x00", 4)
        return CommitInfo(
            sha=commit,
            parents=tuple(parents.split()),
            timestamp=int(ts),
            author_email=email,
            message=message.rstrip("\n"),
        )

    def diff(self, parent: str | None, sha: str) -> list[Change]:
        """Tree diff of ``sha`` against ``parent`` (or the empty tree), with rename detection."""
        base = [parent, sha] if parent else ["--root", sha]
        raw = self._git("diff-tree", "-r", "-M", "--no-commit-id", "--raw", "-z", *base)
        numstat = self._git("diff-tree", "-r", "-M", "--no-commit-id", "--numstat", "-z", *base)
        lines = _parse_numstat(numstat)
        changes = []
        for status, old_path, new_path, old_blob, new_blob in _parse_raw(raw):
            ins, dels = lines.get((old_path, new_path), (0, 0))
            changes.append(Change(status, old_path, new_path, old_blob, new_blob, ins, dels))
        return changes

    def blob(self, sha: str) -> bytes:
        if self._batch is None:
            self._batch = subprocess.Popen(
                ["git", "-C", str(self.path), "cat-file", "--batch"],
                stdin=subprocess.PIPE,
                stdout=subprocess.PIPE,
                env=_env(),
            )
        self._batch.stdin.write(sha.encode() + b"\n")
        self._batch.stdin.flush()
        header = self._batch.stdout.readline().split()
        if len(header) != 3 or header[1] != b"blob":
            raise GitError(f"cannot read blob {sha}: {b' '.join(header).decode(errors='replace')}")
        size = int(header[2])
        data = self._batch.stdout.read(size + 1)
        return data[:size]

    def tree_files(self, sha: str) -> dict[str, str]:
        """``path -> blob id`` for every regular file in the tree of ``sha``."""
        out = {}
        for entry in self._git("ls-tree", "-r", "-z", sha).split("\x00"):
            if not entry:
                continue
            meta, path = entry.split("\t", 1)
            mode, kind, blob = meta.split()
            if kind == "blob":
                out[path] = blob
        return out


def _parse_raw(raw: str):
    fields = raw.split("\x00")
    i = 0
    while i < len(fields) and fields[i]:
        meta = fields[i][1:].split()
        _, _, old_blob, new_blob, status = meta
        letter = status[0]
        if letter in "RC":
            old_path, new_path = fields[i + 1], fields[i + 2]
            i += 3
        else:
            path = fields[i + 1]
            old_path = None if letter == "A" else path
            new_path = None if letter == "D" else path
            i += 2
        yield (
            letter,
            old_path,
            new_path,
            None if old_blob == EMPTY_SHA else old_blob,
            None if new_blob == EMPTY_SHA else new_blob,
        )


def _parse_numstat(raw: str) -> dict[tuple[str | None, str | None], tuple[int, int]]:
    """Map ``(old_path, new_path)`` to line counts; binary files count as 0."""
    out = {}
    fields = raw.split("\x00")
    i = 0
    while i < len(fields) and fields[i]:
        ins, dels, path = fields[i].split("\t", 2)
        counts = (int(ins) if ins != "-" else 0, int(dels) if dels != "-" else 0)
        if path:
            out[(path, path)] = counts
            out[(None, path)] = counts
            out[(path, None)] = counts
            i += 1
        else:
            out[(fields[i + 1], fields[i + 2])] = counts
            i += 3
    return out
