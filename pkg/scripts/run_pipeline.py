"""Run every stage (analyze, detect, trends, correlate) on one repository.

    python3 scripts/run_pipeline.py --repo path/to/repo --out results/
    python3 scripts/run_pipeline.py --out results/        # scripted fixture repo

Extra flags after ``--`` are passed to every stage, e.g. ``-- --no-comments``.
"""

from __future__ import annotations

import argparse
import sys
import tempfile
from pathlib import Path

from codentropy.cli import main as cli

ROOT = Path(__file__).resolve().parents[1]


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repo", type=Path, help="git repository (default: build the test fixture)")
    ap.add_argument("--out", type=Path, default=Path("pipeline-out"))
    ap.add_argument("extra", nargs="*", help="flags forwarded to each stage")
    args = ap.parse_args()

    with tempfile.TemporaryDirectory() as tmp:
        repo = args.repo
        if repo is None:
            sys.path.insert(0, str(ROOT / "tests"))
            from fixture_repo import build_fixture_repo

            repo = build_fixture_repo(Path(tmp) / "fixture")
            print(f"built fixture repository at {repo}")
        common = ["--out", str(args.out), *args.extra]
        for stage in (["analyze", "--repo", str(repo)], ["detect"], ["trends"], ["correlate"]):
            rc = cli([*stage, *common])
            if rc:
                return rc
    print(f"outputs in {args.out.resolve()}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
