"""Regenerate tests/golden/ from the scripted fixture repository.

The three mining outputs come from the GitPython oracle. The trend and
correlation files are computed by the package from those oracle outputs;
they are regression snapshots. Run after an intentional format change.

    python3 scripts/make_golden.py
"""

from __future__ import annotations

import shutil
import sys
import tempfile
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(ROOT / "tests"))

import oracle  # noqa: E402
from codentropy.cli import main as cli  # noqa: E402
from fixture_repo import build_fixture_repo  # noqa: E402

DERIVED = ("trend_report.json", "spikes_drops.csv", "correlations_file.csv", "correlations_commit.csv")


def main() -> None:
    out = ROOT / "tests" / "golden"
    out.mkdir(exist_ok=True)
    with tempfile.TemporaryDirectory() as tmp:
        repo = build_fixture_repo(Path(tmp) / "fixture")
        for name, text in oracle.run(repo).items():
            (out / name).write_text(text, encoding="utf-8", newline="")
            print(f"wrote {out / name} ({len(text)} bytes)")
        work = Path(tmp) / "work"
        shutil.copytree(out, work)
        for stage in ("trends", "correlate"):
            if cli([stage, "--out", str(work)]):
                raise SystemExit(f"{stage} failed")
        for name in DERIVED:
            shutil.copyfile(work / name, out / name)
            print(f"wrote {out / name}")


if __name__ == "__main__":
    main()
