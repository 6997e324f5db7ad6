from __future__ import annotations

import pytest

from fixture_repo import build_fixture_repo


@pytest.fixture(scope="session")
def fixture_repo(tmp_path_factory):
    return build_fixture_repo(tmp_path_factory.mktemp("repo") / "fixture")


@pytest.fixture(scope="session")
def mined(fixture_repo):
    from codentropy.miner import mine

    return mine(fixture_repo)
