"""Shared fixtures: the composed sample project and its seeded data."""

import copy
from pathlib import Path

import pytest

from cockpit.catena import ProjectDataStore
from cockpit.composer import compose
from cockpit.controls import shipped_registry, shipped_repository
from cockpit.sample_project import seed_store, six_goal_plan, source_files


@pytest.fixture(scope="session")
def sample_plan():
    return six_goal_plan()


@pytest.fixture(scope="session")
def repo():
    return shipped_repository()


@pytest.fixture(scope="session")
def registry():
    return shipped_registry()


@pytest.fixture(scope="session")
def composed(sample_plan, repo):
    result = compose(sample_plan, repo)
    assert result.passed, [i.message for i in result.report.failures]
    return result


@pytest.fixture()
def sample_catena(composed):
    # deep copy so tests may mutate freely
    return copy.deepcopy(composed.catena)


@pytest.fixture(scope="session")
def seeded_store(composed, repo):
    store = ProjectDataStore()
    seed_store(store, composed.catena, repo)
    return store


@pytest.fixture()
def source_dir(tmp_path) -> Path:
    for name, text in source_files().items():
        (tmp_path / name).write_text(text, encoding="utf-8")
    return tmp_path
