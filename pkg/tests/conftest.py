from __future__ import annotations

from pathlib import Path

import pytest

from gazereach.authoring import data_dir
from gazereach.config import load_config
from gazereach.session import run_replay


@pytest.fixture(scope="session")
def bundled_dir() -> Path:
    return data_dir()


@pytest.fixture(scope="session")
def bundled_config(bundled_dir):
    return load_config(bundled_dir / "session_config.json")


@pytest.fixture(scope="session")
def bundled_trace(bundled_dir) -> Path:
    return bundled_dir / "six_task_trace.jsonl"


@pytest.fixture(scope="session")
def six_task_replay(bundled_dir, bundled_trace):
    """One shared replay of the bundled six-task trace: (report, session, wall_seconds)."""
    import time

    config = load_config(bundled_dir / "session_config.json")
    start = time.perf_counter()
    report, session = run_replay(config, bundled_trace)
    wall = time.perf_counter() - start
    return report, session, wall
