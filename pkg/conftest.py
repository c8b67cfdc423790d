#!/usr/bin/env python3
# ==============================================================================
# [FILE] conftest.py
# [PROJECT] StabVerify
# [ROLE] Shared pytest fixtures: small rings, isolated cache and battery state
# [VERSION] v1.0
# [UPDATED] 2026-10-16
# ==============================================================================

import pytest

from functions.rings import parse_ring
from src import suite


@pytest.fixture
def f2():
    return parse_ring("F_2")


@pytest.fixture
def f3():
    return parse_ring("F_3")


@pytest.fixture
def z4():
    return parse_ring("Z/4")


@pytest.fixture
def z6():
    return parse_ring("Z/6")


@pytest.fixture
def ut2():
    return parse_ring("UT2(F_2)")


@pytest.fixture
def cache_dir(tmp_path):
    return tmp_path / "cache"


@pytest.fixture(autouse=True)
def reset_battery(monkeypatch):
    """Every test starts with the cache off, config guards only, and no env overrides."""
    monkeypatch.delenv("STABVERIFY_CACHE", raising=False)
    monkeypatch.delenv("STABVERIFY_WORKERS", raising=False)
    suite.configure(None, "off", suite.load_config().get("guards"))
    yield
    suite.configure(None, "off", {})
