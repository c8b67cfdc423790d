#!/usr/bin/env python3
# ==============================================================================
# [FILE] src/test_cache.py
# [PROJECT] StabVerify
# [ROLE] Tests for the content-hashed complex cache
# [VERSION] v1.0
# [UPDATED] 2026-10-16
# ==============================================================================

import pickle

import pytest

from functions.builders import COMPLEX_GUARD, build_basis_complex
from functions.cache import ComplexCache, cache_key
from functions.errors import CacheCorruptError, PreconditionError
from src import suite


def _params(ring, n):
    return {"builder": "B", "ring": ring.name, "n": n, "m": 0}


def test_cache_key_is_canonical():
    assert cache_key("B", {"n": 3, "ring": "F_2"}) == cache_key("B", {"ring": "F_2", "n": 3})
    assert cache_key("B", {"n": 3, "ring": "F_2"}) != cache_key("B", {"n": 2, "ring": "F_2"})
    assert len(cache_key("T", {})) == 64


def test_round_trip_of_a_built_complex(f2, cache_dir):
    cache = ComplexCache(cache_dir, "write")
    first = cache.get_or_build("B", _params(f2, 3), lambda: build_basis_complex(f2, 3))
    again = ComplexCache(cache_dir, "write").get_or_build("B", _params(f2, 3), lambda: pytest.fail("rebuilt"))
    assert again == first
    assert again.f_vector() == (7, 21, 28)
    assert cache.stats()["misses"] == 1
    assert len(list(cache_dir.glob("*.pkl"))) == 1


def test_corrupt_entry_is_rebuilt(f2, cache_dir):
    cache = ComplexCache(cache_dir, "write")
    cache.get_or_build("B", _params(f2, 2), lambda: build_basis_complex(f2, 2))
    path = cache.path(cache_key("B", _params(f2, 2)))
    path.write_bytes(b"not a pickle")
    with pytest.raises(CacheCorruptError):
        cache.load(cache_key("B", _params(f2, 2)))
    rebuilt = cache.get_or_build("B", _params(f2, 2), lambda: build_basis_complex(f2, 2))
    assert rebuilt.f_vector() == (3, 3)
    assert cache.stats()["rebuilt"] == 1


def test_hash_mismatch_is_detected(f2, cache_dir):
    cache = ComplexCache(cache_dir, "write")
    key = cache_key("B", _params(f2, 2))
    path = cache.store(key, _params(f2, 2), build_basis_complex(f2, 2))
    entry = pickle.loads(path.read_bytes())
    entry["sha256"] = "0" * 64
    path.write_bytes(pickle.dumps(entry))
    with pytest.raises(CacheCorruptError, match="hash mismatch"):
        cache.load(key)


def test_off_mode_touches_no_files(f2, cache_dir):
    cache = ComplexCache(cache_dir, "off")
    x = cache.get_or_build("B", _params(f2, 2), lambda: build_basis_complex(f2, 2))
    assert x.f_vector() == (3, 3)
    assert not cache_dir.exists()


def test_read_mode_never_writes(f2, cache_dir):
    cache = ComplexCache(cache_dir, "read")
    cache.get_or_build("B", _params(f2, 2), lambda: build_basis_complex(f2, 2))
    assert not cache_dir.exists()
    assert cache.stats()["misses"] == 1


def test_mode_validation(cache_dir):
    with pytest.raises(PreconditionError):
        ComplexCache(cache_dir, "sometimes")
    with pytest.raises(PreconditionError):
        ComplexCache(None, "write")


def test_battery_builders_share_the_configured_cache(f2, cache_dir):
    suite.configure(cache_dir, "write", {})
    x = suite.cached_basis_complex(f2, 2, 0, 1000, True)
    y = suite.cached_basis_complex(f2, 2, 0, 1000, True)
    assert x == y
    stats = suite.cache().stats()
    assert (stats["hits"], stats["misses"]) == (1, 1)


def test_steinberg_modules_survive_the_cache(f2, cache_dir):
    suite.configure(cache_dir, "write", {})
    built = suite.cached_module(f2, "St", 2)
    loaded = ComplexCache(cache_dir, "read").get_or_build(
        "module", {"module": "St", "ring": "F_2", "n": 2, "m": 0, "w": None, "guard": COMPLEX_GUARD},
        lambda: pytest.fail("rebuilt"))
    assert loaded.rank == built.rank == 2
    g = loaded.group.generators[0]
    assert loaded.module.matrix(g).tolist() == built.module.matrix(g).tolist()
    assert loaded.poset.index[built.poset.elements[0]] == 0
