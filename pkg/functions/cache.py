#!/usr/bin/env python3
# ==============================================================================
# [FILE] functions/cache.py
# [PROJECT] StabVerify
# [ROLE] Content-hashed disk cache for built complexes, posets and SNF results
# [VERSION] v1.0
# [UPDATED] 2026-10-16
# ==============================================================================
"""
One file per entry, named by the sha256 of the canonical JSON of its key:

    <dir>/<key>.pkl = pickle({"key": {...}, "sha256": <hex of payload>, "payload": <pickled object>})

Rings pickle by their grammar name, so entries survive a restart.
"""

from __future__ import annotations

import hashlib
import json
import logging
import pickle
from pathlib import Path
from typing import Callable, Optional, TypeVar

from functions.errors import CacheCorruptError, PreconditionError

logger = logging.getLogger(__name__)

T = TypeVar("T")
CACHE_MODES = ("read", "write", "off")


def cache_key(kind: str, params: dict) -> str:
    text = json.dumps({"kind": kind, **params}, sort_keys=True, default=str)
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


class ComplexCache:
    def __init__(self, directory: Optional[Path], mode: str = "off"):
        if mode not in CACHE_MODES:
            raise PreconditionError(f"cache mode must be one of {', '.join(CACHE_MODES)}, got {mode!r}")
        if mode == "write" and directory is None:
            raise PreconditionError("cache mode 'write' needs a directory")
        self.directory = Path(directory) if directory is not None else None
        self.mode = mode
        self.hits = 0
        self.misses = 0
        self.rebuilt = 0

    def path(self, key: str) -> Path:
        return self.directory / f"{key}.pkl"

    def load(self, key: str):
        """Cached object, or None when absent. Raises CacheCorruptError on a hash mismatch."""
        path = self.path(key)
        if not path.exists():
            return None
        try:
            entry = pickle.loads(path.read_bytes())
            payload = entry["payload"]
            expected = entry["sha256"]
        except Exception as e:
            raise CacheCorruptError(f"{path.name}: unreadable cache entry ({type(e).__name__})") from None
        if hashlib.sha256(payload).hexdigest() != expected:
            raise CacheCorruptError(f"{path.name}: content hash mismatch")
        return pickle.loads(payload)

    def store(self, key: str, params: dict, obj) -> Path:
        self.directory.mkdir(parents=True, exist_ok=True)
        payload = pickle.dumps(obj, protocol=pickle.HIGHEST_PROTOCOL)
        entry = {"key": params, "sha256": hashlib.sha256(payload).hexdigest(), "payload": payload}
        path = self.path(key)
        tmp = path.with_suffix(".tmp")
        tmp.write_bytes(pickle.dumps(entry, protocol=pickle.HIGHEST_PROTOCOL))
        tmp.replace(path)
        return path

    def get_or_build(self, kind: str, params: dict, build: Callable[[], T]) -> T:
        if self.mode == "off" or self.directory is None:
            return build()
        key = cache_key(kind, params)
        try:
            cached = self.load(key)
        except CacheCorruptError as e:
            logger.warning("cache: %s; rebuilding", e)
            self.rebuilt += 1
            cached = None
        if cached is not None:
            self.hits += 1
            logger.debug("cache hit %s %s", kind, params)
            return cached
        self.misses += 1
        obj = build()
        if self.mode == "write":
            self.store(key, {"kind": kind, **params}, obj)
        return obj

    def stats(self) -> dict:
        return {"mode": self.mode, "dir": str(self.directory) if self.directory else None,
                "hits": self.hits, "misses": self.misses, "rebuilt": self.rebuilt}
