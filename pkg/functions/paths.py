#!/usr/bin/env python3
# ==============================================================================
# [FILE] functions/paths.py
# [PROJECT] StabVerify
# [ROLE] Path helpers for config, cache, outputs, logs, archive
# [VERSION] v1.2
# [UPDATED] 2026-10-16
# ==============================================================================

import os
import shutil
from datetime import datetime
from pathlib import Path
from typing import Optional

BASE_DIR = Path(__file__).resolve().parent.parent
CONFIG_FILE = BASE_DIR / "config" / "stabverify.yml"
CLAIMS_FILE = BASE_DIR / "docs" / "claims.yml"
OUTPUTS_DIR = BASE_DIR / "outputs"
LOGS_DIR = BASE_DIR / "logs"
DEFAULT_CACHE_DIR = BASE_DIR / "cache"

CACHE_ENV = "STABVERIFY_CACHE"
WORKERS_ENV = "STABVERIFY_WORKERS"


def cache_dir(flag: Optional[str] = None) -> Path:
    """STABVERIFY_CACHE beats --cache, which beats the default."""
    env = os.getenv(CACHE_ENV, "").strip()
    if env:
        return Path(env)
    if flag:
        return Path(flag)
    return DEFAULT_CACHE_DIR


def outputs_path(filename: str) -> Path:
    OUTPUTS_DIR.mkdir(parents=True, exist_ok=True)
    return OUTPUTS_DIR / filename


def logs_path(filename: str) -> Path:
    LOGS_DIR.mkdir(parents=True, exist_ok=True)
    return LOGS_DIR / filename


def archive_previous(target: Path) -> Optional[Path]:
    """Copy an existing report into archive/<timestamp>/ before it is overwritten."""
    if not target.exists() or not target.is_file():
        return None
    archive = BASE_DIR / "archive" / datetime.now().strftime("%Y%m%d_%H%M%S")
    archive.mkdir(parents=True, exist_ok=True)
    dest = archive / target.name
    shutil.copy(target, dest)
    return dest
