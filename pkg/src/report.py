#!/usr/bin/env python3
# ==============================================================================
# [FILE] src/report.py
# [PROJECT] StabVerify
# [ROLE] Verification report: per-check records, anchors, JSON/CSV writers
# [VERSION] v1.0
# [UPDATED] 2026-10-16
# ==============================================================================

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Dict, Iterable, List, Optional

import yaml

from functions.errors import GuardExceeded
from functions.paths import CLAIMS_FILE

__app__ = "StabVerify"
__component__ = "report"
__version__ = "1.0.0"

SCHEMA_VERSION = "1.0"
STATUSES = ("pass", "fail", "infeasible")
PLUMBING = "plumbing"


def utc_now() -> str:
    return time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime())


def write_json(path: Path, obj: dict) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(obj, indent=2, ensure_ascii=False, default=str), encoding="utf-8")


def load_claims(path: Path = CLAIMS_FILE) -> Dict[str, str]:
    if not path.exists():
        return {}
    with path.open("r", encoding="utf-8") as f:
        raw = yaml.safe_load(f) or {}
    return {str(k): str(v) for k, v in (raw.get("claims") or {}).items()}


@dataclass
class CheckRecord:
    name: str
    anchor: str
    status: str
    witness: dict = field(default_factory=dict)
    wall_time_sec: float = 0.0

    def __post_init__(self):
        if self.status not in STATUSES:
            raise ValueError(f"status must be one of {STATUSES}, got {self.status!r}")

    def to_json(self) -> dict:
        return {"name": self.name, "anchor": self.anchor, "status": self.status,
                "witness": self.witness, "wall_time_sec": round(self.wall_time_sec, 3)}


def run_check(name: str, anchor: str, fn: Callable[[], dict]) -> CheckRecord:
    """Run one check; a guard hit becomes `infeasible`, anything else propagates."""
    start = time.perf_counter()
    try:
        witness = fn()
        status = "pass" if witness.get("passed") else "fail"
    except GuardExceeded as e:
        witness = {"infeasible": e.as_witness(), "reason": str(e)}
        status = "infeasible"
    return CheckRecord(name, anchor, status, witness, time.perf_counter() - start)


class VerificationReport:
    def __init__(self, command: str, ring: Optional[dict] = None, claims: Optional[Dict[str, str]] = None):
        self.command = command
        self.ring = ring
        self.records: List[CheckRecord] = []
        self.warnings: List[str] = []
        self.tables: Dict[str, str] = {}
        self.claims = load_claims() if claims is None else claims

    def add(self, record: CheckRecord) -> CheckRecord:
        if record.anchor != PLUMBING and self.claims and record.anchor not in self.claims:
            self.warnings.append(f"anchor_not_registered: {record.anchor}")
        self.records.append(record)
        return record

    def extend(self, records: Iterable[CheckRecord]) -> None:
        for r in records:
            self.add(r)

    @property
    def counts(self) -> Dict[str, int]:
        out = {s: 0 for s in STATUSES}
        for r in self.records:
            out[r.status] += 1
        return out

    @property
    def exit_code(self) -> int:
        return 1 if self.counts["fail"] else 0

    def to_json(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "timestamp_utc": utc_now(),
            "app": __app__,
            "component": self.command,
            "version": __version__,
            "command": self.command,
            "ring": self.ring,
            "records": [r.to_json() for r in self.records],
            "counts": self.counts,
            "warnings": list(self.warnings),
        }

    def write(self, path: Path) -> List[Path]:
        written = [path]
        write_json(path, self.to_json())
        for name, text in self.tables.items():
            csv_path = path.with_name(f"{path.stem}.{name}.csv")
            csv_path.write_text(text, encoding="utf-8")
            written.append(csv_path)
        return written
