#!/usr/bin/env python3
# ==============================================================================
# [FILE] functions/errors.py
# [PROJECT] StabVerify
# [ROLE] Exception hierarchy shared by the library and the CLI
# [VERSION] v1.0
# [UPDATED] 2026-10-16
# ==============================================================================

from __future__ import annotations

from typing import Optional


class StabVerifyError(Exception):
    """Base class for every error the library raises on purpose."""


class RingSpecError(StabVerifyError):
    pass


class GuardExceeded(StabVerifyError):
    """A size guard was hit before any expensive enumeration started (or during it)."""

    def __init__(self, what: str, estimate: Optional[int], limit: int):
        self.what = what
        self.estimate = estimate
        self.limit = limit
        est = "unknown" if estimate is None else str(estimate)
        super().__init__(f"{what}: estimate {est} exceeds guard {limit}")

    def as_witness(self) -> dict:
        return {"guard": self.what, "estimate": self.estimate, "limit": self.limit}


class PreconditionError(StabVerifyError):
    pass


class NotInvertibleError(StabVerifyError):
    pass


class SimplicialError(StabVerifyError):
    """A map or group action failed to preserve simplices / order."""


class CacheCorruptError(StabVerifyError):
    pass
