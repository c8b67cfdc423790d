#!/usr/bin/env python3
# ==============================================================================
# [FILE] src/stabverify.py
# [PROJECT] StabVerify
# [ROLE] Main entrypoint - batch CLI: build, verify, report
# [VERSION] v1.0
# [UPDATED] 2026-10-16
# ==============================================================================
"""
StabVerify — command line

Subcommands
- ring, build, homology, verify-cm, steinberg, relative-generators, charney,
  coinvariants, stability, suite

Inputs
- config/stabverify.yml (authoritative: guards, defaults, profiles)
- --config FILE (optional; YAML mapping of flag name -> value, fills flags not given)

Outputs
- outputs/report.json (or --out), plus <stem>.<table>.csv for stability tables
- logs/stabverify.log
- logs/stabverify.error.json (only on error)

Environment
- STABVERIFY_CACHE: cache directory (beats --cache)
- STABVERIFY_WORKERS: worker processes for independent checks

Exit codes
- 0: every check passed or was infeasible by guard
- 1: at least one check failed
- 2: bad arguments or an error outside any check
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
import time
from pathlib import Path
from typing import Dict, List, Optional

import yaml

from functions.builders import BUILDER_KINDS
from functions.errors import PreconditionError
from functions.linalg import parse_matrix
from functions.paths import CACHE_ENV, archive_previous, cache_dir, logs_path, outputs_path
from functions.rings import parse_ring
from src import suite as battery
from src.report import PLUMBING, VerificationReport, write_json

__app__ = "StabVerify"
__component__ = "stabverify"
__version__ = "1.0.0"

logger = logging.getLogger(__name__)

COMMANDS = ("ring", "build", "homology", "verify-cm", "steinberg", "relative-generators", "charney",
            "coinvariants", "stability", "suite")
MODULES = ("St", "Strel", "Ch", "Chrel")


class _Parser(argparse.ArgumentParser):
    """Argument errors become exceptions so they get the error JSON and exit code 2."""

    def error(self, message: str):
        raise PreconditionError(f"{self.prog}: {message}")


# ----------------------------
# Arguments
# ----------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--ring", help="ring spec, e.g. F_2, F_4, Z/4, prod(F_2,F_3), UT2(F_2), op(UT2(F_2))")
    common.add_argument("--n", type=int)
    common.add_argument("--m", type=int)
    common.add_argument("--coeff", help="Z | Q | Fp:<p> | half")
    common.add_argument("--max-degree", type=int)
    common.add_argument("--guard", type=int, help="simplex guard for complex builders")
    common.add_argument("--out", help="report path (default outputs/report.json)")
    common.add_argument("--cache", help="cache directory")
    common.add_argument("--cache-mode", choices=("read", "write", "off"))
    common.add_argument("--config", help="YAML file of flag values")
    common.add_argument("--workers", type=int)
    common.add_argument("--verbose", action="store_true", default=None)

    parser = _Parser(prog="stabverify", description="Exact verification lab for homological stability")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("ring", parents=[common], help="parse a ring and check its axioms")
    p.add_argument("--spec")

    for name in ("build", "homology"):
        p = sub.add_parser(name, parents=[common])
        p.add_argument("--complex", choices=BUILDER_KINDS)
        p.add_argument("--gamma", help="rows of gamma, '1,0,0;0,1,0'")
        p.add_argument("--v", help="rows spanning V (SE1rel)")
        p.add_argument("--w", help="rows spanning W (SE1rel)")
        if name == "homology":
            p.add_argument("--relative-to", choices=("Brel", "B"))

    p = sub.add_parser("verify-cm", parents=[common])
    p.add_argument("--complex", choices=("B", "Brel", "T", "Trel"))

    sub.add_parser("steinberg", parents=[common])
    sub.add_parser("relative-generators", parents=[common])

    p = sub.add_parser("charney", parents=[common])
    p.add_argument("--w", help="rows spanning W for Ch(R^n, W)")

    p = sub.add_parser("coinvariants", parents=[common])
    p.add_argument("--module", choices=MODULES)
    p.add_argument("--w", help="rows spanning W (Chrel)")

    sub.add_parser("stability", parents=[common])

    p = sub.add_parser("suite", parents=[common])
    p.add_argument("--profile", choices=battery.PROFILES)
    return parser


def apply_config_file(args: argparse.Namespace, path: Optional[str]) -> None:
    """Keys are flag names; values fill flags left unset on the command line."""
    if not path:
        return
    with open(path, "r", encoding="utf-8") as f:
        values = yaml.safe_load(f) or {}
    if not isinstance(values, dict):
        raise PreconditionError(f"{path}: config must be a mapping of flag names")
    for key, value in values.items():
        attr = str(key).lstrip("-").replace("-", "_")
        if not hasattr(args, attr):
            raise PreconditionError(f"{path}: unknown flag {key!r} for {args.command}")
        if getattr(args, attr) is None:
            setattr(args, attr, value)


def apply_defaults(args: argparse.Namespace, cfg: dict) -> None:
    defaults = cfg.get("defaults") or {}
    for attr, fallback in (("coeff", "half"), ("workers", 1), ("verbose", False)):
        if getattr(args, attr, None) is None:
            setattr(args, attr, defaults.get(attr, fallback))
    if args.cache_mode is None:
        explicit = args.cache or os.getenv(CACHE_ENV, "").strip()
        args.cache_mode = "write" if explicit else defaults.get("cache_mode", "off")


def setup_logging(verbose: bool) -> None:
    handlers = [logging.StreamHandler(), logging.FileHandler(logs_path("stabverify.log"), encoding="utf-8")]
    logging.basicConfig(level=logging.DEBUG if verbose else logging.INFO,
                        format="%(asctime)s - %(levelname)s - %(message)s", handlers=handlers, force=True)


# ----------------------------
# Subcommand -> battery entries
# ----------------------------

def _need(args: argparse.Namespace, *names: str) -> None:
    missing = [f"--{n.replace('_', '-')}" for n in names if getattr(args, n, None) is None]
    if missing:
        raise PreconditionError(f"{args.command} needs {', '.join(missing)}")


def _rows(args: argparse.Namespace, attr: str) -> Optional[List[List[int]]]:
    text = getattr(args, attr, None)
    if not text:
        return None
    return [list(r) for r in parse_matrix(parse_ring(args.ring), str(text)).rows]


def entries_for(args: argparse.Namespace) -> List[battery.Entry]:
    cmd = args.command
    base = {"ring": args.ring}
    if cmd == "ring":
        spec = args.spec or args.ring
        if not spec:
            raise PreconditionError("ring needs --spec")
        return [("ring", "ring-axioms", {"ring": spec})]

    _need(args, "ring", "n")
    base["n"] = args.n
    if args.m is not None:
        base["m"] = args.m

    if cmd in ("build", "homology"):
        params = {**base, "builder": args.complex or "B"}
        for attr in ("gamma", "v", "w"):
            rows = _rows(args, attr)
            if rows:
                params[attr] = rows
        if cmd == "homology":
            params["coeff"] = args.coeff if args.coeff_given else "Z"
            if args.relative_to:
                params["relative_to"] = args.relative_to
        return [(cmd, PLUMBING, params)]

    if cmd == "verify-cm":
        kind = args.complex or "B"
        if kind in ("Brel", "Trel"):
            base.setdefault("m", 1)
        else:
            base.pop("m", None)
        if kind in ("B", "Brel"):
            return [("cm_basis", "basis-complex-cohen-macaulay", base)]
        return [("cm_tits", "tits-complex-cohen-macaulay", base)]

    if cmd == "steinberg":
        m = base.get("m", 0)
        out = [("steinberg_rank", "steinberg-module-rank", base)]
        if m:
            out.append(("relative_generate", "relative-apartments-generate", base))
        else:
            out.append(("apartments_generate", "apartments-generate", base))
        out.append(("negation", "apartment-negation", base))
        return out

    if cmd == "relative-generators":
        base.setdefault("m", 1)
        return [("relative_generate", "relative-apartments-generate", base),
                ("negation", "apartment-negation", base)]

    if cmd in ("charney", "coinvariants"):
        module = "Ch" if cmd == "charney" else (args.module or "St")
        w = _rows(args, "w")
        if cmd == "charney" and w:
            module = "Chrel"
        params = {**base, "module": module, "coeff": args.coeff}
        if w:
            params["w"] = w
        anchor = {"St": "steinberg-coinvariants-vanish", "Strel": "relative-steinberg-coinvariants-vanish",
                  "Ch": "charney-coinvariants-vanish", "Chrel": "relative-charney-coinvariants-vanish"}[module]
        return [("coinvariants", anchor, params)]

    if cmd == "stability":
        i_max = args.max_degree if args.max_degree is not None else 2
        return [("stability", "stability-range", {"ring": args.ring, "n_max": args.n, "i_max": i_max,
                                                  "coeff": args.coeff})]
    raise PreconditionError(f"unknown command {cmd!r}")


# ----------------------------
# Run
# ----------------------------

def _error_json(e: BaseException) -> dict:
    return {
        "timestamp_utc": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
        "app": __app__,
        "component": __component__,
        "version": __version__,
        "error_type": type(e).__name__,
        "error": str(e),
    }


def execute(args: argparse.Namespace, cfg: dict) -> VerificationReport:
    guards: Dict[str, int] = dict(cfg.get("guards") or {})
    if args.guard is not None:
        guards["complex_simplices"] = args.guard
    directory = cache_dir(args.cache) if args.cache_mode != "off" else None
    battery.configure(directory, args.cache_mode, guards)
    workers = battery.workers_from_env(args.workers)

    if args.command == "suite":
        report = battery.suite(args.profile or "smoke", workers, cfg)
    else:
        ring = parse_ring(args.spec or args.ring) if args.command == "ring" else \
            (parse_ring(args.ring) if args.ring else None)
        report = VerificationReport(args.command, ring.to_json() if ring else None)
        report.extend(battery.run_battery(entries_for(args), workers))
        battery.attach_tables(report)
    stats = battery.cache().stats()
    if stats["mode"] != "off":
        logger.info("cache %s: %d hits, %d misses, %d rebuilt", stats["dir"], stats["hits"],
                    stats["misses"], stats["rebuilt"])
    return report


def run(argv: Optional[List[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = build_parser().parse_args(argv)
        apply_config_file(args, args.config)
        args.coeff_given = args.coeff is not None
        cfg = battery.load_config()
        apply_defaults(args, cfg)
        setup_logging(bool(args.verbose))
        logger.info("%s %s: %s", __app__, __version__, " ".join(argv))

        report = execute(args, cfg)
        out = Path(args.out) if args.out else outputs_path("report.json")
        archive_previous(out)
        for path in report.write(out):
            print(f"Wrote → {path}")
        counts = report.counts
        print(f"{report.command}: {counts['pass']} pass, {counts['fail']} fail, {counts['infeasible']} infeasible")
        return report.exit_code
    except Exception as e:
        write_json(logs_path("stabverify.error.json"), _error_json(e))
        logger.error("FATAL: %s: %s", type(e).__name__, e)
        print(f"FATAL: {type(e).__name__}: {e}", file=sys.stderr)
        return 2


def main() -> None:
    raise SystemExit(run())


if __name__ == "__main__":
    main()
