#!/usr/bin/env python3
"""
Console output for wgm-scatter runs.
Emoji-prefixed, colorama-colored status lines on stderr, so stdout and
the emitted CSV/JSON/SVG files stay machine-readable.
"""

import sys
from typing import Iterable, Tuple

from colorama import Fore, Style, init

init()

_quiet = False

LEVEL_STYLES = {
    "info": ("🔄", Fore.CYAN),
    "ok": ("✅", Fore.GREEN),
    "warn": ("⚠️ ", Fore.YELLOW),
    "error": ("❌", Fore.RED),
    "data": ("📊", Fore.MAGENTA),
}


def set_quiet(quiet: bool) -> None:
    """Silence info-level lines (warnings and errors still print)"""
    global _quiet
    _quiet = quiet


def log(message: str, level: str = "info") -> None:
    if _quiet and level in ("info", "data"):
        return
    icon, color = LEVEL_STYLES.get(level, LEVEL_STYLES["info"])
    print(f"{color}{icon} {message}{Style.RESET_ALL}", file=sys.stderr)


def log_info(message: str) -> None:
    log(message, "info")


def log_ok(message: str) -> None:
    log(message, "ok")


def log_warn(message: str) -> None:
    log(message, "warn")


def log_error(message: str) -> None:
    log(message, "error")


def print_banner(title: str, width: int = 60) -> None:
    if _quiet:
        return
    print(f"\n{Fore.CYAN}{'=' * width}", file=sys.stderr)
    print(f"{f' {title} ':=^{width}}", file=sys.stderr)
    print(f"{'=' * width}{Style.RESET_ALL}", file=sys.stderr)


def print_table(rows: Iterable[Tuple[str, object]], width: int = 60) -> None:
    """Two-column summary table, label on the left and value on the right"""
    if _quiet:
        return
    print(f"{'-' * width}", file=sys.stderr)
    for label, value in rows:
        if isinstance(value, float):
            value = f"{value:.6g}"
        print(f"{label:<36} {Fore.GREEN}●{Style.RESET_ALL} {str(value):>20}", file=sys.stderr)
    print(f"{'-' * width}", file=sys.stderr)
