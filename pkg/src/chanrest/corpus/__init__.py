"""Bundled fixtures: small charts, HMSCs, global types and CSMs.

``load("m_cross")`` finds the file with any supported suffix.
"""

from __future__ import annotations

from importlib import resources
from pathlib import Path

NAMES = (
    "m_cross", "m_mixed", "m_relay", "m_ring",
    "h_branch", "h_list",
    "g_list", "g_end", "g_two_indep",
    "csm_list", "csm_flood", "csm_flood_half",
)

_SUFFIXES = (".msc", ".hmsc", ".gt", ".csm", ".trace")


def directory() -> Path:
    return Path(str(resources.files(__name__)))


def path(name: str) -> Path:
    base = directory()
    if Path(name).suffix:
        target = base / name
        if target.exists():
            return target
    for suffix in _SUFFIXES:
        target = base / f"{name}{suffix}"
        if target.exists():
            return target
    raise FileNotFoundError(f"no corpus entry named {name!r}")


def load(name: str):
    from ..formats import load as load_file
    return load_file(path(name))
