"""Run manifests: what went into an output file, and how to make it again."""

from __future__ import annotations

import hashlib
import json
import platform
import time
from contextlib import contextmanager
from importlib import metadata
from pathlib import Path
from typing import Any, Iterator

import vpbounds

_TRACKED_PACKAGES = ("numpy", "scipy", "shapely", "pydantic")


def _sha256_file(path: str | Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 20), b""):
            h.update(block)
    return h.hexdigest()


def _versions() -> dict[str, str]:
    out = {"vpbounds": vpbounds.__version__, "python": platform.python_version()}
    for name in _TRACKED_PACKAGES:
        try:
            out[name] = metadata.version(name)
        except metadata.PackageNotFoundError:
            out[name] = "unknown"
    return out


def build_run_manifest(
    *,
    subcommand: str,
    config: dict[str, Any],
    inputs: list[str | Path],
    outputs: list[str | Path],
    timings: dict[str, float],
) -> dict[str, Any]:
    return {
        "created_at": int(time.time()),
        "subcommand": subcommand,
        "config": config,
        "inputs": {str(p): _sha256_file(p) for p in inputs if Path(p).is_file()},
        "outputs": [str(p) for p in outputs],
        "versions": _versions(),
        "timings_s": {k: round(v, 6) for k, v in timings.items()},
    }


def write_run_manifest(path: str | Path, manifest: dict[str, Any]) -> None:
    Path(path).write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")


class Stopwatch:
    """Collects named wall-clock timings for the manifest."""

    def __init__(self) -> None:
        self.timings: dict[str, float] = {}

    @contextmanager
    def time(self, name: str) -> Iterator[None]:
        t0 = time.perf_counter()
        try:
            yield
        finally:
            self.timings[name] = self.timings.get(name, 0.0) + time.perf_counter() - t0
