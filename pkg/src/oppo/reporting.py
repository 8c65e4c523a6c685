"""Deterministic report plumbing: canonical JSON, digests, provenance.

Reports deliberately carry no timestamps so that re-running a command on the
same inputs produces byte-identical files.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path
from typing import Mapping

VERSION = "0.1.0"


def canonical_json(payload) -> str:
    return json.dumps(
        payload, sort_keys=True, ensure_ascii=False, indent=2, allow_nan=False
    )


def file_digest(path: str | Path) -> str:
    h = hashlib.sha256()
    with Path(path).open("rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return "sha256:" + h.hexdigest()


def config_hash(config: Mapping) -> str:
    digest = hashlib.sha256(
        json.dumps(config, sort_keys=True, ensure_ascii=False).encode("utf-8")
    ).hexdigest()
    return digest[:16]


def provenance(config: Mapping, inputs: Mapping[str, str | Path], seed: int) -> dict:
    return {
        "version": VERSION,
        "seed": seed,
        "config_hash": config_hash(config),
        "inputs": {name: file_digest(p) for name, p in sorted(inputs.items())},
    }


def write_report(path: str | Path, payload: Mapping) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(canonical_json(payload) + "\n", encoding="utf-8")
    return path
