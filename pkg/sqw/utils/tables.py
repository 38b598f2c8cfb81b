"""
CSV result tables and the run manifest.
"""
import hashlib
import json
from pathlib import Path
from typing import Iterable

import pandas as pd

FLOAT_FORMAT = "%.17g"
MANIFEST_NAME = "manifest.json"


def write_table(frame: pd.DataFrame, path: Path | str) -> Path:
    """Write ``frame`` with round-trippable floats and no index."""
    path = Path(path)
    frame.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    return path


def read_table(path: Path | str) -> pd.DataFrame:
    return pd.read_csv(path, float_precision="round_trip")


def sha256_of(path: Path | str) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as handle:
        for chunk in iter(lambda: handle.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


def write_manifest(out_dir: Path | str, files: Iterable[Path | str]) -> Path:
    """
    List every file relative to ``out_dir`` with its size and SHA-256, sorted by path.
    The manifest carries no timestamps, so identical runs give identical bytes.
    """
    out_dir = Path(out_dir)
    entries = []
    for file in sorted({Path(f).resolve() for f in files}):
        entries.append({
            "path": file.relative_to(out_dir.resolve()).as_posix(),
            "bytes": file.stat().st_size,
            "sha256": sha256_of(file),
        })
    entries.sort(key=lambda e: e["path"])
    path = out_dir / MANIFEST_NAME
    path.write_text(json.dumps({"files": entries}, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path


__all__ = ["write_table", "read_table", "sha256_of", "write_manifest", "MANIFEST_NAME"]
