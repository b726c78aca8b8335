"""
Report artifacts: atomic writes, content hashes and the run manifest.
"""

import hashlib
import json
import math
import os
import tempfile
from pathlib import Path
from typing import Any, Dict, List, Union

import numpy as np
import pandas as pd

MANIFEST_NAME = "manifest.json"
CACHE_DIR = ".cache"
FLOAT_FORMAT = "%.10g"


def sha256_bytes(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def sha256_file(path: Union[str, Path], chunk_size: int = 1 << 20) -> str:
    """Hex digest of a file's bytes, read in chunks."""
    digest = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(chunk_size), b""):
            digest.update(chunk)
    return digest.hexdigest()


def atomic_write_bytes(path: Union[str, Path], data: bytes) -> Path:
    """Write to a temp file in the target directory, then rename over the target."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as f:
            f.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def to_jsonable(value: Any) -> Any:
    """Plain JSON types; NaN and infinities become null."""
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, pd.DataFrame):
        return to_jsonable(value.to_dict(orient="records"))
    if isinstance(value, np.ndarray):
        return to_jsonable(value.tolist())
    if isinstance(value, np.generic):
        value = value.item()
    if isinstance(value, float) and not math.isfinite(value):
        return None
    if isinstance(value, Path):
        return str(value)
    return value


def write_json(path: Union[str, Path], payload: Any) -> Path:
    text = json.dumps(to_jsonable(payload), indent=2, sort_keys=True, allow_nan=False)
    return atomic_write_bytes(path, (text + "\n").encode("utf-8"))


def write_frame(path: Union[str, Path], frame: pd.DataFrame) -> Path:
    """CSV with a fixed float format so reruns are byte-identical."""
    text = frame.to_csv(index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    return atomic_write_bytes(path, text.encode("utf-8"))


def write_table(path: Union[str, Path], table: Any) -> Path:
    """DataFrames go to CSV, everything else to JSON."""
    if isinstance(table, pd.DataFrame):
        return write_frame(path, table)
    return write_json(path, table)


def build_manifest(output_dir: Union[str, Path]) -> List[Dict[str, Any]]:
    """
    Every file under ``output_dir`` with relative path, size and sha256,
    sorted by path. The manifest itself and the stage cache are excluded.
    """
    root = Path(output_dir)
    entries = []
    for path in sorted(p for p in root.rglob("*") if p.is_file()):
        rel = path.relative_to(root)
        if rel.parts[0] == CACHE_DIR or rel.as_posix() == MANIFEST_NAME:
            continue
        entries.append({"path": rel.as_posix(), "size": path.stat().st_size, "sha256": sha256_file(path)})
    return entries


def write_manifest(output_dir: Union[str, Path]) -> Path:
    root = Path(output_dir)
    return write_json(root / MANIFEST_NAME, {"files": build_manifest(root)})
