"""File emission helpers: atomic writes, CSV with schema sidecars, manifests.

Every CSV carries a JSON sidecar describing its columns, and every
experiment directory gets a manifest recording inputs, seeds and the
sha256 of each emitted file.  Reruns with the same configuration and
seed produce byte-identical data files; the manifest's ``content_hash``
covers exactly the reproducible subset (config, seeds, file digests),
so equal hashes certify an exact reproduction while wall time stays
out of the hash.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import os
import tempfile
from pathlib import Path

__all__ = ["atomic_write_text", "write_csv", "write_json", "file_sha256", "build_manifest"]

MANIFEST_VERSION = 1


def atomic_write_text(path, text: str) -> Path:
    """Write text to path via a temp file + rename, creating parents."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def write_csv(path, rows: list[dict], columns: list[str]) -> Path:
    """Emit rows as CSV (header included) plus a .schema.json sidecar."""
    path = Path(path)
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=columns, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({c: _fmt(row.get(c)) for c in columns})
    atomic_write_text(path, buf.getvalue())
    schema = {
        "version": MANIFEST_VERSION,
        "file": path.name,
        "columns": columns,
        "rows": len(rows),
    }
    atomic_write_text(path.with_suffix(path.suffix + ".schema.json"),
                      json.dumps(schema, indent=2, sort_keys=True) + "\n")
    return path


def _fmt(v):
    if isinstance(v, float):
        return repr(v)  # round-trippable, locale-free
    return v


def write_json(path, obj) -> Path:
    return atomic_write_text(path, json.dumps(obj, indent=2, sort_keys=True) + "\n")


def file_sha256(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def build_manifest(experiment: str, config: dict, seed: int, out_dir, files: list,
                   wall_time_s: float, version: str) -> dict:
    out_dir = Path(out_dir)
    entries = []
    for f in sorted(Path(p) for p in files):
        entries.append({
            "path": str(f.relative_to(out_dir)),
            "sha256": file_sha256(f),
            "bytes": f.stat().st_size,
        })
    hashed = {
        "experiment": experiment,
        "config": config,
        "seed": seed,
        "files": [(e["path"], e["sha256"]) for e in entries],
        "version": version,
    }
    content_hash = hashlib.sha256(
        json.dumps(hashed, sort_keys=True).encode()).hexdigest()
    return {
        "manifest_version": MANIFEST_VERSION,
        "experiment": experiment,
        "config": config,
        "seed": seed,
        "library_version": version,
        "files": entries,
        "content_hash": content_hash,
        "wall_time_s": round(wall_time_s, 3),
    }
