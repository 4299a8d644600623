"""Atomic file outputs: NDJSON diagnostics, binary snapshots with JSON
sidecars, and reports."""

import hashlib
import json
import os
import tempfile

import numpy as np

FORMAT_VERSION = "1"


def atomic_write_bytes(path, payload):
    """Write via a temp file in the same directory plus rename."""
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(payload)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def atomic_write_text(path, text):
    atomic_write_bytes(path, text.encode("utf-8"))


def ndjson_line(obj):
    """One deterministic NDJSON line; floats use shortest round-trip repr."""
    return json.dumps(obj, separators=(",", ":"), sort_keys=False,
                      allow_nan=False)


def write_ndjson(path, rows):
    atomic_write_text(path, "".join(ndjson_line(r) + "\n" for r in rows))


def snapshot_paths(directory, engine, step):
    base = os.path.join(directory, f"snap_{engine.replace('+', '-')}_{step:08d}")
    return base + ".f64", base + ".json"


def write_snapshot(directory, engine, step, dist):
    """Raw little-endian float64 row-major (x-major) field plus a JSON
    sidecar carrying grid metadata and a sha256 content checksum."""
    values = np.ascontiguousarray(dist.values, dtype="<f8")
    payload = values.tobytes(order="C")
    bin_path, meta_path = snapshot_paths(directory, engine, step)
    g = dist.grid
    meta = {
        "format_version": FORMAT_VERSION,
        "engine": engine,
        "step": step,
        "time": dist.time,
        "grid": {"x_min": g.x_min, "x_max": g.x_max, "n_x": g.n_x,
                 "p_min": g.p_min, "p_max": g.p_max, "n_p": g.n_p},
        "dtype": "<f8",
        "order": "x-major",
        "shape": [g.n_x, g.n_p],
        "sha256": hashlib.sha256(payload).hexdigest(),
    }
    atomic_write_bytes(bin_path, payload)
    atomic_write_text(meta_path, json.dumps(meta, indent=2))
    return bin_path, meta_path


def read_snapshot(bin_path, meta_path):
    """Load a snapshot pair back; verifies the checksum and shape."""
    with open(meta_path, "r", encoding="utf-8") as fh:
        meta = json.load(fh)
    with open(bin_path, "rb") as fh:
        payload = fh.read()
    digest = hashlib.sha256(payload).hexdigest()
    if digest != meta["sha256"]:
        raise OSError(f"snapshot checksum mismatch for {bin_path}")
    values = np.frombuffer(payload, dtype="<f8").reshape(meta["shape"])
    return values, meta
