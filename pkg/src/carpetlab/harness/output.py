"""File emission: 16-bit PGM rasters with a JSON sidecar, CSV and JSON.

All writers are byte-deterministic for identical input arrays.
"""
import json
import os

import numpy as np

PGM_MAXVAL = 65535


def _atomic_write(path, data):
    """Write ``data`` (bytes) to ``path`` through a temporary file."""
    tmp = f"{path}.tmp{os.getpid()}"
    try:
        with open(tmp, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    finally:
        if os.path.exists(tmp):
            os.remove(tmp)


def dumps_json(obj):
    """Canonical JSON text: sorted keys, two-space indent, trailing newline."""
    return json.dumps(obj, sort_keys=True, indent=2, allow_nan=False) + "\n"


def write_json(path, obj):
    _atomic_write(path, dumps_json(obj).encode("ascii"))


def pgm_intensities(values):
    """Map W to 16-bit gray levels, low W dark.

    ``round(65535 (W - W_min) / (W_max - W_min))`` with halves rounded up;
    a constant grid maps to 0.  Rows are flipped so the first row of the
    result is the latest time.
    """
    w = np.asarray(values, dtype=float)
    lo, hi = float(np.min(w)), float(np.max(w))
    if hi > lo:
        levels = np.floor(PGM_MAXVAL * ((w - lo) / (hi - lo)) + 0.5)
    else:
        levels = np.zeros_like(w)
    return np.clip(levels, 0, PGM_MAXVAL).astype(">u2")[::-1]


def pgm_bytes(values):
    """Binary P5 image with 16-bit big-endian samples."""
    levels = pgm_intensities(values)
    nt, nx = levels.shape
    header = f"P5\n{nx} {nt}\n{PGM_MAXVAL}\n".encode("ascii")
    return header + levels.tobytes()


def read_pgm(path):
    """Parse a 16-bit P5 file written by :func:`write_pgm` (top row first)."""
    with open(path, "rb") as fh:
        data = fh.read()
    parts = data.split(b"\n", 3)
    if parts[0] != b"P5":
        raise ValueError("not a binary PGM")
    nx, nt = map(int, parts[1].split())
    if int(parts[2]) != PGM_MAXVAL:
        raise ValueError("expected maxval 65535")
    return np.frombuffer(parts[3], dtype=">u2").reshape(nt, nx)


def write_pgm(path, grid, sidecar):
    """Write the raster and ``path + '.json'`` holding ``sidecar``."""
    _atomic_write(path, pgm_bytes(grid.values))
    write_json(path + ".json", sidecar)


def _fmt(v):
    return "%.17g" % v


def csv_text(header, columns):
    """CSV with '.' decimals, 17 significant digits and LF line endings."""
    lines = [",".join(header)]
    for row in zip(*columns):
        lines.append(",".join(_fmt(v) for v in row))
    return "\n".join(lines) + "\n"


def grid_csv(grid, cfg):
    """Long-format CSV ``t_over_T,x_over_L,W``: t ascending, x ascending."""
    tt, xx = np.meshgrid(grid.t / cfg.revival_time, grid.x / cfg.length, indexing="ij")
    return csv_text(["t_over_T", "x_over_L", "W"],
                    [tt.ravel(), xx.ravel(), grid.values.ravel()])


def write_text(path, text):
    _atomic_write(path, text.encode("ascii"))


def grid_json(grid, cfg, sidecar):
    doc = dict(sidecar)
    doc["x_over_L"] = (grid.x / cfg.length).tolist()
    doc["t_over_T"] = (grid.t / cfg.revival_time).tolist()
    doc["W"] = grid.values.tolist()
    return doc
