"""File output: atomic writes, binary PGM, CSV and JSON with 17 significant digits."""
from __future__ import annotations

import json
import math
import os
import tempfile

import numpy as np


def atomic_write_bytes(path, data: bytes):
    """Write via a temporary file in the target directory, then rename over ``path``."""
    path = os.fspath(path)
    d = os.path.dirname(os.path.abspath(path))
    os.makedirs(d, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def atomic_write_text(path, text: str):
    atomic_write_bytes(path, text.encode("utf-8"))


def fmt_float(x):
    return format(float(x), ".17g")


def pgm_bytes(gray) -> bytes:
    """``P5\\n<w> <h>\\n255\\n`` followed by the rows, top to bottom."""
    g = np.asarray(gray)
    if g.ndim != 2:
        raise ValueError("gray image must be 2-D")
    if g.dtype != np.uint8:
        if g.min() < 0 or g.max() > 255:
            raise ValueError("gray values must lie in 0..255")
        g = g.astype(np.uint8)
    h, w = g.shape
    return f"P5\n{w} {h}\n255\n".encode("ascii") + np.ascontiguousarray(g).tobytes()


def write_pgm(path, gray):
    atomic_write_bytes(path, pgm_bytes(gray))


def read_pgm(path):
    with open(path, "rb") as fh:
        data = fh.read()
    parts = data.split(b"\n", 3)
    if parts[0] != b"P5" or parts[2] != b"255":
        raise ValueError(f"{path}: not an 8-bit binary PGM")
    w, h = (int(t) for t in parts[1].split())
    return np.frombuffer(parts[3], dtype=np.uint8, count=w * h).reshape(h, w)


def _json_value(v, indent, level):
    pad = " " * (indent * (level + 1)) if indent else ""
    end = " " * (indent * level) if indent else ""
    nl = "\n" if indent else ""
    sep = "," + nl if indent else ", "
    if isinstance(v, (bool, np.bool_)) or v is None:
        return json.dumps(None if v is None else bool(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        if not math.isfinite(v):
            return "null"
        return fmt_float(v)
    if isinstance(v, str):
        return json.dumps(v)
    if isinstance(v, dict):
        if not v:
            return "{}"
        items = [pad + json.dumps(str(k)) + ": " + _json_value(x, indent, level + 1) for k, x in v.items()]
        return "{" + nl + sep.join(items) + nl + end + "}"
    if isinstance(v, (list, tuple, np.ndarray)):
        if len(v) == 0:
            return "[]"
        items = [pad + _json_value(x, indent, level + 1) for x in v]
        return "[" + nl + sep.join(items) + nl + end + "]"
    raise TypeError(f"cannot serialise {type(v).__name__}")


def dumps(obj, indent=2) -> str:
    """JSON text with floats at 17 significant digits; non-finite floats become null."""
    return _json_value(obj, indent, 0)


def write_json(path, obj):
    atomic_write_text(path, dumps(obj) + "\n")


def csv_text(header, rows) -> str:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(fmt_float(x) if isinstance(x, (float, np.floating)) else str(x)
                              for x in row))
    return "\n".join(lines) + "\n"


def write_csv(path, header, rows):
    atomic_write_text(path, csv_text(header, rows))
