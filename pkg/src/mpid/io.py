"""
Matrix files.

CSV
    Comma-separated decimal literals, one matrix row per line, optionally
    preceded by one header line.
RAW
    ``b"MPID"``, a version byte ``0x01``, rows and cols as little-endian
    uint64, then ``rows * cols`` little-endian float64 in column-major order.
"""

import os
import struct

import numpy as np

from .errors import ParseError, RaggedRowsError

__all__ = ["RAW_MAGIC", "RAW_VERSION", "load_matrix", "save_matrix", "infer_format"]

RAW_MAGIC = b"MPID"
RAW_VERSION = 1
_HEADER = struct.Struct("<4sBQQ")


def infer_format(path):
    return "csv" if os.fspath(path).lower().endswith(".csv") else "raw"


def load_matrix(path, fmt=None, header=False):
    """Read a matrix written as CSV or RAW (chosen by extension if
    ``fmt`` is None)."""
    fmt = fmt or infer_format(path)
    if fmt == "csv":
        with open(path, encoding="utf-8") as fh:
            return parse_csv(fh.read(), header=header)
    if fmt == "raw":
        with open(path, "rb") as fh:
            return parse_raw(fh.read())
    raise ValueError(f"unknown matrix format {fmt!r}")


def parse_csv(text, header=False):
    rows = []
    width = None
    for lineno, line in enumerate(text.splitlines(), start=1):
        if header and lineno == 1:
            continue
        if not line.strip():
            continue
        fields = line.split(",")
        try:
            values = [float(f) for f in fields]
        except ValueError:
            bad = next(f for f in fields if not _is_float(f))
            raise ParseError(f"not a number: {bad.strip()!r}", line=lineno) from None
        if width is None:
            width = len(values)
        elif len(values) != width:
            raise RaggedRowsError(f"expected {width} fields, found {len(values)}", line=lineno)
        rows.append(values)
    if not rows:
        raise ParseError("no data rows", line=1)
    return np.array(rows, dtype=np.float64)


def _is_float(s):
    try:
        float(s)
    except ValueError:
        return False
    return True


def parse_raw(data):
    if len(data) < _HEADER.size:
        raise ParseError(f"truncated header: {len(data)} bytes", offset=len(data))
    magic, version, rows, cols = _HEADER.unpack_from(data)
    if magic != RAW_MAGIC:
        raise ParseError(f"bad magic {magic!r}", offset=0)
    if version != RAW_VERSION:
        raise ParseError(f"unsupported version {version}", offset=4)
    expected = _HEADER.size + 8 * rows * cols
    if len(data) != expected:
        raise ParseError(f"expected {expected} bytes for {rows}x{cols}, found {len(data)}",
                         offset=min(len(data), expected))
    flat = np.frombuffer(data, dtype="<f8", count=rows * cols, offset=_HEADER.size)
    return flat.reshape((rows, cols), order="F").astype(np.float64)


def save_matrix(path, A, fmt=None):
    """Write ``A`` as CSV (shortest round-trip literals) or RAW."""
    A = np.asarray(A, dtype=np.float64)
    if A.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got shape {A.shape}")
    fmt = fmt or infer_format(path)
    if fmt == "csv":
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            for row in A:
                fh.write(",".join(repr(float(v)) for v in row) + "\n")
    elif fmt == "raw":
        with open(path, "wb") as fh:
            fh.write(_HEADER.pack(RAW_MAGIC, RAW_VERSION, A.shape[0], A.shape[1]))
            fh.write(np.asarray(A, dtype="<f8").tobytes(order="F"))
    else:
        raise ValueError(f"unknown matrix format {fmt!r}")
