"""IQ sample file formats.

CSV: optional leading '#' comment lines, a header row ``i1,q1,i2,q2``, then
one decimal-float row per sample.

Binary: a 16-byte little-endian header (magic ``NCIQ``, version uint32,
sample count uint64) followed by float64 samples in row-major order, one
row per sample in the fixed (I1, Q1, I2, Q2) ordering.
"""

from __future__ import annotations

import io
import os
import struct

import numpy as np

from .errors import IQFileError
from .model import IQBatch

__all__ = ["read_iq", "read_iq_csv", "write_iq_csv", "read_iq_binary", "write_iq_binary"]

CSV_HEADER = "i1,q1,i2,q2"
BINARY_MAGIC = b"NCIQ"
BINARY_VERSION = 1
_HEADER_STRUCT = struct.Struct("<4sIQ")


def write_iq_csv(batch: IQBatch, path: str | os.PathLike, comment: str | None = None) -> None:
    buf = io.StringIO()
    if comment:
        for line in comment.splitlines():
            buf.write(f"# {line}\n")
    buf.write(CSV_HEADER + "\n")
    for row in batch.as_matrix():
        buf.write(",".join(repr(float(v)) for v in row) + "\n")
    _atomic_write(path, buf.getvalue().encode())


def read_iq_csv(path: str | os.PathLike) -> IQBatch:
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    body = [ln for ln in lines if ln.strip() and not ln.lstrip().startswith("#")]
    if not body:
        raise IQFileError("empty IQ CSV file")
    header = [col.strip() for col in body[0].split(",")]
    if header != CSV_HEADER.split(","):
        raise IQFileError(f"bad IQ CSV header: expected '{CSV_HEADER}', got '{body[0]}'")
    rows = []
    for ln in body[1:]:
        parts = ln.split(",")
        if len(parts) != 4:
            raise IQFileError(f"expected 4 columns, got {len(parts)} in row '{ln}'")
        try:
            rows.append([float(p) for p in parts])
        except ValueError as exc:
            raise IQFileError(f"non-numeric value in row '{ln}'") from exc
    if not rows:
        raise IQFileError("IQ CSV file contains no sample rows")
    data = np.asarray(rows)
    return IQBatch(i1=data[:, 0], q1=data[:, 1], i2=data[:, 2], q2=data[:, 3])


def write_iq_binary(batch: IQBatch, path: str | os.PathLike) -> None:
    header = _HEADER_STRUCT.pack(BINARY_MAGIC, BINARY_VERSION, batch.n)
    payload = np.ascontiguousarray(batch.as_matrix(), dtype="<f8").tobytes()
    _atomic_write(path, header + payload)


def read_iq_binary(path: str | os.PathLike) -> IQBatch:
    with open(path, "rb") as fh:
        raw = fh.read()
    if len(raw) < _HEADER_STRUCT.size:
        raise IQFileError("binary IQ file shorter than its 16-byte header")
    magic, version, count = _HEADER_STRUCT.unpack_from(raw)
    if magic != BINARY_MAGIC:
        raise IQFileError(f"bad magic {magic!r}, expected {BINARY_MAGIC!r}")
    if version != BINARY_VERSION:
        raise IQFileError(f"unsupported IQ binary version {version}")
    body = raw[_HEADER_STRUCT.size:]
    expected = count * 4 * 8
    if len(body) != expected:
        raise IQFileError(f"payload is {len(body)} bytes, expected {expected} for {count} samples")
    data = np.frombuffer(body, dtype="<f8").reshape(count, 4)
    return IQBatch(i1=data[:, 0], q1=data[:, 1], i2=data[:, 2], q2=data[:, 3])


def read_iq(path: str | os.PathLike) -> IQBatch:
    """Read an IQ file, sniffing the binary magic to pick the format."""
    with open(path, "rb") as fh:
        head = fh.read(4)
    if head == BINARY_MAGIC:
        return read_iq_binary(path)
    return read_iq_csv(path)


def _atomic_write(path: str | os.PathLike, payload: bytes) -> None:
    path = os.fspath(path)
    tmp = path + ".tmp"
    with open(tmp, "wb") as fh:
        fh.write(payload)
    os.replace(tmp, path)
