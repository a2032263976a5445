"""Binary weight bundle format shared between trainer and inference.

Layout (little-endian throughout): magic "MLCW", u32 version=1, u32 record
count; per record u16 name length, UTF-8 name, u8 rank, u32 dims[rank],
float32 payload in row-major order; trailing CRC32 over all preceding
bytes.
"""

from __future__ import annotations

import struct
import zlib

import numpy as np

MAGIC = b"MLCW"
VERSION = 1


class WeightFormatError(ValueError):
    """Base class for weight file problems."""


class BadMagicError(WeightFormatError):
    pass


class VersionMismatchError(WeightFormatError):
    pass


class TruncatedPayloadError(WeightFormatError):
    pass


class ChecksumError(WeightFormatError):
    pass


class ShapeError(WeightFormatError):
    pass


def dump_bundle(records: dict[str, np.ndarray]) -> bytes:
    """Serialize named float32 arrays in insertion order."""
    out = bytearray()
    out += MAGIC
    out += struct.pack("<II", VERSION, len(records))
    for name, arr in records.items():
        arr = np.ascontiguousarray(arr, dtype="<f4")
        encoded = name.encode("utf-8")
        out += struct.pack("<H", len(encoded))
        out += encoded
        out += struct.pack("<B", arr.ndim)
        out += struct.pack(f"<{arr.ndim}I", *arr.shape)
        out += arr.tobytes()
    out += struct.pack("<I", zlib.crc32(bytes(out)) & 0xFFFFFFFF)
    return bytes(out)


def load_bundle(data: bytes) -> dict[str, np.ndarray]:
    """Parse and validate a weight file into named arrays."""
    if len(data) < 12 + 4:
        raise TruncatedPayloadError("file too short for header and checksum")
    if data[:4] != MAGIC:
        raise BadMagicError(f"bad magic {data[:4]!r}")
    stored_crc = struct.unpack("<I", data[-4:])[0]
    actual_crc = zlib.crc32(data[:-4]) & 0xFFFFFFFF
    if stored_crc != actual_crc:
        raise ChecksumError(
            f"checksum mismatch: stored {stored_crc:#010x}, actual {actual_crc:#010x}"
        )
    version, count = struct.unpack_from("<II", data, 4)
    if version != VERSION:
        raise VersionMismatchError(f"unsupported version {version}")
    pos = 12
    end = len(data) - 4
    records: dict[str, np.ndarray] = {}
    for _ in range(count):
        try:
            (name_len,) = struct.unpack_from("<H", data, pos)
            pos += 2
            name = data[pos : pos + name_len].decode("utf-8")
            pos += name_len
            (rank,) = struct.unpack_from("<B", data, pos)
            pos += 1
            dims = struct.unpack_from(f"<{rank}I", data, pos)
            pos += 4 * rank
        except struct.error:
            raise TruncatedPayloadError("record header extends past end of file")
        size = int(np.prod(dims, dtype=np.int64)) if rank else 1
        nbytes = size * 4
        if pos + nbytes > end:
            raise TruncatedPayloadError(f"payload of {name!r} is truncated")
        arr = np.frombuffer(data, dtype="<f4", count=size, offset=pos)
        records[name] = arr.reshape(dims).copy()
        pos += nbytes
    if pos != end:
        raise TruncatedPayloadError(f"{end - pos} trailing bytes after last record")
    return records


def save_bundle_file(path, records) -> None:
    with open(path, "wb") as fh:
        fh.write(dump_bundle(records))


def load_bundle_file(path) -> dict[str, np.ndarray]:
    with open(path, "rb") as fh:
        return load_bundle(fh.read())
